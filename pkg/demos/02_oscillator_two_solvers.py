"""Two independent routes to the same minimum-fuel control of an oscillator.

The linear program sees the control as 2000 numbers.  Shooting sees it as
a costate vector with two entries and derives the control from the
dead-zone law.  Where both succeed they should agree to about a grid cell.

Run:  python3 demos/02_oscillator_two_solvers.py
"""
import numpy as np

from handsoff import LtiSystem, shoot_solve, solve_lp, transcribe

plant = LtiSystem([[0.0, 1.0], [-1.0, 0.0]], [0.0, 1.0], 2 * np.pi)
N = 2000
print("assumption check:", plant.assumption1.as_dict())

xi = np.array([1.2, -0.4])
lp = solve_lp(transcribe(plant, xi, N))
shot = shoot_solve(plant, xi, seed=1)

# %% The LP solution is a vertex, so only a couple of cells are fractional;
# everything else is -1, 0 or +1 already.
print(f"LP:       L1 = {lp.value:.6f}, L0 = {lp.value_l0:.6f}, "
      f"fractional cells = {lp.fractional_cells}")

# %% Shooting returns exact switching times, and its L0 and L1 costs coincide.
print(f"shooting: L1 = {shot.value:.6f}, L0 = {shot.value_l0:.6f}, "
      f"residual = {shot.residual:.1e}")
for t0, t1, level in zip(shot.switching.edges, shot.switching.edges[1:],
                         shot.switching.levels):
    print(f"  u = {int(level):2d} on [{t0:.4f}, {t1:.4f})")

# %% The LP dual is itself a costate estimate.
print("LP dual costate:     ", np.round(lp.costate, 5))
print("shooting costate:    ", np.round(shot.costate, 5))
print(f"difference in value:  {abs(lp.value - shot.value):.2e} "
      f"(one cell is {plant.T / N:.2e})")
