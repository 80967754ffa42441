"""Fuel-budget sets of the oscillator and the checks run on them.

A state belongs to the budget-a set when some admissible control steers it
home using at most a seconds of fuel.  The script draws these sets on a
coarse character grid and then runs the five checks of level_set_suite.

Run:  python3 demos/03_budget_sets.py
"""
import numpy as np

from handsoff import LtiSystem, level_set_suite, value_l1
from handsoff.analysis import reach_box

plant = LtiSystem([[0.0, 1.0], [-1.0, 0.0]], [0.0, 1.0], 2 * np.pi)
N = 400

# %% Map each grid point to the smallest budget that contains it.
h = reach_box(plant, N)
xs = np.linspace(-h[0], h[0], 41)
ys = np.linspace(h[1], -h[1], 21)
budgets = [1.0, 2.0, 4.0, plant.T]
marks = "1234"
print("smallest budget containing each point:",
      ", ".join(f"{m} = {b:.2f}" for m, b in zip(marks, budgets)), "('.' = unreachable)")
for y in ys:
    row = ""
    for x in xs:
        v = value_l1(plant, [x, y], N)
        k = next((i for i, b in enumerate(budgets) if v <= b), None)
        row += "." if k is None else marks[k]
    print(row)

# %% The budget sets grow with the budget, shrink to the origin at zero and
# fill the whole reachable set at the horizon.
rng = np.random.default_rng(0)
report = level_set_suite(plant, [0.0, 1.0, 3.0, plant.T],
                         list(rng.uniform(-1.1, 1.1, (15, 2)) * h), N)
for check in report.checks:
    print(f"{check.name:15s} {'pass' if check.passed else 'FAIL'}  {check.detail}")
