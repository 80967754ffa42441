"""The full verification run behind ``handsoff check``."""
from dataclasses import dataclass

import numpy as np

from .analysis import (AxisSpec, CheckResult, continuity_report, level_set_suite,
                       reach_box, sweep)
from .l1lp import solve_lp, transcribe, value_l1
from .model import ControlSignal, terminal_map
from .shooting import shoot_solve

__all__ = ["SuiteReport", "feasible_samples", "cross_check", "run_suite",
           "CONTINUITY_RATIO", "BAND_1D", "BAND_ND"]

CONTINUITY_RATIO = 0.75
BAND_1D = 1e-3
BAND_ND = 0.05
CROSS_PASS_FRACTION = 0.9


@dataclass
class SuiteReport:
    rows: list

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def table(self):
        width = max(len(r.name) for r in self.rows)
        lines = [f"{'check'.ljust(width)}  result  detail"]
        for r in self.rows:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"{r.name.ljust(width)}  {mark:6s}  {r.detail}".rstrip())
        return "\n".join(lines)


def feasible_samples(sys, count, rng, N=400, pieces=8):
    """Initial states known to be steerable: ``-r(u)`` for random scaled controls."""
    out = []
    for _ in range(count):
        levels = rng.uniform(-1.0, 1.0, pieces) * rng.uniform(0.2, 0.9)
        u = ControlSignal(np.repeat(levels, N // pieces), sys.T)
        out.append(-terminal_map(sys, u))
    return out


def cross_check(sys, xis, N, seed=0, N_quad=200, force=False):
    """LP against shooting on each ``xi``; returns per-sample rows."""
    dt = sys.T / N
    tol = max(2 * sys.n * dt, 1e-6)
    rows = []
    for k, xi in enumerate(xis):
        lp = solve_lp(transcribe(sys, xi, N))
        sh = shoot_solve(sys, xi, seed=seed + k, N_quad=N_quad, force=force)
        agree = sh.feasible and lp.feasible and abs(sh.value - lp.value) <= tol
        rows.append({"xi": np.asarray(xi).tolist(), "lp": lp.value,
                     "shoot": sh.value if sh.feasible else None,
                     "shoot_status": sh.status, "agree": bool(agree),
                     "l0_eq_l1": bool(sh.feasible and sh.value_l0 == sh.value)})
    return rows, tol


def _continuity_tables(sys, N, jobs):
    box = reach_box(sys, N)
    if sys.n == 1:
        edge = (1.0 - BAND_1D) * box[0]
        tabs = [sweep(sys, [AxisSpec(-edge, edge, c)], N, jobs=jobs) for c in (101, 201)]
        return tabs, None
    counts = (11, 21) if sys.n == 2 else (7, 13)
    tabs = [sweep(sys, [AxisSpec(-b, b, c) for b in box], N, jobs=jobs) for c in counts]

    def keep(grid):
        # drop the band next to the reachable-set boundary
        return np.array([np.isfinite(value_l1(sys, x / (1.0 - BAND_ND), N)) for x in grid])
    return tabs, keep


def run_suite(sys, N=2000, seed=0, jobs=1, force=False, cross_samples=10):
    """Normality gate, level-set checks, continuity modulus, LP/shooting agreement."""
    rows = []
    a1 = sys.assumption1
    rows.append(CheckResult("assumption1", a1.normal, 0.0,
                            "; ".join(a1.reasons()) or "controllable, A nonsingular"))
    rng = np.random.default_rng(seed)

    box = reach_box(sys, N)
    if sys.n == 1:
        xis = [np.array([x]) for x in np.linspace(-1.1 * box[0], 1.1 * box[0], 23)]
    else:
        xis = [rng.uniform(-1.1, 1.1, sys.n) * box for _ in range(20)]
    alphas = [0.0, 0.2 * sys.T, 0.5 * sys.T, sys.T]
    ls = level_set_suite(sys, alphas, xis, N)
    for c in ls.checks:
        rows.append(CheckResult(f"levelset:{c.name}", c.passed, c.slack,
                                c.detail or f"slack {c.slack:.3g}"))

    tabs, keep = _continuity_tables(sys, N, jobs)
    rep = continuity_report(tabs[0], tabs[1:], keep=keep)
    ratio = rep.ratios()[0]
    rows.append(CheckResult(
        "continuity", bool(ratio <= CONTINUITY_RATIO), ratio,
        f"max jump {rep.modulus_curve[0][1]:.4g} -> {rep.modulus_curve[1][1]:.4g} "
        f"(ratio {ratio:.3f}, limit {CONTINUITY_RATIO})"))

    samples = feasible_samples(sys, cross_samples, rng)
    cc, tol = cross_check(sys, samples, N, seed=seed, force=force)
    frac = sum(r["agree"] for r in cc) / len(cc)
    l0ok = all(r["l0_eq_l1"] for r in cc if r["shoot"] is not None)
    rows.append(CheckResult(
        "lp_vs_shooting", bool(frac >= CROSS_PASS_FRACTION and l0ok), frac,
        f"{sum(r['agree'] for r in cc)}/{len(cc)} agree within {tol:.3g}; "
        f"{sum(r['shoot'] is None for r in cc)} shooting failures flagged"))
    return SuiteReport(rows)
