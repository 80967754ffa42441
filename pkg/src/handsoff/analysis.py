"""Value-function tables over the reachable set and the checks run on them.

* :func:`sweep` evaluates the LP value on an axis-aligned lattice.
* :func:`continuity_report` measures the largest jump between lattice
  neighbours, and how it shrinks under refinement.
* :func:`level_set_suite` tests the sublevel-set facts that tie the budget
  sets ``R_alpha`` to the value function.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import csv
import datetime as _dt
import io
import itertools
import math

import numpy as np

from .l1lp import in_budget_set, solve_lp, transcribe
from .model import LtiSystem
from .simplex import SolverError

__all__ = [
    "AxisSpec",
    "ValueTable",
    "DegenerateTableError",
    "ContinuityReport",
    "CheckResult",
    "LevelSetReport",
    "parse_grid",
    "lattice",
    "sweep",
    "continuity_report",
    "level_set_suite",
    "boundary_point",
    "reach_box",
]

CSV_DIGITS = 12


class DegenerateTableError(ValueError):
    """Fewer than two usable points in a table."""


@dataclass(frozen=True)
class AxisSpec:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("axis count must be >= 1")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi < self.lo:
            raise ValueError(f"bad axis range [{self.lo}, {self.hi}]")

    def points(self):
        if self.count == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def step(self):
        return (self.hi - self.lo) / (self.count - 1) if self.count > 1 else 0.0


def parse_grid(text):
    """Parse ``"min:max:count[,min:max:count...]"`` into axis specs."""
    if not text or not text.strip():
        raise ValueError("empty grid specification")
    axes = []
    for part in text.split(","):
        bits = part.strip().split(":")
        if len(bits) != 3:
            raise ValueError(f"grid axis {part!r} is not min:max:count")
        try:
            lo, hi, count = float(bits[0]), float(bits[1]), int(bits[2])
        except ValueError:
            raise ValueError(f"grid axis {part!r} is not numeric") from None
        axes.append(AxisSpec(lo, hi, count))
    return axes


def lattice(axes):
    """Row-major lattice points (last axis fastest) as a K x n array."""
    pts = [ax.points() for ax in axes]
    mesh = np.meshgrid(*pts, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class ValueTable:
    """LP values on a lattice; ``values`` is NaN where ``feasible`` is False."""

    grid: np.ndarray
    values: np.ndarray
    feasible: np.ndarray
    N_cells: int
    shape: tuple
    status: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.grid.shape[1]

    def steps(self):
        out = []
        for axis, count in enumerate(self.shape):
            col = np.unique(self.grid[:, axis])
            out.append(float(np.max(np.diff(col))) if col.size > 1 else 0.0)
        return out

    def to_csv(self, fh=None):
        """Write ``xi_1,...,xi_n,V,feasible``; returns the text if ``fh`` is None."""
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"xi_{i + 1}" for i in range(self.n)] + ["V", "feasible"])
        for x, v, ok in zip(self.grid, self.values, self.feasible):
            row = [_fmt(c) for c in x]
            row.append(_fmt(v) if ok else "")
            row.append("1" if ok else "0")
            w.writerow(row)
        if fh is None:
            return buf.getvalue()

    @classmethod
    def from_csv(cls, fh):
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-2:] != ["V", "feasible"]:
            raise ValueError("not a value table: header must end with V,feasible")
        n = len(header) - 2
        if n < 1 or header[:n] != [f"xi_{i + 1}" for i in range(n)]:
            raise ValueError("value table header must start with xi_1..xi_n")
        grid, values, feas = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n + 2:
                raise ValueError(f"line {lineno}: expected {n + 2} fields")
            ok = row[-1].strip() == "1"
            grid.append([float(c) for c in row[:n]])
            values.append(float(row[n]) if ok else math.nan)
            feas.append(ok)
        grid = np.array(grid, dtype=float).reshape(-1, n)
        shape = tuple(int(np.unique(grid[:, i]).size) for i in range(n))
        if int(np.prod(shape)) != grid.shape[0]:
            shape = (grid.shape[0],) if n == 1 else shape
        return cls(grid, np.array(values), np.array(feas, dtype=bool), 0, shape)


def _fmt(v):
    return format(float(v), f".{CSV_DIGITS}g")


def _point_value(args):
    sys_dict, xi, N = args
    sys = LtiSystem(np.array(sys_dict["A"]), np.array(sys_dict["B"]), sys_dict["T"])
    try:
        res = solve_lp(transcribe(sys, xi, N))
    except (SolverError, np.linalg.LinAlgError) as exc:
        return "failed", math.nan, str(exc)
    if res.feasible:
        return "solved", res.value, ""
    return "infeasible", math.nan, ""


def sweep(sys, grid_spec, N_cells, jobs=1):
    """LP value at every lattice point of ``grid_spec``.

    ``grid_spec`` is a list of :class:`AxisSpec` (or a ``min:max:count``
    string).  Infeasible and failed points are marked, never raised.  With
    ``jobs > 1`` points are farmed out to worker processes; output order is
    always lattice order.
    """
    axes = parse_grid(grid_spec) if isinstance(grid_spec, str) else list(grid_spec)
    if len(axes) != sys.n:
        raise ValueError(f"grid has {len(axes)} axes, system has {sys.n} states")
    pts = lattice(axes)
    work = [(sys.to_dict(), x, int(N_cells)) for x in pts]
    if jobs and jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_point_value, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        out = [_point_value(w) for w in work]
    status = [o[0] for o in out]
    values = np.array([o[1] for o in out], dtype=float)
    failures = [(i, o[2]) for i, o in enumerate(out) if o[0] == "failed"]
    meta = {
        "system": sys.digest,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "failures": failures,
    }
    return ValueTable(pts, values, np.array([s == "solved" for s in status]),
                      int(N_cells), tuple(ax.count for ax in axes), status, meta)


@dataclass
class ContinuityReport:
    max_adjacent_jump: float
    step: float
    pairs: int
    excluded: list
    modulus_curve: list

    def ratios(self):
        """Jump ratios between consecutive refinements of ``modulus_curve``."""
        js = [j for _, j in self.modulus_curve]
        return [b / a if a > 0 else math.nan for a, b in zip(js, js[1:])]


def _max_jump(table, keep):
    ok = table.feasible.copy()
    if keep is not None:
        mask = keep(table.grid) if callable(keep) else np.asarray(keep, dtype=bool)
        ok &= mask
    if np.count_nonzero(ok) < 2:
        raise DegenerateTableError("need at least two feasible points")
    shape = table.shape
    V = table.values.reshape(shape)
    OK = ok.reshape(shape)
    jump, pairs = 0.0, 0
    for axis in range(len(shape)):
        if shape[axis] < 2:
            continue
        lo = [slice(None)] * len(shape)
        hi = [slice(None)] * len(shape)
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        both = OK[tuple(lo)] & OK[tuple(hi)]
        if np.any(both):
            d = np.abs(V[tuple(hi)] - V[tuple(lo)])[both]
            jump = max(jump, float(d.max()))
            pairs += int(both.sum())
    excluded = [int(i) for i in np.flatnonzero(~ok)]
    return jump, pairs, excluded


def continuity_report(table, refinements=(), keep=None):
    """Largest ``|V_i - V_j|`` over lattice-adjacent usable pairs.

    ``keep`` (a boolean mask or a callable on the grid) removes points on
    top of infeasibility, e.g. a band along the reachable-set boundary.
    ``refinements`` are further tables on finer lattices; ``modulus_curve``
    lists ``(step, max jump)`` for all of them from coarse to fine.
    """
    jump, pairs, excluded = _max_jump(table, keep)
    curve = [(max(table.steps()), jump)]
    for t in refinements:
        curve.append((max(t.steps()), _max_jump(t, keep)[0]))
    curve.sort(key=lambda hj: -hj[0])
    return ContinuityReport(jump, max(table.steps()), pairs, excluded, curve)


def boundary_point(sys, direction, N):
    """Extreme point of the grid reachable set, as an initial state.

    The all-bang control ``u_k = sign(d' G_k)`` maximizes ``d' sum G_k u_k``;
    the returned ``xi`` is steered to the origin only by that control.
    """
    G = sys.cell_matrix(N)
    d = np.asarray(direction, dtype=float).ravel()
    return -(G @ np.sign(d @ G))


def reach_box(sys, N):
    """Axis-aligned bounding box ``[-h, h]`` of the grid reachable set."""
    return np.abs(sys.cell_matrix(N)).sum(axis=1)


@dataclass
class CheckResult:
    name: str
    passed: bool
    slack: float
    detail: str = ""


@dataclass
class LevelSetReport:
    checks: list
    tolerance: float

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def level_set_suite(sys, alphas, sample_xis, N_cells, *, boundary_dirs=None,
                    boundary_eps=(1e-2, 1e-3, 1e-4), boundary_tol=None):
    """Run the five budget-set checks; report only, never raises on failure.

    ``nesting``           feasible within budget a  =>  feasible within b > a
    ``sublevel``          budget feasibility at a  <=>  V <= a, up to 2 n dt
    ``horizon_budget``    the budget T never binds
    ``zero_budget``       budget 0 admits only xi = 0
    ``boundary``          V -> T approaching extreme points of R(T)
    """
    N = int(N_cells)
    dt = sys.T / N
    tol = 2 * sys.n * dt
    alphas = sorted(float(a) for a in alphas)
    if any(a < 0 or a > sys.T for a in alphas):
        raise ValueError("alphas must lie in [0, T]")
    xis = [np.asarray(x, dtype=float).ravel() for x in sample_xis]
    if not any(not np.any(x) for x in xis):
        xis.append(np.zeros(sys.n))

    V = np.array([solve_lp(transcribe(sys, x, N)).value for x in xis])
    feas = np.array([[in_budget_set(sys, x, a, N) for a in alphas] for x in xis],
                    dtype=bool).reshape(len(xis), len(alphas))
    checks = []

    bad = [i for i in range(len(xis)) if np.any(feas[i, :-1] & ~feas[i, 1:])]
    checks.append(CheckResult("nesting", not bad, 0.0,
                              f"{len(bad)} non-monotone samples" if bad else ""))

    # slack: largest distance by which a verdict sits on the wrong side of V
    worst, violations = -math.inf, 0
    for i, j in itertools.product(range(len(xis)), range(len(alphas))):
        a = alphas[j]
        if feas[i, j]:
            gap = V[i] - a
            violations += gap > tol
        elif np.isfinite(V[i]):
            gap = a - V[i]
            violations += gap >= tol
        else:
            continue
        worst = max(worst, gap)
    checks.append(CheckResult("sublevel", bool(violations == 0), worst,
                              f"{violations} violations; tolerance 2n*dt = {tol:.3g}"))

    at_T = np.array([in_budget_set(sys, x, sys.T, N) for x in xis])
    mism = int(np.count_nonzero(at_T != np.isfinite(V)))
    checks.append(CheckResult("horizon_budget", mism == 0, float(mism),
                              f"{mism} samples where the budget T binds" if mism else ""))

    at_0 = np.array([in_budget_set(sys, x, 0.0, N) for x in xis])
    norms = np.array([np.linalg.norm(x) for x in xis])
    zero_slack = 1e-9
    wrong = int(np.count_nonzero(at_0 != (norms <= zero_slack)))
    checks.append(CheckResult("zero_budget", wrong == 0, float(wrong),
                              f"{wrong} samples misclassified" if wrong else ""))

    if boundary_dirs is None:
        boundary_dirs = [s * e for e in np.eye(sys.n) for s in (1.0, -1.0)]
    if boundary_tol is None:
        boundary_tol = 0.05 * sys.T
    eps = sorted(boundary_eps, reverse=True)
    ok, worst_gap, notes = True, 0.0, []
    for d in boundary_dirs:
        xb = boundary_point(sys, d, N)
        edge = solve_lp(transcribe(sys, xb, N)).value
        gaps = [sys.T - solve_lp(transcribe(sys, (1 - e) * xb, N)).value for e in eps]
        gaps.append(sys.T - edge)
        mono = all(b <= a + tol for a, b in zip(gaps, gaps[1:]))
        close = abs(gaps[-1]) <= tol and gaps[-2] <= boundary_tol
        if not (mono and close):
            ok = False
            notes.append(f"dir {np.round(d, 3).tolist()}: gaps {np.round(gaps, 4).tolist()}")
        worst_gap = max(worst_gap, gaps[-2])
    checks.append(CheckResult("boundary", ok, worst_gap, "; ".join(notes)))
    return LevelSetReport(checks, tol)
