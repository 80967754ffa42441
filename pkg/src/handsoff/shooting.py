"""Minimum-principle path: dead-zone extremals driven by an initial costate.

For the fuel Hamiltonian ``|u| + p'(Ax + Bu)`` the pointwise minimizer is
``u(t) = -dez(B' p(t))`` with ``p(t) = e^{-A't} p0``.  Shooting searches for
the ``p0`` whose extremal steers ``xi`` to the origin at ``T``.  Because the
problem is convex, any extremal that meets the boundary condition is a
global L1 optimum.

Between switching times the extremal is constant, so once the switches are
located the terminal residual is computed from exact kernel integrals
rather than quadrature.
"""
from dataclasses import dataclass, field
import warnings

import numpy as np
from scipy.optimize import brentq, minimize, root

from .linalg import cell_integral, expm
from .l1lp import SolveResult, solve_lp, transcribe
from .model import ZERO_TOL, ControlSignal

__all__ = [
    "CostateSeed",
    "SwitchingStructure",
    "NotNormalError",
    "dead_zone",
    "costate_signal",
    "extremal_control",
    "switching_structure",
    "shoot_residual",
    "shoot_solve",
]

SHOOT_TOL = 1e-7
SWITCH_XTOL = 1e-10
SINGULAR_BAND = 1e-9


class NotNormalError(ValueError):
    """Shooting refused: the system fails controllability or has singular A."""


@dataclass(frozen=True, eq=False)
class CostateSeed:
    p0: np.ndarray

    def __post_init__(self):
        p0 = np.array(self.p0, dtype=float).ravel()
        if not np.all(np.isfinite(p0)):
            raise ValueError("costate seed must be finite")
        object.__setattr__(self, "p0", p0)


@dataclass(frozen=True)
class SwitchingStructure:
    """Bang-off-bang control: ``levels[i]`` holds on ``[edges[i], edges[i+1])``."""

    times: tuple
    levels: tuple
    T: float
    near_tangent: bool = field(default=False, compare=False)

    def __post_init__(self):
        if len(self.levels) != len(self.times) + 1:
            raise ValueError("need exactly one more level than switching times")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("switching times must be strictly increasing")
        if any(lv not in (-1.0, 0.0, 1.0) for lv in self.levels):
            raise ValueError("levels must be -1, 0 or +1")
        if any(a == b for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("adjacent levels must differ")

    @property
    def edges(self):
        return (0.0, *self.times, self.T)

    def durations(self):
        e = self.edges
        return [b - a for a, b in zip(e, e[1:])]

    def l1(self):
        return float(sum(abs(lv) * d for lv, d in zip(self.levels, self.durations())))

    def l0(self):
        return float(sum((lv != 0.0) * d for lv, d in zip(self.levels, self.durations())))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(np.asarray(self.times), t, side="right")
        return np.asarray(self.levels)[idx]

    def sample(self, N):
        """Cell-midpoint samples on N uniform cells (values stay in {-1, 0, 1})."""
        mid = (np.arange(N) + 0.5) * (self.T / N)
        return ControlSignal(self(mid), self.T)

    def to_dict(self):
        return {"times": list(self.times), "levels": list(self.levels)}


def dead_zone(r):
    """0 on ``|r| <= 1``, sign(r) outside; the value at ``|r| = 1`` is 0."""
    r = np.asarray(r, dtype=float)
    out = np.where(r > 1.0, 1.0, np.where(r < -1.0, -1.0, 0.0))
    return out if out.ndim else float(out)


def _p0(seed):
    return seed.p0 if isinstance(seed, CostateSeed) else np.asarray(seed, dtype=float).ravel()


def costate_signal(sys, seed, t):
    """``B' e^{-A't} p0`` at time(s) ``t``."""
    p0 = _p0(seed)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    vals = np.array([(expm(-sys.A, tk) @ sys.B)[:, 0] @ p0 for tk in ts])
    return vals if np.ndim(t) else float(vals[0])


def extremal_control(sys, seed, t):
    return -dead_zone(costate_signal(sys, seed, t))


class _Extremals:
    """Per-system cache: costate kernel on a scan grid and exact integrals."""

    def __init__(self, sys, N_quad):
        self.sys = sys
        self.N_quad = int(N_quad)
        self.ts = np.linspace(0.0, sys.T, 10 * self.N_quad + 1)
        self.kernel = np.array([(expm(-sys.A, t) @ sys.B)[:, 0] for t in self.ts])

    def g(self, p0, t):
        return float((expm(-self.sys.A, t) @ self.sys.B)[:, 0] @ p0)

    def integral(self, t):
        if t == 0.0:
            return np.zeros(self.sys.n)
        return cell_integral(self.sys.A, self.sys.B, 0.0, t)[:, 0]

    def structure(self, p0):
        ts = self.ts
        vals = self.kernel @ p0
        roots = []
        for level in (1.0, -1.0):
            h = vals - level
            above = h > 0
            for i in np.flatnonzero(above[:-1] != above[1:]):
                a, b = ts[i], ts[i + 1]
                roots.append(brentq(lambda t: self.g(p0, t) - level, a, b,
                                    xtol=SWITCH_XTOL))
        roots = sorted(r for r in roots if 0.0 < r < self.sys.T)

        mags = np.abs(vals)
        interior = mags[1:-1]
        peak = (interior >= mags[:-2]) & (interior >= mags[2:])
        valley = (interior <= mags[:-2]) & (interior <= mags[2:])
        close = np.abs(interior - 1.0) < 1e-3
        near_tangent = bool(np.any((peak | valley) & close))

        edges = [0.0, *roots, self.sys.T]
        times, levels = [], []
        for a, b in zip(edges, edges[1:]):
            if b - a <= 0.0:
                continue
            lv = 0.0 - dead_zone(self.g(p0, 0.5 * (a + b)))
            if levels and lv == levels[-1]:
                continue
            if levels:
                times.append(a)
            levels.append(lv)
        return SwitchingStructure(tuple(times), tuple(levels), self.sys.T, near_tangent)

    def residual(self, p0, xi, structure=None):
        s = structure if structure is not None else self.structure(p0)
        F = [self.integral(t) for t in s.edges]
        r = np.array(xi, dtype=float)
        for lv, fa, fb in zip(s.levels, F, F[1:]):
            if lv:
                r = r + lv * (fb - fa)
        return r

    def singular_fraction(self, p0):
        return float(np.mean(np.abs(np.abs(self.kernel @ p0) - 1.0) < SINGULAR_BAND))


_CACHE = {}


def _extremals(sys, N_quad):
    key = (hash(sys), int(N_quad))
    ex = _CACHE.get(key)
    if ex is None or ex.sys != sys:
        if len(_CACHE) > 16:
            _CACHE.clear()
        ex = _CACHE[key] = _Extremals(sys, N_quad)
    return ex


def switching_structure(sys, seed, N_quad=200):
    return _extremals(sys, N_quad).structure(_p0(seed))


def shoot_residual(sys, seed, xi, N_quad=200):
    """``xi + int_0^T e^{-As} B u(s) ds`` for the extremal of ``seed``.

    Zero exactly when the extremal steers ``xi`` to the origin at ``T``.
    Switching times are found as sign changes on a ``10 * N_quad`` scan
    grid and refined by bracketing to ``1e-10``.
    """
    return _extremals(sys, N_quad).residual(_p0(seed), np.asarray(xi, dtype=float).ravel())


def _random_seeds(sys, n_starts, rng):
    bnorm = np.linalg.norm(sys.B)
    dirs = rng.standard_normal((n_starts, sys.n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = rng.uniform(1.0, 4.0, size=n_starts) / bnorm
    return list(dirs * radii[:, None])


def shoot_solve(sys, xi, initial_seeds=None, *, n_starts=20, seed=0, N_quad=200,
                lp_seed=True, lp_cells=None, force=False, tol=SHOOT_TOL,
                zero_tol=ZERO_TOL):
    """Find a costate whose dead-zone extremal steers ``xi`` to the origin.

    Seeds are tried in order: ``initial_seeds``, the dual estimate of an LP
    on ``lp_cells`` cells (when ``lp_seed``), then ``n_starts`` random
    points drawn with ``seed``.  Each start runs Nelder-Mead on the squared
    residual norm followed by a finite-difference root polish; the first
    start reaching ``tol`` wins.  Failure is reported as status "failed".
    """
    check = sys.assumption1
    if not check.normal:
        if not force:
            raise NotNormalError(
                "shooting needs Assumption 1 (controllable, nonsingular A): "
                + "; ".join(check.reasons()))
        warnings.warn("system is not normal; extremals may be non-unique "
                      "(singular intervals)", RuntimeWarning, stacklevel=2)
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.size != sys.n:
        raise ValueError(f"xi must have {sys.n} entries")
    ex = _extremals(sys, N_quad)

    seeds = [_p0(s) for s in (initial_seeds or [])]
    if lp_seed:
        cells = lp_cells or 10 * ex.N_quad
        lp = solve_lp(transcribe(sys, xi, cells))
        if lp.feasible and np.all(np.isfinite(lp.costate)):
            seeds.append(lp.costate)
    if not np.any(xi):
        seeds.insert(0, np.zeros(sys.n))
    seeds.extend(_random_seeds(sys, n_starts, np.random.default_rng(seed)))

    def fun(p):
        return ex.residual(p, xi)

    def obj(p):
        r = fun(p)
        return float(r @ r)

    best = None
    evaluations = 0
    for k, p_init in enumerate(seeds):
        p = np.array(p_init, dtype=float)
        r = fun(p)
        if np.linalg.norm(r) > tol:
            nm = minimize(obj, p, method="Nelder-Mead",
                          options={"xatol": 1e-12, "fatol": 1e-24,
                                   "maxiter": 300 * sys.n, "maxfev": 600 * sys.n})
            evaluations += nm.nfev
            p = nm.x
            r = fun(p)
            if np.linalg.norm(r) > tol:
                pol = root(fun, p, method="hybr", options={"xtol": 1e-14})
                evaluations += pol.nfev
                if np.all(np.isfinite(pol.x)) and np.linalg.norm(fun(pol.x)) < np.linalg.norm(r):
                    p = pol.x
                    r = fun(p)
        norm = float(np.linalg.norm(r))
        if best is None or norm < best[1]:
            best = (p, norm, k)
        if norm <= tol:
            break

    p, norm, k = best
    structure = ex.structure(p)
    info = {
        "start": k,
        "starts_tried": min(len(seeds), k + 1) if norm <= tol else len(seeds),
        "evaluations": evaluations,
        "singular_fraction": ex.singular_fraction(p),
        "near_tangent": structure.near_tangent,
    }
    if norm > tol:
        return SolveResult("failed", "shoot", None, np.nan, np.nan, 0, norm,
                           costate=p, switching=structure, info=info)
    return SolveResult(
        "solved", "shoot", structure.sample(ex.N_quad * 10),
        value=structure.l1(),
        value_l0=structure.l0(),
        fractional_cells=0,
        residual=norm,
        costate=p,
        switching=structure,
        info=info,
    )
