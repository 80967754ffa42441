"""LTI plant, piecewise-constant controls and their norms.

Steering convention: ``x(T) = 0`` from ``x(0) = xi`` holds exactly when
``int_0^T e^{-As} B u(s) ds = -xi``.  :func:`terminal_map` returns the
left-hand side, so a control is admissible for ``xi`` when
``terminal_map(sys, u) + xi == 0``.
"""
from dataclasses import dataclass, field
from functools import cached_property
import hashlib
import json

import numpy as np

from .linalg import DimensionError, as_matrix, cell_integrals, kalman_rank

__all__ = [
    "LtiSystem",
    "ControlSignal",
    "Assumption1",
    "SystemFileError",
    "check_assumption1",
    "l1_norm",
    "l0_norm",
    "terminal_map",
    "load_system",
    "system_from_dict",
]

ZERO_TOL = 1e-8
DET_RTOL = 1e-12


class SystemFileError(ValueError):
    """A system description could not be parsed; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Assumption1:
    controllable: bool
    a_nonsingular: bool

    @property
    def normal(self):
        # sufficient condition for normality of the L1 problem
        return self.controllable and self.a_nonsingular

    def reasons(self):
        out = []
        if not self.a_nonsingular:
            out.append("A is singular")
        if not self.controllable:
            out.append("(A, B) is not controllable")
        return out

    def as_dict(self):
        return {
            "controllable": self.controllable,
            "a_nonsingular": self.a_nonsingular,
            "normal": self.normal,
        }


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """Single-input plant ``dx/dt = A x + B u`` on the horizon ``[0, T]``."""

    A: np.ndarray
    B: np.ndarray
    T: float
    assumption1: Assumption1 = field(init=False, repr=False)

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape != (n, 1):
            raise DimensionError(f"B must be a length-{n} column, got {B.shape}")
        T = float(self.T)
        if not (np.isfinite(T) and T > 0):
            raise ValueError(f"horizon T must be positive, got {self.T}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "assumption1", _assumption1(A, B))

    @property
    def n(self):
        return self.A.shape[0]

    def cell_matrix(self, N):
        """The n x N matrix of exact cell integrals on a uniform N-cell grid."""
        return _cell_matrix_cached(self, int(N))

    @cached_property
    def digest(self):
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def to_dict(self):
        return {"A": self.A.tolist(), "B": self.B[:, 0].tolist(), "T": self.T}

    def __eq__(self, other):
        if not isinstance(other, LtiSystem):
            return NotImplemented
        return (self.T == other.T and np.array_equal(self.A, other.A)
                and np.array_equal(self.B, other.B))

    def __hash__(self):
        return hash((self.A.tobytes(), self.B.tobytes(), self.T))


_CELL_CACHE = {}


def _cell_matrix_cached(sys, N):
    key = (sys.A.tobytes(), sys.B.tobytes(), sys.T, N)
    G = _CELL_CACHE.get(key)
    if G is None:
        if len(_CELL_CACHE) > 32:
            _CELL_CACHE.clear()
        G = cell_integrals(sys.A, sys.B, sys.T, N)
        G.setflags(write=False)
        _CELL_CACHE[key] = G
    return G


def _assumption1(A, B):
    n = A.shape[0]
    scale = max(np.abs(A).max(), 1.0) ** n
    det = np.linalg.det(A)
    return Assumption1(
        controllable=kalman_rank(A, B) == n,
        a_nonsingular=bool(abs(det) > DET_RTOL * scale),
    )


def check_assumption1(sys):
    """Controllability and nonsingularity of ``A`` (together: normality)."""
    return sys.assumption1


@dataclass(frozen=True, eq=False)
class ControlSignal:
    """Piecewise-constant control on N uniform cells of ``[0, T]``."""

    values: np.ndarray
    T: float

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size < 1:
            raise ValueError("a control needs at least one cell")
        if not np.all(np.isfinite(v)):
            raise ValueError("control values must be finite")
        if np.any(np.abs(v) > 1.0):
            raise ValueError("control values must lie in [-1, 1]")
        T = float(self.T)
        if not T > 0:
            raise ValueError("T must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "T", T)

    @property
    def cells(self):
        return self.values.size

    @property
    def dt(self):
        return self.T / self.values.size

    @property
    def grid(self):
        return np.linspace(0.0, self.T, self.cells + 1)

    @classmethod
    def zeros(cls, T, N):
        return cls(np.zeros(int(N)), T)

    @classmethod
    def from_function(cls, f, T, N):
        """Sample ``f`` at cell midpoints and clip to [-1, 1]."""
        dt = T / N
        mid = (np.arange(N) + 0.5) * dt
        return cls(np.clip([f(t) for t in mid], -1.0, 1.0), T)

    def __neg__(self):
        return ControlSignal(-self.values, self.T)

    def l1(self):
        return l1_norm(self)

    def l0(self, zero_tol=ZERO_TOL):
        return l0_norm(self, zero_tol)

    def linf(self):
        return float(np.abs(self.values).max())


def l1_norm(u):
    # T * (x / N) rather than x * dt: monotone in x and exactly T at x = N,
    # so l1 <= l0 <= T holds without rounding slop
    return float(u.T * (np.abs(u.values).sum() / u.values.size))


def l0_norm(u, zero_tol=ZERO_TOL):
    """Measure of the numerical support: ``dt * #{k : |u_k| > zero_tol}``."""
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    return float(u.T * (np.count_nonzero(np.abs(u.values) > zero_tol) / u.values.size))


def terminal_map(sys, u):
    """``sum_k G_k u_k`` with ``G_k`` the exact integral over cell k."""
    if abs(u.T - sys.T) > 1e-12 * sys.T:
        raise ValueError(f"control horizon {u.T} != system horizon {sys.T}")
    return sys.cell_matrix(u.cells) @ u.values


def system_from_dict(doc):
    for key in ("A", "B", "T"):
        if key not in doc:
            raise SystemFileError(key, "missing")
    try:
        A = np.array(doc["A"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SystemFileError("A", f"not a numeric matrix ({exc})") from None
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SystemFileError("A", f"must be a square row-major matrix, got shape {A.shape}")
    try:
        B = np.array(doc["B"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SystemFileError("B", f"not a numeric array ({exc})") from None
    if B.ndim == 0:
        B = B.reshape(1)
    if B.ndim != 1 or B.size != A.shape[0]:
        raise SystemFileError("B", f"must be a flat array of length {A.shape[0]}")
    T = doc["T"]
    if isinstance(T, bool) or not isinstance(T, (int, float)):
        raise SystemFileError("T", "must be a number")
    if not (np.all(np.isfinite(A))):
        raise SystemFileError("A", "non-finite entries")
    if not (np.all(np.isfinite(B))):
        raise SystemFileError("B", "non-finite entries")
    if not (np.isfinite(T) and T > 0):
        raise SystemFileError("T", "must be a positive finite number")
    return LtiSystem(A, B, T)


def load_system(path):
    """Read a JSON system file ``{"A": [[...]], "B": [...], "T": number}``."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SystemFileError("<document>", f"invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise SystemFileError("<document>", "top level must be an object")
    return system_from_dict(doc)
