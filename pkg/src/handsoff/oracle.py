"""Closed forms for the scalar plant ``dx/dt = a x + b u`` with ``a > 0``.

The reachable set is ``[-x1, x1]`` with ``x1 = (1 - e^{-aT}) |b| / a``.  The
sparse-optimal control pushes at full magnitude from time 0 until the state
can coast to the origin, so its support length ``tau`` is also the optimal
value.
"""
from dataclasses import dataclass
import math

from .shooting import SwitchingStructure

__all__ = [
    "Oracle1dParams",
    "OutOfReachError",
    "oracle1d_reach",
    "oracle1d_value",
    "oracle1d_control",
]


class OutOfReachError(ValueError):
    """The initial state lies outside the reachable set."""


@dataclass(frozen=True)
class Oracle1dParams:
    a: float
    b: float
    T: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"a must be > 0, got {self.a}")
        if not (math.isfinite(self.b) and self.b != 0):
            raise ValueError(f"b must be nonzero, got {self.b}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"T must be > 0, got {self.T}")

    def system(self):
        from .model import LtiSystem
        return LtiSystem([[self.a]], [[self.b]], self.T)


def oracle1d_reach(params):
    """Half-width ``x1`` of the reachable interval."""
    a, b, T = params.a, params.b, params.T
    return -math.expm1(-a * T) * abs(b) / a


def _check(params, xi):
    x1 = oracle1d_reach(params)
    if abs(xi) > x1:
        raise OutOfReachError(f"|xi| = {abs(xi)} exceeds x1 = {x1}")
    return x1


def oracle1d_value(params, xi):
    """Optimal L0 (= L1) cost from ``xi``; exactly ``T`` at ``xi = +-x1``."""
    xi = float(xi)
    x1 = _check(params, xi)
    if xi == 0.0:
        return 0.0
    if abs(xi) == x1:
        return float(params.T)
    a = params.a
    return -math.log1p(-a * abs(xi) / abs(params.b)) / a


def oracle1d_control(params, xi):
    """Full push of level ``-sgn(b) sgn(xi)`` on ``[0, tau)``, then off."""
    xi = float(xi)
    tau = oracle1d_value(params, xi)
    if xi == 0.0:
        return SwitchingStructure((), (0.0,), params.T)
    level = -math.copysign(1.0, params.b) * math.copysign(1.0, xi)
    if tau >= params.T:
        return SwitchingStructure((), (level,), params.T)
    return SwitchingStructure((tau,), (level, 0.0), params.T)
