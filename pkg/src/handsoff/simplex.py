"""Bounded-variable primal simplex for  min c'x  s.t.  A x = b,  0 <= x <= u.

Written for the shape of the minimum-fuel transcription: a handful of
equality rows and thousands of box-constrained columns.  The basis is
refactored from scratch every iteration (it is at most a few rows wide),
which keeps the iterates clean without any update bookkeeping.

Pricing is Dantzig's rule.  Because a nonbasic variable that runs into its
own opposite bound leaves the basis untouched, consecutive bound flips are
applied as one batch: candidates are walked in pricing order and flipped
for as long as the basic variables stay within their bounds.  After a run
of degenerate pivots the entering/leaving choice falls back to Bland's
rule, which cannot cycle.
"""
from dataclasses import dataclass

import numpy as np

__all__ = ["LpSolution", "SolverError", "simplex", "dual_simplex", "crash_basis",
           "farkas_gap"]

FEASTOL = 1e-9
OPTTOL = 1e-9
PIVTOL = 1e-11
BLAND_AFTER = 50


class SolverError(RuntimeError):
    """Iteration limit hit; ``best_value`` is the last feasible objective or None."""

    def __init__(self, message, best_value=None, iterations=0):
        super().__init__(message)
        self.best_value = best_value
        self.iterations = iterations


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray
    objective: float
    duals: np.ndarray
    iterations: int
    basis: np.ndarray
    certificate: np.ndarray | None = None


class _Simplex:
    def __init__(self, A, b, upper, basis, at_upper, opttol, max_iter):
        self.A = A
        self.b = b
        self.upper = upper
        self.basis = basis
        self.at_upper = at_upper
        self.opttol = opttol
        self.max_iter = max_iter
        self.iterations = 0
        m, nv = A.shape
        self.is_basic = np.zeros(nv, dtype=bool)
        self.is_basic[basis] = True

    def nonbasic_x(self):
        x = np.where(self.at_upper, self.upper, 0.0)
        x[self.is_basic] = 0.0
        return x

    def primal(self):
        xN = self.nonbasic_x()
        Bm = self.A[:, self.basis]
        xB = np.linalg.solve(Bm, self.b - self.A @ xN)
        x = xN
        x[self.basis] = xB
        return x, xB

    def run(self, cost):
        A, upper = self.A, self.upper
        degenerate = 0
        while True:
            if self.iterations >= self.max_iter:
                raise SolverError(
                    f"simplex iteration limit ({self.max_iter}) exceeded",
                    best_value=None, iterations=self.iterations)
            self.iterations += 1
            Bm = A[:, self.basis]
            x, xB = self.primal()
            y = np.linalg.solve(Bm.T, cost[self.basis])
            d = cost - A.T @ y

            movable = (~self.is_basic) & (upper > 0)
            inc = movable & ~self.at_upper & (d < -self.opttol)
            dec = movable & self.at_upper & (d > self.opttol)
            cand = np.flatnonzero(inc | dec)
            if cand.size == 0:
                return x, y

            bland = degenerate >= BLAND_AFTER
            if bland:
                order = cand[:1]
            else:
                order = cand[np.argsort(-np.abs(d[cand]), kind="stable")]

            W = np.linalg.solve(Bm, A[:, order])
            sgn = np.where(self.at_upper[order], -1.0, 1.0)
            rng = upper[order]
            lo_B = np.zeros(len(self.basis))
            up_B = upper[self.basis]

            # batch of pure bound flips in pricing order
            nflip = 0
            if not bland:
                finite = np.isfinite(rng)
                stop = np.argmin(finite) if not finite.all() else order.size
                if stop > 0:
                    steps = -(W[:, :stop] * (sgn[:stop] * rng[:stop]))
                    cum = xB[:, None] + np.cumsum(steps, axis=1)
                    ok = np.all((cum >= lo_B[:, None] - FEASTOL)
                                & (cum <= up_B[:, None] + FEASTOL), axis=0)
                    nflip = int(np.argmin(ok)) if not ok.all() else stop
                if nflip > 0:
                    flipped = order[:nflip]
                    self.at_upper[flipped] = ~self.at_upper[flipped]
                    degenerate = 0
                    if nflip == order.size:
                        continue
                    xB = cum[:, nflip - 1]

            k = nflip
            j = order[k]
            w = W[:, k] * sgn[k]
            theta = rng[k]
            leave = -1
            leave_to_upper = False
            pos = w > PIVTOL
            neg = w < -PIVTOL
            ratios = np.full(w.size, np.inf)
            ratios[pos] = (xB[pos] - lo_B[pos]) / w[pos]
            ratios[neg] = (up_B[neg] - xB[neg]) / -w[neg]
            ratios = np.maximum(ratios, 0.0)
            rmin = ratios.min() if ratios.size else np.inf
            if rmin < theta:
                ties = np.flatnonzero(ratios <= rmin + 1e-12)
                if bland:
                    leave = ties[np.argmin(self.basis[ties])]
                else:
                    leave = ties[np.argmax(np.abs(w[ties]))]
                theta = ratios[leave]
                leave_to_upper = bool(neg[leave])
            if not np.isfinite(theta):
                return None, y

            degenerate = degenerate + 1 if theta <= 1e-13 else 0
            if leave < 0:
                self.at_upper[j] = ~self.at_upper[j]
                continue
            out = self.basis[leave]
            self.is_basic[out] = False
            self.at_upper[out] = leave_to_upper
            self.basis[leave] = j
            self.is_basic[j] = True
            self.at_upper[j] = False

    def drive_out(self, artificial):
        """Pivot zero-level artificials out of the basis where a pivot exists."""
        m = len(self.basis)
        for r in range(m):
            if not artificial[self.basis[r]]:
                continue
            Bm = self.A[:, self.basis]
            row = np.linalg.solve(Bm.T, np.eye(m)[r]) @ self.A
            ok = (~self.is_basic) & (~artificial) & (np.abs(row) > 1e-9)
            cols = np.flatnonzero(ok)
            if cols.size == 0:
                continue
            j = cols[np.argmax(np.abs(row[cols]))]
            out = self.basis[r]
            self.is_basic[out] = False
            self.at_upper[out] = False
            self.basis[r] = j
            self.is_basic[j] = True
            self.at_upper[j] = False


def simplex(c, A, b, upper, *, at_upper=None, feastol=FEASTOL, opttol=OPTTOL,
            max_iter=50_000):
    """Solve ``min c'x  s.t.  A x = b, 0 <= x <= upper`` (upper may be inf).

    Returns an :class:`LpSolution` holding a basic solution.  Infeasibility
    is a status, decided by a phase-1 residual above ``feastol``; running
    out of iterations raises :class:`SolverError`.  ``duals`` are the
    equality multipliers ``y`` with reduced costs ``c - A'y``.

    ``at_upper`` optionally marks variables that start at their (finite)
    upper bound; phase 1 then only has to repair the remaining residual.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    m, nv = A.shape
    if c.shape != (nv,) or upper.shape != (nv,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")
    if np.any(upper < 0):
        raise ValueError("upper bounds must be nonnegative")

    start = np.zeros(nv + m, dtype=bool)
    if at_upper is not None:
        start[:nv] = np.asarray(at_upper, dtype=bool) & np.isfinite(upper)
    resid0 = b - A @ np.where(start[:nv], upper, 0.0)
    flip = np.where(resid0 < 0, -1.0, 1.0)
    Af = np.hstack([A * flip[:, None], np.eye(m)])
    bf = b * flip
    up = np.concatenate([upper, np.full(m, np.inf)])
    artificial = np.zeros(nv + m, dtype=bool)
    artificial[nv:] = True

    solver = _Simplex(Af, bf, up, np.arange(nv, nv + m), start, opttol, max_iter)
    x, _ = solver.run(artificial.astype(float))
    infeasibility = float(np.abs(A @ x[:nv] - b).max()) if m else 0.0
    if infeasibility > feastol:
        return LpSolution("infeasible", x[:nv], np.nan, np.full(m, np.nan),
                          solver.iterations, solver.basis.copy())

    solver.upper = up.copy()
    solver.upper[nv:] = 0.0
    solver.drive_out(artificial)
    cost = np.concatenate([c, np.zeros(m)])
    try:
        x, y = solver.run(cost)
    except SolverError as exc:
        xcur, _ = solver.primal()
        exc.best_value = float(c @ xcur[:nv])
        raise
    if x is None:
        return LpSolution("unbounded", np.full(nv, np.nan), -np.inf,
                          y * flip, solver.iterations, solver.basis.copy())
    x = x[:nv]
    np.clip(x, 0.0, upper, out=x)
    return LpSolution("optimal", x, float(c @ x), y * flip,
                      solver.iterations, solver.basis.copy())


def crash_basis(A, score):
    """Greedy basis: columns in increasing ``score`` order, kept while they
    raise the rank.  Returns None if A has deficient row rank."""
    m = A.shape[0]
    chosen = []
    Q = np.zeros((m, 0))
    for j in np.argsort(score, kind="stable"):
        col = A[:, j]
        nrm = np.linalg.norm(col)
        if nrm == 0.0:
            continue
        r = col - Q @ (Q.T @ col)
        if np.linalg.norm(r) > 1e-8 * nrm:
            Q = np.hstack([Q, (r / np.linalg.norm(r))[:, None]])
            chosen.append(j)
            if len(chosen) == m:
                return np.array(chosen)
    return None


def dual_simplex(c, A, b, upper, basis, *, feastol=FEASTOL, opttol=OPTTOL,
                 max_iter=5_000):
    """Bounded dual simplex from a given starting basis.

    All ``upper`` bounds must be finite, so every basis is made dual
    feasible by parking each nonbasic variable at the bound its reduced
    cost prefers.  The ratio test is the long-step variant: breakpoints are
    passed (their variables flip bounds) while the leaving row's primal
    infeasibility still outweighs the flips.

    Returns an :class:`LpSolution`; ``status`` is "infeasible" when the dual
    ray is unbounded.  Raises :class:`SolverError` at the iteration limit.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    m, nv = A.shape
    if not np.all(np.isfinite(upper)):
        raise ValueError("dual_simplex needs finite upper bounds")
    basis = np.array(basis, dtype=int)
    is_basic = np.zeros(nv, dtype=bool)
    is_basic[basis] = True
    at_upper = np.zeros(nv, dtype=bool)
    it = 0
    while True:
        if it >= max_iter:
            raise SolverError(f"dual simplex iteration limit ({max_iter}) exceeded",
                              iterations=it)
        it += 1
        Bm = A[:, basis]
        y = np.linalg.solve(Bm.T, c[basis])
        d = c - A.T @ y
        d[is_basic] = 0.0
        # undecided (near-zero) reduced costs keep their last bound
        decided = np.abs(d) > opttol
        at_upper = np.where(decided, d < 0, at_upper)
        at_upper[is_basic] = False

        xN = np.where(at_upper, upper, 0.0)
        xB = np.linalg.solve(Bm, b - A @ xN)
        uB = upper[basis]
        viol = np.maximum(-xB, xB - uB)
        r = int(np.argmax(viol))
        if viol[r] <= feastol:
            x = xN
            x[basis] = np.clip(xB, 0.0, uB)
            return LpSolution("optimal", x, float(c @ x), y, it, basis.copy())

        below = xB[r] < 0.0
        delta = -xB[r] if below else xB[r] - uB[r]
        rho = np.linalg.solve(Bm.T, np.eye(m)[r])
        alpha = rho @ A
        # nonbasic moves that push x_r back toward its violated bound
        direction = np.where(at_upper, -1.0, 1.0) * alpha
        want = direction < -PIVTOL if below else direction > PIVTOL
        cand = np.flatnonzero(want & ~is_basic & (upper > 0))
        if cand.size == 0:
            return LpSolution("infeasible", xN, np.nan, np.full(m, np.nan),
                              it, basis.copy(), certificate=rho)
        ratios = np.abs(d[cand]) / np.abs(alpha[cand])
        order = cand[np.argsort(ratios, kind="stable")]
        drops = np.abs(alpha[order]) * upper[order]
        slope = delta - np.cumsum(drops)
        if slope[-1] > feastol:
            # even with every candidate at its best bound the row stays violated
            return LpSolution("infeasible", xN, np.nan, np.full(m, np.nan),
                              it, basis.copy(), certificate=rho)
        k = int(np.argmax(slope <= feastol))
        j = order[k]
        passed = order[:k]
        at_upper[passed] = ~at_upper[passed]

        out = basis[r]
        is_basic[out] = False
        at_upper[out] = not below
        basis[r] = j
        is_basic[j] = True
        at_upper[j] = False


def farkas_gap(A, b, upper, rho):
    """Distance of ``rho'b`` outside the range of ``rho'Ax`` over the box.

    A positive gap larger than ``feastol * ||rho||_1`` proves that no
    ``0 <= x <= upper`` has ``||Ax - b||_inf <= feastol``.
    """
    w = rho @ A
    lo = float(np.sum(np.minimum(w, 0.0) * upper))
    hi = float(np.sum(np.maximum(w, 0.0) * upper))
    target = float(rho @ b)
    return max(lo - target, target - hi) / max(np.abs(rho).sum(), 1e-300)
