"""Dense linear algebra kernels: matrix exponential, exact cell integrals of
the state-transition kernel, and the Kalman controllability rank.

Everything here works on small dense numpy arrays (n is expected to be at
most ~10) and is a pure function of its arguments.
"""
import numpy as np

__all__ = [
    "DimensionError",
    "InvalidIntervalError",
    "as_matrix",
    "expm",
    "cell_integral",
    "cell_integrals",
    "kalman_rank",
]

RANK_RTOL = 1e-9


class DimensionError(ValueError):
    """Raised when matrix shapes are inconsistent."""


class InvalidIntervalError(ValueError):
    """Raised for an empty or reversed time interval."""


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float array.

    1-D input is promoted to a column vector.
    """
    arr = np.array(M, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


# Pade coefficients and theta thresholds (1-norm) for degrees 3..13, from
# Higham's scaling-and-squaring analysis.
_PADE = {
    3: (1.495585217958292e-2, (120.0, 60.0, 12.0, 1.0)),
    5: (2.539398330063230e-1, (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0)),
    7: (9.504178996162932e-1,
        (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0)),
    9: (2.097847961257068e0,
        (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
         2162160.0, 110880.0, 3960.0, 90.0, 1.0)),
}
_THETA13 = 5.371920351148152
_B13 = (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
        16380.0, 182.0, 1.0)


def _pade_low(X, b):
    n = X.shape[0]
    ident = np.eye(n)
    X2 = X @ X
    powers = [ident, X2]
    for _ in range((len(b) - 1) // 2 - 1):
        powers.append(powers[-1] @ X2)
    odd = sum(b[2 * k + 1] * P for k, P in enumerate(powers))
    even = sum(b[2 * k] * P for k, P in enumerate(powers))
    return X @ odd, even


def _pade13(X):
    b = _B13
    ident = np.eye(X.shape[0])
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    U = X @ (X6 @ (b[13] * X6 + b[11] * X4 + b[9] * X2)
             + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * ident)
    V = (X6 @ (b[12] * X6 + b[10] * X4 + b[8] * X2)
         + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * ident)
    return U, V


def expm(M, t=1.0):
    """Matrix exponential ``exp(M t)`` by Pade scaling and squaring.

    The Pade degree is picked from the 1-norm of ``M t`` (3, 5, 7, 9 or 13);
    above the degree-13 threshold the argument is halved ``s`` times and the
    result squared back.

    >>> expm([[0.0]], 1.0)
    array([[1.]])
    """
    M = as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"expm needs a square matrix, got {M.shape}")
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    X = M * t
    norm = np.linalg.norm(X, 1)
    if norm == 0.0:
        return np.eye(X.shape[0])

    s = 0
    for deg in (3, 5, 7, 9):
        theta, b = _PADE[deg]
        if norm <= theta:
            U, V = _pade_low(X, b)
            break
    else:
        if norm > _THETA13:
            s = int(np.ceil(np.log2(norm / _THETA13)))
            X = X / 2.0**s
        U, V = _pade13(X)

    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E


def _check_pair(A, B):
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionError(f"A must be square, got {A.shape}")
    if B.shape != (n, 1):
        raise DimensionError(f"B must be {n}x1, got {B.shape}")
    return A, B


def _kernel_integral(A, B, tau):
    # top-right block of exp([[-A, B], [0, 0]] tau) = int_0^tau e^{-As} B ds
    n = A.shape[0]
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = -A
    aug[:n, n:] = B
    return expm(aug, tau)[:n, n:]


def cell_integral(A, B, t0, t1):
    """Exact ``int_{t0}^{t1} e^{-As} B ds`` as an n x 1 array.

    No quadrature: the integral is the off-diagonal block of an augmented
    exponential, shifted by ``e^{-A t0}``.
    """
    A, B = _check_pair(A, B)
    t0, t1 = float(t0), float(t1)
    if not t0 < t1:
        raise InvalidIntervalError(f"need t0 < t1, got [{t0}, {t1}]")
    G = _kernel_integral(A, B, t1 - t0)
    if t0 != 0.0:
        G = expm(-A, t0) @ G
    return G


def cell_integrals(A, B, T, N):
    """All N cell integrals of a uniform grid on [0, T], as an n x N array.

    Column k is ``cell_integral(A, B, k T/N, (k+1) T/N)``; each column gets
    its own exponential so no error accumulates along the grid.
    """
    A, B = _check_pair(A, B)
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    T = float(T)
    if not T > 0:
        raise InvalidIntervalError(f"horizon must be positive, got {T}")
    dt = T / N
    G0 = _kernel_integral(A, B, dt)
    n = A.shape[0]
    out = np.empty((n, N))
    out[:, 0] = G0[:, 0]
    if not np.any(A):
        out[:, 1:] = G0
        return out
    for k in range(1, N):
        out[:, k] = (expm(-A, k * dt) @ G0)[:, 0]
    return out


def kalman_rank(A, B, rtol=RANK_RTOL):
    """Rank of the controllability matrix ``[B, AB, ..., A^{n-1} B]``.

    Singular values below ``rtol`` times the largest one count as zero.
    """
    A, B = _check_pair(A, B)
    n = A.shape[0]
    cols = [B]
    for _ in range(n - 1):
        cols.append(A @ cols[-1])
    sv = np.linalg.svd(np.hstack(cols), compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))
