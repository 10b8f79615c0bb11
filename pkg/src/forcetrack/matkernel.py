"""Dense real-matrix kernel.

Only the handful of operations the estimator needs: matrix exponential,
pseudo-inverse of tall full-column-rank matrices, inverse of small SPD
matrices and a PSD diagnostic. Everything works on 2-D ``float64`` numpy
arrays; nothing is modified in place.
"""
from typing import NamedTuple

import numpy as np
import scipy.linalg as la

from .errors import DefinitenessError, DimensionError, RankError

EPS = np.finfo(float).eps

# Higham (2005) backward-error bounds for the [m/m] Pade approximants.
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0,
        1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0),
}


class PSDReport(NamedTuple):
    is_psd: bool
    min_eigenvalue: float

    def __bool__(self):
        return self.is_psd


def as_matrix(M, name="matrix"):
    """Return `M` as a read-only 2-D float array, rejecting NaN/Inf.

    Scalars become 1x1 and 1-D input becomes a column.
    """
    a = np.array(M, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    elif a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise DimensionError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def _require_square(M, name="matrix"):
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")


def symmetrize(M):
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def _pade(A, m):
    b = _PADE[m]
    n = A.shape[0]
    ident = np.eye(n)
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A4 @ A2
        U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
                 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
        V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
             + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    else:
        powers = [ident, A2]
        while len(powers) < (m + 1) // 2:
            powers.append(powers[-1] @ A2)
        U = A @ sum(b[2 * j + 1] * P for j, P in enumerate(powers))
        V = sum(b[2 * j] * P for j, P in enumerate(powers))
    return np.linalg.solve(V - U, V + U)


def mat_exp(M):
    """Matrix exponential by scaling and squaring with Pade approximants.

    Follows Higham, "The scaling and squaring method for the matrix
    exponential revisited" (SIAM J. Matrix Anal. Appl. 26, 2005): the lowest
    Pade degree whose backward-error bound covers ``||M||_1`` is used, and
    degree 13 with ``2**s`` scaling otherwise.

    Parameters
    ----------
    M : array_like, shape (n, n)

    Returns
    -------
    ndarray, shape (n, n)
    """
    A = as_matrix(M, "M")
    _require_square(A, "M")
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    if norm == 0.0:
        return np.eye(n)
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            return _pade(A, m)
    s = max(0, int(np.ceil(np.log2(norm / _THETA[13]))))
    X = _pade(A / 2.0**s, 13)
    for _ in range(s):
        X = X @ X
    return X


def pinv(M):
    """Moore-Penrose inverse ``(M^T M)^{-1} M^T`` of a full-column-rank matrix.

    Raises
    ------
    RankError
        If the smallest singular value of ``M^T M`` is below
        ``1e3 * eps * ||M^T M||_2``.
    """
    B = as_matrix(M, "M")
    G = B.T @ B
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[-1] <= 1e3 * EPS * sv[0]:
        raise RankError(
            f"matrix of shape {B.shape} is not of full column rank "
            f"(smallest singular value of M^T M is {sv[-1]:.3e})")
    return np.linalg.solve(G, B.T)


def spd_inverse(M, tol=1e-10):
    """Inverse of a symmetric positive definite matrix via Cholesky."""
    S = as_matrix(M, "M")
    _require_square(S, "M")
    scale = np.linalg.norm(S)
    if np.linalg.norm(S - S.T) > tol * scale:
        raise DefinitenessError("matrix is not symmetric")
    try:
        c = la.cho_factor(symmetrize(S), lower=True)
    except la.LinAlgError as exc:
        raise DefinitenessError("matrix is not positive definite") from exc
    return symmetrize(la.cho_solve(c, np.eye(S.shape[0])))


def psd_check(M, tol=1e-12):
    """Report whether `M` is positive semi-definite up to ``tol * ||M||_2``.

    Returns a :class:`PSDReport`, which is truthy when the check passes.
    """
    S = as_matrix(M, "M")
    _require_square(S, "M")
    eig = np.linalg.eigvalsh(symmetrize(S))
    scale = np.max(np.abs(eig))
    lo = float(eig[0])
    return PSDReport(bool(lo >= -tol * scale), lo)


def is_positive_definite(M):
    S = as_matrix(M, "M")
    if S.shape[0] != S.shape[1] or not np.allclose(S, S.T, rtol=1e-10, atol=0):
        return False
    try:
        np.linalg.cholesky(symmetrize(S))
    except np.linalg.LinAlgError:
        return False
    return True


def column_rank(M, rtol=None):
    """Numerical column rank using the same tolerance rule as :func:`pinv`."""
    B = as_matrix(M, "M")
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    if rtol is None:
        # pinv tests sigma(B^T B) = sigma(B)**2 against 1e3*eps.
        rtol = np.sqrt(1e3 * EPS)
    return int(np.sum(sv > rtol * sv[0]))
