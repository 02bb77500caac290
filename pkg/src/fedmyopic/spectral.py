"""Dense symmetric linear algebra used throughout the package.

Everything here works on plain ``numpy`` arrays; graph objects are accepted
wherever they expose a ``weights`` attribute.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError

OFF_TOL = 1e-12
MAX_SWEEPS = 100


def as_symmetric(M, name="matrix", tol=0.0):
    """Validate ``M`` as a finite square symmetric array and return a float copy."""
    A = np.array(getattr(M, "weights", M), dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if np.abs(A - A.T).max(initial=0.0) > tol * scale:
        raise InputError(f"{name} is not symmetric")
    return A


def eig_sym(M, off_tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Args:
        M: symmetric ``n x n`` array (or graph-like object with ``weights``).
        off_tol: stop once the off-diagonal Frobenius norm falls below
            ``off_tol * ||M||_F``.
        max_sweeps: hard cap on full cyclic sweeps.

    Returns:
        ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
        eigenvectors as orthonormal columns in matching order.
    """
    A = as_symmetric(M)
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    if n == 0:
        return np.zeros(0), V
    target = off_tol * max(float(np.linalg.norm(A)), np.finfo(float).tiny)

    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app, aqq = A[p, p], A[q, q]
                # negligible against the diagonal: rotation would be a no-op
                if abs(apq) <= 1e-18 * (abs(app) + abs(aqq)):
                    A[p, q] = A[q, p] = 0.0
                    continue
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                colp = A[:, p].copy()
                colq = A[:, q]
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :]
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0

                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq

    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def eigvals_sym(M, **kw):
    return eig_sym(M, **kw)[0]


def laplacian(G):
    """``L = D - W`` where ``D`` holds the (signed) row sums of ``W``."""
    W = as_symmetric(G, "weights")
    return np.diag(W.sum(axis=1)) - W


def ones_complement_basis(n):
    """Orthonormal basis (columns) of the subspace orthogonal to the all-ones vector.

    Built from the Householder reflector that maps ``e_1`` onto ``1/sqrt(n)``;
    its remaining ``n - 1`` columns span the complement.
    """
    if n < 2:
        raise InputError("need n >= 2 for a nontrivial complement of 1")
    u = np.ones(n) / math.sqrt(n)
    u[0] -= 1.0
    H = np.eye(n) - 2.0 * np.outer(u, u) / float(u @ u)
    return H[:, 1:]


def lambda_one_perp(L, tol=1e-8):
    """Smallest eigenvalue of ``L`` restricted to the complement of ``1``.

    Computed as the minimum eigenvalue of ``Q^T L Q`` for an orthonormal basis
    ``Q`` of that complement, so it is correct even when ``0`` is not the
    smallest eigenvalue of ``L`` (signed graphs).
    """
    L = as_symmetric(L, "laplacian", tol=1e-12)
    scale = max(1.0, float(np.linalg.norm(L)))
    if np.abs(L.sum(axis=1)).max() > tol * scale:
        raise InputError("row sums of a Laplacian must vanish")
    Q = ones_complement_basis(L.shape[0])
    M = Q.T @ L @ Q
    return float(eigvals_sym(0.5 * (M + M.T))[0])


def lambda2(M):
    """Second-smallest eigenvalue."""
    w = eigvals_sym(M)
    if len(w) < 2:
        raise InputError("lambda2 needs at least a 2x2 matrix")
    return float(w[1])


def lambda_min(M):
    return float(eigvals_sym(M)[0])


def _check_vector(v, n):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise InputError(f"vector must have shape ({n},), got {v.shape}")
    vv = float(v @ v)
    if vv == 0.0:
        raise InputError("Rayleigh quotient of the zero vector is undefined")
    return v, vv


def rayleigh(L, v):
    """``v^T L v / v^T v``."""
    L = as_symmetric(L, "matrix", tol=1e-12)
    v, vv = _check_vector(v, L.shape[0])
    return float(v @ L @ v) / vv


def signed_rayleigh(G, v):
    """Rayleigh quotient of the Laplacian of ``G`` and its signed split.

    Returns ``(R, R_plus, R_minus)`` where the signed parts sum
    ``W_ij^{+/-} (v_i - v_j)^2`` over ``i < j``; ``R == R_plus + R_minus``.
    """
    W = as_symmetric(G, "weights")
    v, vv = _check_vector(v, W.shape[0])
    diff2 = (v[:, None] - v[None, :]) ** 2
    iu = np.triu_indices(W.shape[0], 1)
    d = diff2[iu]
    w = W[iu]
    r_plus = float(np.maximum(w, 0.0) @ d) / vv
    r_minus = float(np.minimum(w, 0.0) @ d) / vv
    return r_plus + r_minus, r_plus, r_minus
