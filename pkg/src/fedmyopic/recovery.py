"""Community recovery from a consensus graph.

The semidefinite program ``max <W, Y>`` s.t. ``Y_ii = 1, Y psd`` is solved in
factored form ``Y = V V^T`` by cyclic exact row maximization (the "mixing
method"). Optimality of the rounded labels is then checked with the dual
certificate ``Lambda - W``, whose second eigenvalue being positive proves that
``y y^T`` is the unique optimum.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, InputError
from .rng import SDP_INIT, stream
from .signed_graph import connected_components
from .spectral import as_symmetric, eig_sym, lambda2

CERT_TOL = 1e-8
# a looser 1e-9 lets degenerate instances halt ~1e-6 below the optimum
SDP_TOL = 1e-12
BRUTE_FORCE_CAP = 16


def _consensus_matrix(W):
    A = as_symmetric(W, "consensus weights")
    if np.any(np.diag(A) != 0):
        raise InputError("consensus weights must have a zero diagonal")
    return A


def default_rank(n):
    return math.ceil(math.sqrt(2 * n)) + 1


@dataclass
class SdpSolution:
    factor: np.ndarray
    objective: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)

    @property
    def Y(self):
        return self.factor @ self.factor.T


def _objective(W, V):
    return float(np.sum(W * (V @ V.T)))


def solve_sdp(W, rank=None, max_iter=1000, tol=SDP_TOL, seed=0):
    """Approximately solve the diagonal-constrained SDP in factored form.

    Rows of the ``n x rank`` factor start as random unit vectors drawn from
    the ``(seed, SDP_INIT)`` stream and are swept in order ``0..n-1``; each
    row is replaced by its normalized gradient ``sum_j W_ij v_j``, the exact
    maximizer of the objective over that row. A row with a vanishing gradient
    is left as is. Iteration stops once a sweep improves the objective by
    less than ``tol * max(1, |objective|)``.
    """
    W = _consensus_matrix(W)
    n = W.shape[0]
    rank = default_rank(n) if rank is None else int(rank)
    if rank < 2:
        raise InputError(f"rank must be at least 2, got {rank}")

    V = stream(seed, SDP_INIT).standard_normal((n, rank))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    obj = _objective(W, V)
    history = [obj]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        for i in range(n):
            g = W[i] @ V
            norm = math.sqrt(float(g @ g))
            if norm >= 1e-12:
                V[i] = g / norm
        new = _objective(W, V)
        history.append(new)
        gain = new - obj
        obj = new
        if gain < tol * max(1.0, abs(obj)):
            converged = True
            break
    return SdpSolution(factor=V, objective=obj, iterations=it, converged=converged, history=history)


def round_solution(sol):
    """Signs of the dominant left singular vector of the factor.

    Oriented so the first nonzero entry is positive; exact zeros map to +1.
    """
    V = sol.factor if isinstance(sol, SdpSolution) else np.asarray(sol, dtype=float)
    G = V.T @ V
    _, vecs = eig_sym(0.5 * (G + G.T))
    u = V @ vecs[:, -1]
    scale = np.abs(u).max(initial=0.0)
    u = np.where(np.abs(u) <= 1e-12 * scale, 0.0, u)
    nz = np.flatnonzero(u)
    if nz.size and u[nz[0]] < 0:
        u = -u
    return np.where(u >= 0, 1, -1).astype(np.int64)


def _check_labels(labels, n=None):
    y = np.asarray(labels)
    if y.ndim != 1 or not np.all(np.abs(y) == 1):
        raise InputError("labels must be a vector of +1/-1")
    if n is not None and y.shape[0] != n:
        raise InputError(f"labels have length {y.shape[0]}, expected {n}")
    return y.astype(float)


class Certificate(NamedTuple):
    lambda2: float
    certified: bool


def certificate_matrix(W, labels):
    """``Lambda - W`` with ``Lambda_ii = sum_j W_ij y_i y_j``."""
    W = _consensus_matrix(W)
    y = _check_labels(labels, W.shape[0])
    return np.diag(y * (W @ y)) - W


def dual_certificate(W, labels, tol=CERT_TOL):
    """Second eigenvalue of ``Lambda - W`` and whether it clears ``tol``.

    ``labels`` is always in the kernel of ``Lambda - W``; a strictly positive
    second eigenvalue therefore certifies ``y y^T`` as the unique SDP optimum.
    """
    M = certificate_matrix(W, labels)
    y = _check_labels(labels)
    resid = np.abs(M @ y).max(initial=0.0)
    if resid > 1e-8 * max(1.0, float(np.abs(M).max(initial=0.0))):
        raise ArithmeticError(f"labels are not in the kernel of the certificate (residual {resid:g})")
    lam = lambda2(M)
    return Certificate(lam, lam > tol)


def brute_force_opt(W, cap=BRUTE_FORCE_CAP):
    """Exhaustive ``argmax y^T W y`` over ``y`` in ``{+1,-1}^n`` with ``y_0 = +1``.

    Candidates are scanned in lexicographic order (+1 before -1); the first
    maximizer wins.
    """
    W = _consensus_matrix(W)
    n = W.shape[0]
    if n > cap:
        raise CapacityError(f"brute force over 2^{n - 1} sign vectors exceeds cap n={cap}")
    if n <= 1:
        return np.ones(n, dtype=np.int64), 0.0
    shifts = np.arange(n - 2, -1, -1, dtype=np.int64)
    best_val, best_y = -np.inf, None
    total = 1 << (n - 1)
    for start in range(0, total, 1 << 14):
        codes = np.arange(start, min(start + (1 << 14), total), dtype=np.int64)
        bits = (codes[:, None] >> shifts) & 1
        Y = np.column_stack([np.ones(len(codes)), 1.0 - 2.0 * bits])
        vals = np.einsum("ij,ij->i", Y @ W, Y)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_y = float(vals[k]), Y[k]
    return best_y.astype(np.int64), best_val


@dataclass
class GreedyResult:
    labels: np.ndarray | None
    conflict: tuple | None = None

    @property
    def consistent(self):
        return self.conflict is None


def greedy_recover(W):
    """Propagate labels breadth-first from node 0 along nonzero edges.

    A positive edge copies the label, a negative edge flips it. The first edge
    whose endpoints disagree with its sign is returned as ``conflict``.
    """
    W = _consensus_matrix(W)
    n = W.shape[0]
    comps = connected_components(W != 0)
    if len(comps) > 1:
        raise InputError(f"graph support is disconnected; components: {comps}")
    labels = np.zeros(n, dtype=np.int64)
    labels[0] = 1
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(W[u]):
            want = labels[u] * (1 if W[u, v] > 0 else -1)
            if labels[v] == 0:
                labels[v] = want
                queue.append(int(v))
            elif labels[v] != want:
                return GreedyResult(labels=None, conflict=(min(u, int(v)), max(u, int(v)), float(W[u, v])))
    return GreedyResult(labels=labels)


def exact_recovery_check(labels, truth):
    """True iff ``labels`` equals ``truth`` up to a global sign flip."""
    y = np.asarray(labels)
    t = np.asarray(truth)
    if y.shape != t.shape:
        raise InputError(f"length mismatch: {y.shape} vs {t.shape}")
    return bool(np.array_equal(y, t) or np.array_equal(y, -t))


@dataclass
class RecoveryResult:
    labels: np.ndarray
    objective: float
    certificate_lambda2: float
    certified: bool
    iterations: int = 0
    converged: bool = True

    def to_dict(self):
        return {
            "labels": self.labels.tolist(),
            "objective": self.objective,
            "lambda2": self.certificate_lambda2,
            "certified": self.certified,
        }


def recover(W, seed=0, rank=None, max_iter=1000, tol=SDP_TOL, cert_tol=CERT_TOL):
    """Solve, round and certify."""
    sol = solve_sdp(W, rank=rank, max_iter=max_iter, tol=tol, seed=seed)
    labels = round_solution(sol)
    cert = dual_certificate(W, labels, tol=cert_tol)
    return RecoveryResult(labels=labels, objective=sol.objective,
                          certificate_lambda2=cert.lambda2, certified=cert.certified,
                          iterations=sol.iterations, converged=sol.converged)
