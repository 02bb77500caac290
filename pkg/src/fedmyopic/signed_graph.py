"""Signed weighted graphs and their exact edge-expansion quantities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError
from .spectral import lambda_min, lambda_one_perp, laplacian

ENUMERATION_CAP = 20
_CHUNK = 1 << 14


class SignedWeightedGraph:
    """Undirected graph on nodes ``0..n-1`` with real, possibly negative, weights.

    Stored as a dense symmetric matrix with zero diagonal. The array exposed by
    :attr:`weights` is read-only; derive new graphs instead of mutating.
    """

    __slots__ = ("_w",)

    def __init__(self, weights):
        W = np.array(weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise InputError(f"weight matrix must be square, got shape {W.shape}")
        if not np.all(np.isfinite(W)):
            raise InputError("weight matrix has non-finite entries")
        if np.any(np.diag(W) != 0):
            raise InputError("self loops are not allowed (nonzero diagonal)")
        if not np.array_equal(W, W.T):
            raise InputError("weight matrix is not symmetric")
        W.flags.writeable = False
        self._w = W

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((n, n)))

    @classmethod
    def from_edges(cls, n, edges):
        """Build from ``(i, j, w)`` triples; repeated pairs are an error."""
        W = np.zeros((n, n))
        seen = set()
        for i, j, w in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise InputError(f"self loop at node {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InputError(f"duplicate edge {key}")
            seen.add(key)
            W[i, j] = W[j, i] = float(w)
        return cls(W)

    @property
    def n(self):
        return self._w.shape[0]

    @property
    def weights(self):
        return self._w

    def edges(self):
        """Nonzero edges as ``(i, j, w)`` with ``i < j``, row-major order."""
        iu, ju = np.nonzero(np.triu(self._w, 1))
        return [(int(i), int(j), float(self._w[i, j])) for i, j in zip(iu, ju)]

    def scaled(self, c):
        return SignedWeightedGraph(c * self._w)

    def with_weight(self, i, j, w):
        W = self._w.copy()
        W[i, j] = W[j, i] = w
        return SignedWeightedGraph(W)

    def __eq__(self, other):
        if not isinstance(other, SignedWeightedGraph):
            return NotImplemented
        return np.array_equal(self._w, other._w)

    def __repr__(self):
        return f"SignedWeightedGraph(n={self.n}, edges={len(self.edges())})"

    # edge-list text format: "n <count>" header, then "i j w" per edge
    def to_edgelist(self):
        lines = [f"n {self.n}"]
        lines += [f"{i} {j} {format_weight(w)}" for i, j, w in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text):
        n = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise InputError(f"line {lineno}: expected header 'n <count>'")
                try:
                    n = int(parts[1])
                except ValueError:
                    raise InputError(f"line {lineno}: bad node count {parts[1]!r}") from None
                if n < 1:
                    raise InputError(f"line {lineno}: node count must be positive")
                continue
            if len(parts) != 3:
                raise InputError(f"line {lineno}: expected 'i j w', got {line!r}")
            try:
                edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
            except ValueError:
                raise InputError(f"line {lineno}: cannot parse {line!r}") from None
        if n is None:
            raise InputError("missing 'n <count>' header")
        try:
            return cls.from_edges(n, edges)
        except InputError as exc:
            raise InputError(f"edge list: {exc}") from None


def format_weight(w):
    w = float(w)
    return str(int(w)) if w.is_integer() else repr(w)


def _weights(G):
    return G.weights if isinstance(G, SignedWeightedGraph) else SignedWeightedGraph(G).weights


def _mask(S, n):
    idx = np.asarray(sorted(set(int(i) for i in S)), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise InputError(f"node set {sorted(S)} not within [0, {n})")
    if idx.size == 0 or idx.size == n:
        raise InputError("node set must be nonempty and proper")
    x = np.zeros(n)
    x[idx] = 1.0
    return x


def signed_parts(G):
    """Split into ``(W+, W-)`` with ``W+ = max(W, 0)`` and ``W- = min(W, 0)``."""
    W = _weights(G)
    return SignedWeightedGraph(np.maximum(W, 0.0)), SignedWeightedGraph(np.minimum(W, 0.0))


def degrees(G):
    """Signed node degrees ``(d_plus, d_minus, d)``."""
    W = _weights(G)
    d_plus = np.maximum(W, 0.0).sum(axis=1)
    d_minus = np.minimum(W, 0.0).sum(axis=1)
    return d_plus, d_minus, W.sum(axis=1)


def boundary_weight(G, S):
    """Boundary weights ``(w+, w-, w)`` summed over ``i in S``, ``j not in S``."""
    W = _weights(G)
    x = _mask(S, W.shape[0])
    cut = W[np.ix_(x > 0, x == 0)]
    return float(np.maximum(cut, 0).sum()), float(np.minimum(cut, 0).sum()), float(cut.sum())


def set_expansion(G, S):
    """``(phi_plus_S, phi_minus_S)``; ``phi_plus_S`` is 0 when ``d+(S) == 0``."""
    W = _weights(G)
    x = _mask(S, W.shape[0])
    w_plus, w_minus, _ = boundary_weight(G, S)
    d_plus_S = float(x @ np.maximum(W, 0.0).sum(axis=1))
    phi_plus = w_plus / d_plus_S if d_plus_S > 0 else 0.0
    return phi_plus, w_minus


@dataclass(frozen=True)
class ExpansionReport:
    phi_g: float
    positive_term: float
    negative_term: float
    argmin_positive: tuple
    argmin_negative: tuple
    d_plus_min: float
    exhaustive: bool = True

    def to_dict(self):
        return {
            "phi_g": self.phi_g,
            "positive_term": self.positive_term,
            "negative_term": self.negative_term,
            "argmin_positive": list(self.argmin_positive),
            "argmin_negative": list(self.argmin_negative),
            "d_plus_min": self.d_plus_min,
            "exhaustive": self.exhaustive,
        }


def _subset_chunks(n, chunk=_CHUNK):
    """Yield ``(masks, X)`` over all nonempty proper subsets of ``[n]``.

    ``X`` is the 0/1 membership matrix of the chunk, one row per subset.
    """
    bits = np.arange(n, dtype=np.int64)
    total = (1 << n) - 1
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        X = ((masks[:, None] >> bits) & 1).astype(float)
        yield masks, X


def _members(mask, n):
    return tuple(i for i in range(n) if (int(mask) >> i) & 1)


def connected_components(A):
    """Connected components of the support of ``A`` (list of sorted node lists)."""
    n = A.shape[0]
    seen = np.zeros(n, dtype=bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in np.nonzero(A[u])[0]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        comps.append(sorted(comp))
    return comps


def signed_edge_expansion(G, cap=ENUMERATION_CAP):
    """Exact signed weighted edge expansion by exhaustive subset enumeration.

    The positive term is ``0.5 * d+_min * min (phi+_S)^2`` over subsets with
    ``d+(S) <= d+(V)/2``; the negative term is ``2 * min phi-_S`` over all
    nonempty proper subsets.

    Above ``cap`` nodes the value is still returned when both terms are
    pinned exactly without search (positive support disconnected, no negative
    weights); otherwise :class:`CapacityError` is raised.
    """
    W = _weights(G)
    n = W.shape[0]
    if n < 2:
        raise InputError("edge expansion needs at least 2 nodes")
    Wp = np.maximum(W, 0.0)
    Wm = np.minimum(W, 0.0)
    dp = Wp.sum(axis=1)
    dm = Wm.sum(axis=1)
    d_plus_min = float(dp.min())
    half = 0.5 * float(dp.sum())
    slack = 1e-12 * max(1.0, half)

    if n > cap:
        return _expansion_without_search(Wp, Wm, dp, d_plus_min, cap)

    best_pos, arg_pos = np.inf, None
    best_neg, arg_neg = np.inf, None
    for masks, X in _subset_chunks(n):
        dS = X @ dp
        bp = dS - np.einsum("ij,ij->i", X @ Wp, X)
        bm = X @ dm - np.einsum("ij,ij->i", X @ Wm, X)

        ok = dS <= half + slack
        if ok.any():
            ratio = np.divide(bp, dS, out=np.zeros_like(bp), where=dS > 0)
            sq = np.where(ok, ratio * ratio, np.inf)
            k = int(np.argmin(sq))
            if sq[k] < best_pos:
                best_pos, arg_pos = float(sq[k]), masks[k]
        k = int(np.argmin(bm))
        if bm[k] < best_neg:
            best_neg, arg_neg = float(bm[k]), masks[k]

    if arg_pos is None:
        # only possible when d+(V) == 0
        positive, arg_pos_set = 0.0, ()
    else:
        positive, arg_pos_set = 0.5 * d_plus_min * best_pos, _members(arg_pos, n)
    negative = 2.0 * best_neg
    return ExpansionReport(
        phi_g=positive + negative,
        positive_term=positive,
        negative_term=negative,
        argmin_positive=arg_pos_set,
        argmin_negative=_members(arg_neg, n),
        d_plus_min=d_plus_min,
    )


def _expansion_without_search(Wp, Wm, dp, d_plus_min, cap):
    n = Wp.shape[0]
    comps = connected_components(Wp)
    if len(comps) < 2 or np.any(Wm != 0):
        raise CapacityError(
            f"exact edge expansion on n={n} nodes enumerates 2^{n} subsets; "
            f"the cap is n={cap}"
        )
    smallest = min(comps, key=lambda c: (float(dp[c].sum()), c))
    return ExpansionReport(
        phi_g=0.0,
        positive_term=0.0,
        negative_term=0.0,
        argmin_positive=tuple(smallest),
        argmin_negative=(0,),
        d_plus_min=d_plus_min,
        exhaustive=False,
    )


def classical_cheeger(G, cap=ENUMERATION_CAP):
    """Cheeger constant ``min |dS| / |S|`` over ``|S| <= n/2`` of an unweighted graph."""
    W = _weights(G)
    n = W.shape[0]
    if not np.all((W == 0) | (W == 1)):
        raise InputError("classical Cheeger constant needs 0/1 weights")
    if n < 2:
        raise InputError("Cheeger constant needs at least 2 nodes")
    if n > cap:
        raise CapacityError(f"exhaustive Cheeger constant on n={n} exceeds cap {cap}")
    d = W.sum(axis=1)
    best = np.inf
    for _, X in _subset_chunks(n):
        size = X.sum(axis=1)
        cut = X @ d - np.einsum("ij,ij->i", X @ W, X)
        h = np.where(size <= n / 2, cut / size, np.inf)
        best = min(best, float(h.min()))
    return best


def indicator_graph(G):
    """Unweighted graph with an edge exactly where ``W_ij > 0``."""
    W = _weights(G)
    return SignedWeightedGraph((W > 0).astype(float))


def cheeger_gap(G, cap=ENUMERATION_CAP):
    """``lambda_1perp(L) - phi_G``; nonnegative by the signed Cheeger inequality."""
    return lambda_one_perp(laplacian(G)) - signed_edge_expansion(G, cap=cap).phi_g


def is_psd_laplacian(G, tol=1e-9):
    return lambda_min(laplacian(G)) >= -tol
