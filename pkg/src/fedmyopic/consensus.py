"""Server-side aggregation and the expected/signed consensus graphs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .signed_graph import SignedWeightedGraph


@dataclass
class ConsensusGraph:
    graph: SignedWeightedGraph
    contributing: np.ndarray

    @property
    def W(self):
        return self.graph.weights


def aggregate(evidence, n):
    """Sum client reports: +1 per reported edge, -1 per reported non-edge.

    Only evidence is consumed. ``contributing[i, j]`` counts the clients whose
    field of view contains the pair.
    """
    W = np.zeros((n, n), dtype=np.int64)
    C = np.zeros((n, n), dtype=np.int64)
    for ev in evidence:
        pairs = np.asarray(ev.pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise InputError(f"client {ev.client_index}: node index outside [0, {n})")
        i, j = pairs[:, 0], pairs[:, 1]
        if np.any(i == j):
            raise InputError(f"client {ev.client_index}: self pair in evidence")
        rep = np.asarray(ev.reported, dtype=np.int64)
        np.add.at(W, (i, j), rep)
        np.add.at(W, (j, i), rep)
        np.add.at(C, (i, j), 1)
        np.add.at(C, (j, i), 1)
    return ConsensusGraph(graph=SignedWeightedGraph(W.astype(float)), contributing=C)


def signal_coefficients(model):
    """``s[k, i, j]``: probability that client ``k`` reports ``(i, j)`` as an edge.

    ``p + r - 2 p r`` for same-label pairs, ``q + r - 2 q r`` across labels, and
    0 for pairs outside the client's field of view.
    """
    n, K = model.n, model.K
    s = np.zeros((K, n, n))
    same = model.labels[:, None] == model.labels[None, :]
    for k, c in enumerate(model.clients):
        s_plus = c.p + c.r - 2 * c.p * c.r
        s_minus = c.q + c.r - 2 * c.q * c.r
        i, j = c.fov[:, 0], c.fov[:, 1]
        vals = np.where(same[i, j], s_plus, s_minus)
        s[k, i, j] = vals
        s[k, j, i] = vals
    return s


def _fov_indicator(model):
    n, K = model.n, model.K
    m = np.zeros((K, n, n), dtype=bool)
    for k, c in enumerate(model.clients):
        m[k, c.fov[:, 0], c.fov[:, 1]] = True
        m[k, c.fov[:, 1], c.fov[:, 0]] = True
    return m


def expected_consensus(model):
    """``E[W_ij] = sum over clients viewing (i, j) of (2 s_ij - 1)``."""
    s = signal_coefficients(model)
    inside = _fov_indicator(model)
    return SignedWeightedGraph(np.where(inside, 2 * s - 1, 0.0).sum(axis=0))


def signed_consensus(model):
    """Expected consensus multiplied entrywise by ``y* y*^T``."""
    EW = expected_consensus(model).weights
    return SignedWeightedGraph(EW * model.truth_matrix)


def noise_proxy(model):
    """``max_i |sum_{j,k} s_ij^k (1 - s_ij^k)|``."""
    s = signal_coefficients(model)
    return float(np.abs((s * (1 - s)).sum(axis=(0, 2))).max())
