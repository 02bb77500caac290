"""Generative model: client fields of view, local subgraphs and censored evidence.

Client ``k`` draws from the stream ``(seed, SAMPLING, k)``, so adding clients
never changes what earlier clients observe.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .rng import FOV, SAMPLING, stream


def normalize_fov(pairs, n=None):
    """Sorted array of unique unordered pairs ``(i, j)`` with ``i < j``."""
    arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    if np.any(arr[:, 0] == arr[:, 1]):
        raise InputError("field of view contains a pair with equal endpoints")
    arr = np.sort(arr, axis=1)
    if n is not None and arr.size and (arr.min() < 0 or arr.max() >= n):
        raise InputError(f"field of view has a node outside [0, {n})")
    return np.unique(arr, axis=0) if len(arr) else arr


def complete_pairs(nodes):
    nodes = sorted(int(v) for v in nodes)
    return np.asarray(list(itertools.combinations(nodes, 2)), dtype=np.int64).reshape(-1, 2)


def fov_complete_sample(n, m, rng):
    """All pairs among ``m`` nodes drawn uniformly without replacement from ``[n]``."""
    if not 2 <= m <= n:
        raise InputError(f"field-of-view size must satisfy 2 <= m <= n, got m={m}, n={n}")
    return complete_pairs(rng.choice(n, size=m, replace=False))


@dataclass
class ClientSpec:
    fov: np.ndarray
    p: float
    q: float
    r: float

    def __post_init__(self):
        self.fov = normalize_fov(self.fov)
        self.p, self.q, self.r = float(self.p), float(self.q), float(self.r)

    def validate(self, n, strict=True):
        """Check parameter ranges.

        ``strict`` enforces ``0 < q < p < 1`` and ``0 < r < 0.5``; otherwise the
        closed versions are accepted, which the deterministic limit tests need.
        """
        p, q, r = self.p, self.q, self.r
        if strict:
            if not 0 < q < p < 1:
                raise InputError(f"need 0 < q < p < 1, got p={p}, q={q}")
            if not 0 < r < 0.5:
                raise InputError(f"need 0 < r < 0.5, got r={r}")
        else:
            if not 0 <= q <= p <= 1:
                raise InputError(f"need 0 <= q <= p <= 1, got p={p}, q={q}")
            if not 0 <= r <= 0.5:
                raise InputError(f"need 0 <= r <= 0.5, got r={r}")
        if len(self.fov) == 0:
            raise InputError("client field of view is empty")
        if self.fov.min() < 0 or self.fov.max() >= n:
            raise InputError(f"field of view has a node outside [0, {n})")

    def is_myopic(self, n):
        return len(self.fov) < n * (n - 1) // 2


@dataclass
class ModelSpec:
    n: int
    labels: np.ndarray
    clients: list
    balanced: bool = True
    strict: bool = True

    def __post_init__(self):
        self.n = int(self.n)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.n < 2:
            raise InputError("need at least 2 nodes")
        if self.labels.shape != (self.n,) or not np.all(np.abs(self.labels) == 1):
            raise InputError("labels must be a length-n vector of +1/-1")
        if self.balanced and self.labels.sum() != 0:
            raise InputError("labels are not balanced (sum must be 0)")
        if not self.clients:
            raise InputError("model needs at least one client")
        for k, c in enumerate(self.clients):
            try:
                c.validate(self.n, strict=self.strict)
            except InputError as exc:
                raise InputError(f"client {k}: {exc}") from None

    @property
    def K(self):
        return len(self.clients)

    @property
    def truth_matrix(self):
        return np.outer(self.labels, self.labels)

    def myopic_clients(self):
        return [c.is_myopic(self.n) for c in self.clients]

    def to_dict(self):
        return {
            "n": self.n,
            "labels": self.labels.tolist(),
            "clients": [
                {"fov": c.fov.tolist(), "p": c.p, "q": c.q, "r": c.r} for c in self.clients
            ],
        }

    @classmethod
    def from_dict(cls, d, strict=True):
        """Parse the ModelSpec JSON shape.

        A client's ``fov`` is either an explicit pair list or
        ``{"complete_sample": {"m": M, "seed": s}}``; the sample is drawn from the
        stream ``(s, FOV, k)`` where ``s`` defaults to the top-level
        ``"fov_seed"`` (itself defaulting to 0).
        """
        try:
            n = int(d["n"])
            labels = d["labels"]
            raw_clients = d["clients"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"model spec missing or malformed field: {exc}") from None
        if not isinstance(raw_clients, list):
            raise InputError("'clients' must be a list")
        base_seed = int(d.get("fov_seed", 0))
        clients = []
        for k, c in enumerate(raw_clients):
            try:
                fov = c["fov"]
                if isinstance(fov, dict):
                    sample = fov["complete_sample"]
                    rng = stream(int(sample.get("seed", base_seed)), FOV, k)
                    fov = fov_complete_sample(n, int(sample["m"]), rng)
                clients.append(ClientSpec(fov=fov, p=c["p"], q=c["q"], r=c["r"]))
            except (KeyError, TypeError) as exc:
                raise InputError(f"client {k}: missing or malformed field {exc}") from None
        return cls(n=n, labels=labels, clients=clients,
                   balanced=bool(d.get("balanced", True)), strict=strict)


@dataclass
class LocalSubgraph:
    client_index: int
    edges: np.ndarray
    active_nodes: np.ndarray
    in_fov: np.ndarray = field(repr=False)

    @property
    def n_k(self):
        return len(self.active_nodes)


@dataclass
class EvidenceGraph:
    """One client's report: every field-of-view pair tagged +1 (edge) or -1 (non-edge)."""

    client_index: int
    pairs: np.ndarray
    reported: np.ndarray

    @property
    def edges(self):
        return self.pairs[self.reported > 0]

    def to_dict(self):
        rows = np.column_stack([self.pairs, self.reported]).tolist()
        return {"client": self.client_index, "pairs": rows}

    @classmethod
    def from_dict(cls, d):
        try:
            rows = np.asarray(d["pairs"], dtype=np.int64).reshape(-1, 3)
            k = int(d["client"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed evidence record: {exc}") from None
        if not np.all(np.abs(rows[:, 2]) == 1):
            raise InputError(f"client {k}: evidence labels must be +1/-1")
        return cls(client_index=k, pairs=rows[:, :2], reported=rows[:, 2])


def sample_subgraph(model, k, rng):
    """Draw client ``k``'s local subgraph from its field of view."""
    spec = model.clients[k]
    i, j = spec.fov[:, 0], spec.fov[:, 1]
    same = model.labels[i] == model.labels[j]
    prob = np.where(same, spec.p, spec.q)
    present = rng.random(len(spec.fov)) < prob
    edges = spec.fov[present]
    return LocalSubgraph(client_index=k, edges=edges,
                         active_nodes=np.unique(edges), in_fov=present)


def censor(sub, spec, rng):
    """Report every field-of-view pair; true edges kept w.p. ``1-r``, non-edges flipped w.p. ``r``.

    Pairs touching nodes dropped as isolated are still reported.
    """
    u = rng.random(len(spec.fov))
    reported_edge = np.where(sub.in_fov, u < 1.0 - spec.r, u < spec.r)
    return EvidenceGraph(client_index=sub.client_index, pairs=spec.fov.copy(),
                         reported=np.where(reported_edge, 1, -1).astype(np.int64))


def generate_client(model, k, seed):
    rng = stream(seed, SAMPLING, k)
    sub = sample_subgraph(model, k, rng)
    return sub, censor(sub, model.clients[k], rng)


def generate_evidence(model, seed):
    """Subgraph and censored evidence for every client, in client order."""
    return [generate_client(model, k, seed) for k in range(model.K)]


def evidence_to_json(evidence, n):
    return json.dumps({"n": n, "evidence": [e.to_dict() for e in evidence]}, sort_keys=True)


def evidence_from_json(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"evidence JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
    try:
        n = int(d["n"])
        records = d["evidence"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"evidence JSON missing field: {exc}") from None
    return n, [EvidenceGraph.from_dict(r) for r in records]
