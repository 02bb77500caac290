"""Experiment harness: FOV-size / client-count sweeps and one-edge perturbation tables."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .federation import ClientSpec, ModelSpec, fov_complete_sample
from .pipeline import run_pipeline
from .rng import SWEEP, stream
from .signed_graph import SignedWeightedGraph, signed_edge_expansion
from .spectral import lambda_min, laplacian

SWEEP_COLUMNS = ("M", "K", "trials", "successes", "certified", "mean_runtime_ms")
DEFAULT_WEIGHTS = (1.0, 0.5, 0.0, -0.5, -1.0)


@dataclass
class SweepConfig:
    n: int = 30
    p: float = 0.9
    q: float = 0.1
    r: float = 0.1
    fov_sizes: list = field(default_factory=lambda: [5, 10, 15, 20, 25, 30])
    client_counts: list = field(default_factory=lambda: [1, 5, 10, 15, 20])
    trials: int = 10
    master_seed: int = 0
    timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if self.n < 2 or self.n % 2:
            raise InputError("sweeps use balanced labels and need an even n >= 2")
        ClientSpec(fov=[(0, 1)], p=self.p, q=self.q, r=self.r).validate(self.n)
        for m in self.fov_sizes:
            if not 2 <= m <= self.n:
                raise InputError(f"FOV size {m} outside [2, {self.n}]")
        for k in self.client_counts:
            if k < 1:
                raise InputError(f"client count {k} must be positive")


@dataclass
class SweepCell:
    M: int
    K: int
    trials: int
    successes: int
    certified_count: int
    mean_runtime_ms: float | None = None

    def row(self):
        rt = "" if self.mean_runtime_ms is None else f"{self.mean_runtime_ms:.3f}"
        return [self.M, self.K, self.trials, self.successes, self.certified_count, rt]


def balanced_labels(n):
    return np.array([1] * (n // 2) + [-1] * (n - n // 2), dtype=np.int64)


def trial_model(config, M, K, trial):
    """Model and pipeline seed for one trial, both derived from ``(master_seed, M, K, trial)``."""
    rng = stream(config.master_seed, SWEEP, M, K, trial)
    clients = [
        ClientSpec(fov=fov_complete_sample(config.n, M, rng), p=config.p, q=config.q, r=config.r)
        for _ in range(K)
    ]
    model = ModelSpec(n=config.n, labels=balanced_labels(config.n), clients=clients)
    return model, int(rng.integers(2**62))


def run_cell(config, M, K):
    successes = certified = 0
    elapsed = 0.0
    for t in range(config.trials):
        model, seed = trial_model(config, M, K, t)
        t0 = time.perf_counter()
        rep = run_pipeline(model, seed)
        elapsed += time.perf_counter() - t0
        successes += bool(rep.recovered)
        certified += bool(rep.certified)
    rt = 1000.0 * elapsed / config.trials if config.timing else None
    return SweepCell(M=M, K=K, trials=config.trials, successes=successes,
                     certified_count=certified, mean_runtime_ms=rt)


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(config, workers=1):
    """One cell per ``(M, K)``, ordered by ``M`` then ``K``; results do not depend on ``workers``."""
    grid = [(config, M, K) for M in config.fov_sizes for K in config.client_counts]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell_args, grid))
    return [run_cell(*g) for g in grid]


def sweep_csv(cells):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for c in cells:
        w.writerow(c.row())
    return buf.getvalue()


# built-in 10-node topologies; each comes with the edge that gets perturbed


def complete_graph(n=10):
    return SignedWeightedGraph(np.ones((n, n)) - np.eye(n)), (0, 1)


def petersen_graph():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SignedWeightedGraph.from_edges(10, [(i, j, 1.0) for i, j in outer + spokes + inner]), (0, 1)


def spider_graph(legs=3, leg_length=3):
    """Centre node 0 with ``legs`` paths of ``leg_length`` nodes; perturbs a centre edge."""
    n = 1 + legs * leg_length
    edges = []
    for leg in range(legs):
        first = 1 + leg * leg_length
        edges.append((0, first, 1.0))
        edges += [(first + t, first + t + 1, 1.0) for t in range(leg_length - 1)]
    return SignedWeightedGraph.from_edges(n, edges), (0, 1)


TOPOLOGIES = {
    "complete": complete_graph,
    "petersen": petersen_graph,
    "spider33": spider_graph,
}


def load_topology(name, path=None, edge=None):
    if name == "file":
        if path is None:
            raise InputError("topology 'file' needs a path")
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read topology file {path}: {exc.strerror}") from None
        G = SignedWeightedGraph.from_edgelist(text)
        if edge is None:
            edges = G.edges()
            if not edges:
                raise InputError("topology file has no edges to perturb")
            edge = edges[0][:2]
    elif name in TOPOLOGIES:
        G, default_edge = TOPOLOGIES[name]()
        edge = default_edge if edge is None else edge
    else:
        raise InputError(f"unknown topology {name!r}; choose from {sorted(TOPOLOGIES) + ['file']}")
    i, j = map(int, edge)
    if not (0 <= i < G.n and 0 <= j < G.n) or i == j:
        raise InputError(f"perturbed edge {edge} invalid for n={G.n}")
    return G, (i, j)


def perturb_study(G, edge, weights=DEFAULT_WEIGHTS, psd_tol=1e-9):
    """Edge expansion and Laplacian PSD-ness as one edge's weight varies."""
    i, j = edge
    rows = []
    for w in weights:
        H = G.with_weight(i, j, float(w))
        rep = signed_edge_expansion(H)
        lam = lambda_min(laplacian(H))
        rows.append({
            "weight": float(w),
            "phi_g": rep.phi_g,
            "positive_term": rep.positive_term,
            "negative_term": rep.negative_term,
            "lambda_min": lam,
            "psd": lam >= -psd_tol,
        })
    return rows
