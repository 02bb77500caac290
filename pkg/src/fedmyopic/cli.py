"""Command-line interface.

    fedmyopic generate model.json --seed 0 --out evidence.json
    fedmyopic aggregate evidence.json --out consensus.txt
    fedmyopic solve consensus.txt --seed 0
    fedmyopic pipeline model.json --seed 0
    fedmyopic expansion graph.txt
    fedmyopic certify graph.txt --labels 1,1,-1,-1
    fedmyopic check-recovery model.json
    fedmyopic check-impossibility --p 0.9 --q 0.1 --r 0.4 --n-k 10 --fov-size 45
    fedmyopic sweep --r 0.4 --fov-sizes 5,30 --client-counts 5,200 --threads 4
    fedmyopic perturb-study --topology petersen
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments
from .consensus import aggregate
from .errors import FedMyopicError, InputError
from .federation import (
    ClientSpec,
    ModelSpec,
    evidence_from_json,
    evidence_to_json,
    generate_client,
)
from .pipeline import run_pipeline
from .recovery import dual_certificate, recover
from .signed_graph import SignedWeightedGraph, signed_edge_expansion
from .spectral import lambda_one_perp, laplacian
from .theory import impossibility_condition, recovery_condition


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _parse_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if exc.lineno <= len(lines) else ""
        raise InputError(
            f"{what}: {exc.msg} at line {exc.lineno} column {exc.colno}: {line.strip()!r}"
        ) from None


def load_model(path, strict=True):
    return ModelSpec.from_dict(_parse_json(_read(path), f"model spec {path}"), strict=strict)


def load_graph(path):
    return SignedWeightedGraph.from_edgelist(_read(path))


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, text):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args):
    model = load_model(args.model, strict=not args.test_mode)
    evidence = [generate_client(model, k, args.seed)[1] for k in range(model.K)]
    return evidence_to_json(evidence, model.n) + "\n"


def cmd_aggregate(args):
    n, evidence = evidence_from_json(_read(args.evidence))
    return aggregate(evidence, n).graph.to_edgelist()


def cmd_solve(args):
    G = load_graph(args.graph)
    res = recover(G, seed=args.seed, rank=args.rank, max_iter=args.max_iter, tol=args.tol)
    return _dump(res.to_dict())


def cmd_pipeline(args):
    model = load_model(args.model, strict=not args.test_mode)
    rep = run_pipeline(model, args.seed, rank=args.rank, max_iter=args.max_iter, tol=args.tol)
    return _dump(rep.to_dict())


def cmd_expansion(args):
    G = load_graph(args.graph)
    rep = signed_edge_expansion(G, cap=args.cap)
    out = rep.to_dict()
    if G.n >= 2:
        lam = lambda_one_perp(laplacian(G))
        out["lambda_one_perp"] = lam
        out["cheeger_gap"] = lam - rep.phi_g
    return _dump(out)


def cmd_certify(args):
    G = load_graph(args.graph)
    labels = args.labels
    if labels is None:
        raise InputError("certify needs --labels")
    cert = dual_certificate(G, np.asarray(labels))
    return _dump({"lambda2": cert.lambda2, "certified": bool(cert.certified)})


def cmd_check_recovery(args):
    model = load_model(args.model, strict=not args.test_mode)
    return _dump(recovery_condition(model, cap=args.cap).to_dict())


def cmd_check_impossibility(args):
    if args.model:
        model = load_model(args.model, strict=not args.test_mode)
        if not 0 <= args.client < model.K:
            raise InputError(f"client index {args.client} out of range")
        spec = model.clients[args.client]
        sub, _ = generate_client(model, args.client, args.seed)
        n_k = args.n_k if args.n_k is not None else sub.n_k
        rep = impossibility_condition(spec, max(n_k, 1), fov_size=args.fov_size)
    else:
        if None in (args.p, args.q, args.r, args.n_k, args.fov_size):
            raise InputError("give either a model file or all of --p --q --r --n-k --fov-size")
        spec = ClientSpec(fov=[(0, 1)], p=args.p, q=args.q, r=args.r)
        spec.validate(2, strict=not args.test_mode)
        rep = impossibility_condition(spec, args.n_k, fov_size=args.fov_size)
    return _dump(rep.to_dict())


def cmd_sweep(args):
    config = experiments.SweepConfig(
        n=args.n, p=args.p, q=args.q, r=args.r,
        fov_sizes=args.fov_sizes, client_counts=args.client_counts,
        trials=args.trials, master_seed=args.seed, timing=args.timing,
    )
    cells = experiments.run_sweep(config, workers=args.threads)
    return experiments.sweep_csv(cells)


def cmd_perturb_study(args):
    G, edge = experiments.load_topology(args.topology, path=args.file, edge=args.edge)
    rows = experiments.perturb_study(G, edge, weights=args.weights)
    if not args.out:
        sys.stderr.write(f"{'weight':>8} {'phi_G':>9}  psd\n")
        for r in rows:
            sys.stderr.write(f"{r['weight']:>8.2f} {r['phi_g']:>9.4f}  {r['psd']}\n")
    return _dump({"topology": args.topology, "edge": list(edge), "rows": rows})


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker processes for sweeps (default 1)")

    parser = argparse.ArgumentParser(prog="fedmyopic", parents=[common],
                                     description="Federated myopic community detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    def solver_opts(p):
        p.add_argument("--rank", type=int, default=None)
        p.add_argument("--max-iter", type=int, default=1000)
        p.add_argument("--tol", type=float, default=1e-12)

    def test_mode(p):
        p.add_argument("--test-mode", action="store_true",
                       help="accept closed parameter ranges (p=1, q=0, r=0 limits)")

    p = add("generate", cmd_generate, "sample censored evidence from a model spec")
    p.add_argument("model")
    test_mode(p)

    p = add("aggregate", cmd_aggregate, "build the consensus graph from evidence JSON")
    p.add_argument("evidence")

    p = add("solve", cmd_solve, "solve the SDP on an edge-list graph and certify")
    p.add_argument("graph")
    solver_opts(p)

    p = add("pipeline", cmd_pipeline, "generate, aggregate, recover and verify")
    p.add_argument("model")
    solver_opts(p)
    test_mode(p)

    p = add("expansion", cmd_expansion, "exact signed weighted edge expansion")
    p.add_argument("graph")
    p.add_argument("--cap", type=int, default=20)

    p = add("certify", cmd_certify, "dual certificate for a labelling")
    p.add_argument("graph")
    p.add_argument("--labels", type=_int_list, default=None)

    p = add("check-recovery", cmd_check_recovery, "evaluate the exact-recovery condition")
    p.add_argument("model")
    p.add_argument("--cap", type=int, default=20)
    test_mode(p)

    p = add("check-impossibility", cmd_check_impossibility, "evaluate the single-client impossibility bound")
    p.add_argument("model", nargs="?")
    p.add_argument("--client", type=int, default=0)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--n-k", type=int)
    p.add_argument("--fov-size", type=int)
    test_mode(p)

    p = add("sweep", cmd_sweep, "FOV size x client count recovery sweep (CSV)")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--p", type=float, default=0.9)
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--r", type=float, default=0.1)
    p.add_argument("--fov-sizes", type=_int_list, default=[5, 10, 15, 20, 25, 30])
    p.add_argument("--client-counts", type=_int_list, default=[1, 5, 10, 15, 20])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--timing", action="store_true",
                   help="fill mean_runtime_ms (makes output machine-dependent)")

    p = add("perturb-study", cmd_perturb_study, "edge expansion under a one-edge perturbation")
    p.add_argument("--topology", default="complete",
                   choices=sorted(experiments.TOPOLOGIES) + ["file"])
    p.add_argument("--file")
    p.add_argument("--edge", type=int, nargs=2, default=None)
    p.add_argument("--weights", type=_float_list, default=list(experiments.DEFAULT_WEIGHTS))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed = getattr(args, "seed", 0)
    args.out = getattr(args, "out", None)
    args.threads = getattr(args, "threads", 1)
    if args.seed < 0:
        parser.error("--seed must be nonnegative")
    try:
        text = args.func(args)
    except FedMyopicError as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 2
    _emit(args, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
