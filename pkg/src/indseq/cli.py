"""Command line: indseq {gen,analyze,constants,estimate,verify,experiment}.

Every subcommand except gen prints a JSON document on stdout.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import constants
from .estimators import (
    change_of_measure_check,
    counting_lemma_table,
    planted_concentration_experiment,
    ratio_estimate,
    sequence_estimate,
)
from .exact_count import independence_sequence
from .experiments import ExperimentConfig, run_experiment
from .generators import FAMILIES, ModelSpec, sample_model, sample_planted
from .graph_core import read_edge_list, write_edge_list
from .rng import STREAM_ALGORITHM, Seed
from .shape import analyze_shape, certify_real_rooted, is_log_concave


def _dump(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _number(text: str) -> float:
    """Accepts floats, fractions like 1/2, and the literal 'e'."""
    return math.e if text.strip().lower() == "e" else float(Fraction(text))


def _model(args) -> ModelSpec:
    return ModelSpec(args.model, args.n, args.p, args.d)


def _read_graph(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return read_edge_list(text)


def cmd_gen(args):
    model = _model(args)
    seed = Seed(args.seed)
    notes = [f"model {json.dumps(model.to_dict())}", f"seed {args.seed}", f"stream {STREAM_ALGORITHM}"]
    if args.planted is not None:
        ps = sample_planted(model, args.planted, seed)
        notes.append(f"attempts {ps.attempts}")
        text = write_edge_list(ps.graph, ps.sigma, notes)
    else:
        text = write_edge_list(sample_model(model, seed), None, notes)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


def _load_coeffs(path):
    data = json.loads(Path(path).read_text() if path != "-" else sys.stdin.read())
    if isinstance(data, dict):
        data = data["coeffs"]
    coeffs = [int(c) for c in data]
    if not coeffs or any(c < 0 for c in coeffs):
        raise ValueError("coefficients must be a non-empty list of non-negative integers")
    return coeffs


def cmd_analyze(args):
    if args.graph:
        g, _ = _read_graph(args.graph)
        coeffs = list(independence_sequence(g).coeffs)
    else:
        coeffs = _load_coeffs(args.input)
    out = {"coeffs": coeffs, "shape": analyze_shape(coeffs).to_dict(), "log_concave": is_log_concave(coeffs)}
    if len(coeffs) > 1:
        out["real_roots"] = certify_real_rooted(coeffs).to_dict()
    _dump(out)


def cmd_constants(args):
    name = args.name
    if name == "rho":
        c = constants.solve_rho()
        out = {"rho": c.rho, "mean_correction": c.mean_correction,
               "variance_rate": c.variance_rate, "variance_rate_squared": c.variance_rate_squared}
    elif name == "karp":
        out = constants.karp_constants(_need(args.d, "--d")).to_dict()
    elif name == "frieze":
        d = _need(args.d, "--d")
        out = {"d": d, "beta": constants.frieze_beta(d)}
    elif name == "tree-thresholds":
        inc, dec = constants.tree_unimodality_thresholds()
        out = {"increasing_below": inc, "decreasing_above": dec}
    elif name == "er-thresholds":
        d = _need(args.d, "--d")
        left, right = constants.er_low_degree_thresholds(d)
        out = {"d": d, "increasing_below": left, "decreasing_above": right}
    else:  # dani
        a = _need(args.alpha, "--alpha")
        out = {"alpha": a, "degree_bound": constants.dani_degree_bound(a)}
    _dump(out)


def _need(v, flag):
    if v is None:
        raise ValueError(f"{flag} is required here")
    return v


def cmd_estimate(args):
    g, _ = _read_graph(args.input)
    if args.what == "ratio":
        e = ratio_estimate(g, args.k, args.trials, Seed(args.seed))
        _dump({"k": args.k, "estimate": e.estimate, "stderr": e.stderr, "trials": e.trials, "seed": args.seed})
    else:
        s = sequence_estimate(g, args.k, args.trials, Seed(args.seed))
        _dump({"k_max": args.k, "values": s.values, "stderr": s.stderr, "trials": args.trials,
               "seed": args.seed})


def cmd_verify(args):
    if args.what == "counting-lemma":
        g, _ = _read_graph(args.input)
        rows = counting_lemma_table(g)
        _dump({"holds": all(a == b for _, a, b in rows),
               "rows": [{"k": k, "sum_unconnected": a, "rhs": b} for k, a, b in rows]})
        return
    model = _model(args)
    if args.what == "change-of-measure":
        _dump(change_of_measure_check(model, args.k, args.probes, Seed(args.seed)).to_dict())
    else:
        _dump(planted_concentration_experiment(model, args.k, args.trials, args.seed).to_dict())


def cmd_experiment(args):
    cfg = ExperimentConfig.load(args.config)
    if args.out:
        cfg.out = args.out
    rep = run_experiment(cfg, threads=args.threads)
    _dump(rep.to_dict())
    return 0 if rep.passed else 1


def _add_model(p, required=True):
    p.add_argument("--model", choices=FAMILIES, required=required)
    p.add_argument("--n", type=int, required=required)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p", type=_number)
    g.add_argument("--d", type=_number)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="indseq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="sample a graph (optionally planted) as an edge list")
    _add_model(p)
    p.add_argument("--planted", type=int, metavar="K")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("analyze", help="shape and real-rootedness of a coefficient list")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="JSON list of coefficients, lowest degree first")
    src.add_argument("--graph", help="edge-list file; its independence sequence is analysed")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("constants", help="closed-form constants and thresholds")
    p.add_argument("--name", required=True,
                   choices=["rho", "karp", "frieze", "tree-thresholds", "er-thresholds", "dani"])
    p.add_argument("--d", type=_number)
    p.add_argument("--alpha", type=float)
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("estimate", help="Monte Carlo ratio or sequence estimate")
    p.add_argument("what", choices=["ratio", "sequence"])
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True, help="k for ratio, k_max for sequence")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("verify", help="exact identity checks and planted concentration")
    p.add_argument("what", choices=["counting-lemma", "change-of-measure", "concentration"])
    p.add_argument("--input")
    _add_model(p, required=False)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("experiment", help="run a JSON-configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--threads", type=int)
    p.set_defaults(fn=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.cmd == "verify":
        if args.what == "counting-lemma" and not args.input:
            ap.error("verify counting-lemma needs --input")
        if args.what != "counting-lemma" and (args.model is None or args.n is None or args.k is None):
            ap.error(f"verify {args.what} needs --model, --n and --k")
    try:
        rc = args.fn(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"indseq: error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
