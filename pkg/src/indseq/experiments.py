"""Desk-scale experiments on random trees and sparse random graphs.

Each run is fully determined by its ExperimentConfig; trials are drawn on
independent streams Seed(master, trial) and may be farmed out to worker
processes without changing any aggregate.
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__, constants
from .estimators import DEFAULT_T_GRID, planted_concentration_experiment, planted_trial, ratio_estimate
from .exact_count import (
    IndependentSetCounter,
    forest_independence_sequence,
    forest_max_independent_set_size,
    independence_sequence,
    max_independent_set_size,
)
from .generators import ModelSpec, sample_gnp, sample_model, sample_uniform_tree
from .rng import STREAM_ALGORITHM, Seed
from .shape import analyze_shape, last_third_ok, wingard_ok

EXPERIMENTS = ("tree-unimodality", "tree-prefix", "tree-lastthird", "pittel",
               "er-ratio", "karp-maxind", "concentration", "mode")

# Defaults are merged into the config at construction, so every verdict reads
# its tolerance from the config echo.
DEFAULT_TOLERANCES = {
    "tree-unimodality": {"min_fraction": 1.0},
    "tree-prefix": {"prefix_constant": 0.26543, "min_fraction": 1.0},
    "tree-lastthird": {"min_fraction": 1.0},
    "pittel": {"mean_abs": 0.01, "var_low": 0.03, "var_high": 0.05, "reading_rel": 0.2},
    "er-ratio": {"min_fraction": 0.9},
    "karp-maxind": {"mean_abs": 0.02},
    "concentration": {"max_violations": 0, "mean_z": 3.0},
    "mode": {},
}
DEFAULT_PARAMS = {
    "er-ratio": {"estimator_trials": 2000},
    "karp-maxind": {"core_cap": 200},
    "concentration": {"t_grid": list(DEFAULT_T_GRID)},
    "mode": {"bins": 20},
}
THREADS_ENV = "INDSEQ_THREADS"


class ExperimentError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    model: ModelSpec
    trials: int
    seed: int
    k_range: list | None = None
    out: str | None = None
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    threads: int | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ExperimentError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if isinstance(self.model, dict):
            self.model = ModelSpec.from_dict(self.model)
        if self.trials < 1:
            raise ExperimentError("trials must be positive")
        self.tolerances = {**DEFAULT_TOLERANCES[self.experiment], **self.tolerances}
        self.params = {**DEFAULT_PARAMS.get(self.experiment, {}), **self.params}
        if self.k_range is not None:
            self.k_range = [int(k) for k in self.k_range]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = self.model.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"experiment", "model", "trials", "seed", "k_range", "out", "tolerances", "params", "threads"}
        extra = set(d) - known
        if extra:
            raise ExperimentError(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class ExperimentReport:
    config: dict
    aggregates: dict
    verdicts: dict
    rows: list
    wall_clock_s: float
    library_version: str = __version__
    stream_algorithm: str = STREAM_ALGORITHM

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts.values())

    def to_dict(self, with_rows: bool = False) -> dict:
        d = {
            "config": self.config,
            "library_version": self.library_version,
            "stream_algorithm": self.stream_algorithm,
            "aggregates": self.aggregates,
            "verdicts": self.verdicts,
            "passed": self.passed,
            "wall_clock_s": self.wall_clock_s,
        }
        if with_rows:
            d["rows"] = self.rows
        return d

    def write(self, out_dir) -> tuple[Path, Path | None]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        name = self.config["experiment"]
        jpath = out / f"{name}.json"
        jpath.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n")
        cpath = None
        if self.rows:
            cpath = out / f"{name}.csv"
            cols = list(self.rows[0])
            with cpath.open("w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=cols)
                w.writeheader()
                w.writerows(self.rows)
        return jpath, cpath


def _verdict(passed, observed, tolerance) -> dict:
    return {"passed": bool(passed), "observed": observed, "tolerance": tolerance}


def worker_count(config: ExperimentConfig, threads: int | None = None) -> int:
    for v in (threads, os.environ.get(THREADS_ENV), config.threads):
        if v:
            return max(1, int(v))
    return 1


def _map(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# ---------------------------------------------------------------- per-trial workers
# Top-level functions so worker processes can pickle them.

def _tree_trial(n: int, seed: int, trial: int) -> dict:
    t = sample_uniform_tree(n, Seed(seed, trial))
    seq = forest_independence_sequence(t)
    v = analyze_shape(seq)
    return {
        "trial": trial, "seed": seed, "alpha": seq.alpha,
        "unimodal": v.unimodal, "mode_low": v.mode_interval[0], "mode_high": v.mode_interval[1],
        "increasing_prefix": v.increasing_prefix, "decreasing_suffix_start": v.decreasing_suffix_start,
        "last_third": last_third_ok(seq), "wingard": wingard_ok(seq, n),
    }


def _gnp_shape_trial(model: ModelSpec, seed: int, trial: int) -> dict:
    g = sample_model(model, Seed(seed, trial))
    seq = independence_sequence(g)
    v = analyze_shape(seq)
    return {"trial": trial, "seed": seed, "alpha": seq.alpha, "unimodal": v.unimodal,
            "mode_low": v.mode_interval[0], "mode_high": v.mode_interval[1]}


def _pittel_trial(n: int, seed: int, trial: int) -> dict:
    t = sample_uniform_tree(n, Seed(seed, trial))
    return {"trial": trial, "seed": seed, "alpha": forest_max_independent_set_size(t)}


def _karp_trial(model: ModelSpec, cap: int, seed: int, trial: int) -> dict:
    g = sample_gnp(model.n, model.edge_probability, Seed(seed, trial))
    return {"trial": trial, "seed": seed, "alpha": max_independent_set_size(g, cap)}


def _er_trial(model: ModelSpec, ks, est_trials: int, beta: float, seed: int, trial: int) -> list[dict]:
    rng = Seed(seed, trial).generator()
    g = sample_gnp(model.n, model.edge_probability, rng)
    counter = IndependentSetCounter(g)
    seq = counter.sequence()
    rows = []
    n, d = model.n, model.degree
    for k in ks:
        if seq[k] == 0 or seq[k + 1] == 0:
            continue
        est = ratio_estimate(g, k, est_trials, rng, counter)
        mu = constants.planted_expected_unconnected(model, k).value
        s = constants.er_s(k / n, d, beta)
        lo, hi = (1 - s) * mu / (k + 1), (1 + s) * mu / (k + 1)
        rows.append({"trial": trial, "seed": seed, "k": k,
                     "exact_ratio": seq[k + 1] / seq[k], "estimate": est.estimate, "stderr": est.stderr,
                     "sandwich_low": lo, "sandwich_high": hi,
                     "inside": bool(lo <= est.estimate <= hi)})
    return rows


def _planted_worker(model: ModelSpec, k: int, seed: int, trial: int):
    return planted_trial(model, k, seed, trial)


# ---------------------------------------------------------------- experiments

def _need_tree(cfg):
    if cfg.model.family != "tree":
        raise ExperimentError(f"{cfg.experiment} needs the tree family")


def _tree_rows(cfg, workers):
    _need_tree(cfg)
    return _map(partial(_tree_trial, cfg.model.n, cfg.seed), list(range(cfg.trials)), workers)


def _run_tree_unimodality(cfg, workers):
    rows = _tree_rows(cfg, workers)
    good = sum(r["unimodal"] for r in rows)
    tol = cfg.tolerances["min_fraction"]
    agg = {"unimodal": good, "trials": cfg.trials}
    return rows, agg, {"unimodal_fraction": _verdict(good >= tol * cfg.trials, good / cfg.trials, tol)}


def _run_tree_prefix(cfg, workers):
    rows = _tree_rows(cfg, workers)
    c = cfg.tolerances["prefix_constant"]
    target = math.floor(c * cfg.model.n)
    good = sum(r["increasing_prefix"] >= target for r in rows)
    tol = cfg.tolerances["min_fraction"]
    agg = {"target_index": target, "strict_through_target": good, "trials": cfg.trials,
           "min_increasing_prefix": min(r["increasing_prefix"] for r in rows)}
    return rows, agg, {"prefix_fraction": _verdict(good >= tol * cfg.trials, good / cfg.trials, tol)}


def _run_tree_lastthird(cfg, workers):
    rows = _tree_rows(cfg, workers)
    good = sum(r["last_third"] for r in rows)
    wing = sum(r["wingard"] for r in rows)
    tol = cfg.tolerances["min_fraction"]
    agg = {"last_third_ok": good, "wingard_ok": wing, "trials": cfg.trials}
    return rows, agg, {
        "last_third_fraction": _verdict(good >= tol * cfg.trials, good / cfg.trials, tol),
        "wingard_fraction": _verdict(wing >= tol * cfg.trials, wing / cfg.trials, tol),
    }


def _run_pittel(cfg, workers):
    _need_tree(cfg)
    n = cfg.model.n
    rows = _map(partial(_pittel_trial, n, cfg.seed), list(range(cfg.trials)), workers)
    a = np.array([r["alpha"] for r in rows], dtype=float)
    c = constants.solve_rho()
    mean_n = float(a.mean() / n)
    var_n = float(a.var(ddof=1) / n) if len(a) > 1 else 0.0
    # which reading of the variance coefficient the data supports
    readings = {"sigma": c.variance_rate, "sigma_squared": c.variance_rate_squared}
    rel = {key: abs(var_n - v) / v for key, v in readings.items()}
    close = [key for key in readings if rel[key] <= cfg.tolerances["reading_rel"]]
    matched = min(close, key=rel.get) if close else "neither"
    z = (a - a.mean()) / a.std(ddof=1) if len(a) > 2 and a.std() > 0 else a * 0
    normal_p = float(stats.normaltest(z).pvalue) if len(a) >= 20 else None
    tol = cfg.tolerances
    agg = {"mean_over_n": mean_n, "rho": c.rho, "predicted_mean_over_n": constants.pittel_mean(n) / n,
           "var_over_n": var_n, "variance_readings": readings, "variance_relative_error": rel,
           "variance_reading_matched": matched,
           "normaltest_p": normal_p}
    return rows, agg, {
        "mean": _verdict(abs(mean_n - c.rho) <= tol["mean_abs"], mean_n, tol["mean_abs"]),
        "variance": _verdict(tol["var_low"] <= var_n <= tol["var_high"], var_n,
                             [tol["var_low"], tol["var_high"]]),
    }


def _beta(d):
    return constants.karp_constants(d).independent_fraction if d <= math.e else constants.frieze_beta(d)


def _run_er_ratio(cfg, workers):
    m = cfg.model
    if m.family != "gnp":
        raise ExperimentError("er-ratio needs the gnp family")
    ks = cfg.k_range or list(range(1, m.n // 2))
    fn = partial(_er_trial, m, ks, int(cfg.params["estimator_trials"]), _beta(m.degree), cfg.seed)
    rows = [r for chunk in _map(fn, list(range(cfg.trials)), workers) for r in chunk]
    inside = sum(r["inside"] for r in rows)
    frac = inside / len(rows) if rows else 0.0
    within3 = sum(abs(r["estimate"] - r["exact_ratio"]) <= 3 * r["stderr"] or r["estimate"] == r["exact_ratio"]
                  for r in rows)
    tol = cfg.tolerances["min_fraction"]
    agg = {"cells": len(rows), "inside_sandwich": inside, "estimate_within_3se_of_exact": within3}
    return rows, agg, {"sandwich_fraction": _verdict(rows and frac >= tol, frac, tol)}


def _run_karp(cfg, workers):
    m = cfg.model
    if m.family != "gnp" or m.degree > math.e:
        raise ExperimentError("karp-maxind needs gnp with mean degree d <= e")
    fn = partial(_karp_trial, m, int(cfg.params["core_cap"]), cfg.seed)
    rows = _map(fn, list(range(cfg.trials)), workers)
    frac = float(np.mean([r["alpha"] for r in rows]) / m.n)
    pred = constants.karp_constants(m.degree).independent_fraction
    tol = cfg.tolerances["mean_abs"]
    agg = {"mean_fraction": frac, "predicted_fraction": pred}
    return rows, agg, {"mean_fraction": _verdict(abs(frac - pred) <= tol, frac, tol)}


def _run_concentration(cfg, workers):
    if not cfg.k_range:
        raise ExperimentError("concentration needs k_range")
    rows, per_k, verdicts = [], {}, {}
    tol = cfg.tolerances
    for k in cfg.k_range:
        samples = _map(partial(_planted_worker, cfg.model, k, cfg.seed), list(range(cfg.trials)), workers)
        rep = planted_concentration_experiment(cfg.model, k, cfg.trials, cfg.seed,
                                               tuple(cfg.params["t_grid"]), samples)
        per_k[str(k)] = rep.to_dict()
        rows.extend({"trial": i, "seed": cfg.seed, "k": k, "unconnected": s[0], "attempts": s[1]}
                    for i, s in enumerate(samples))
        verdicts[f"violations_k{k}"] = _verdict(rep.violations <= tol["max_violations"], rep.violations,
                                                tol["max_violations"])
        verdicts[f"mean_k{k}"] = _verdict(abs(rep.mean_z) <= tol["mean_z"], rep.mean_z, tol["mean_z"])
    return rows, {"per_k": per_k}, verdicts


def _run_mode(cfg, workers):
    m = cfg.model
    if m.family == "tree":
        rows = _tree_rows(cfg, workers)
    else:
        rows = _map(partial(_gnp_shape_trial, m, cfg.seed), list(range(cfg.trials)), workers)
    lows = np.array([r["mode_low"] / m.n for r in rows])
    ratio = np.array([r["mode_low"] / r["alpha"] for r in rows if r["alpha"]])
    hist, edges = np.histogram(lows, bins=int(cfg.params["bins"]))
    agg = {"mode_over_n_mean": float(lows.mean()), "mode_over_n_sd": float(lows.std()),
           "mode_over_alpha_mean": float(ratio.mean()) if ratio.size else None,
           "histogram": {"counts": hist.tolist(), "edges": edges.tolist()}}
    return rows, agg, {}  # no predicted value, so no verdict


_RUNNERS = {
    "tree-unimodality": _run_tree_unimodality,
    "tree-prefix": _run_tree_prefix,
    "tree-lastthird": _run_tree_lastthird,
    "pittel": _run_pittel,
    "er-ratio": _run_er_ratio,
    "karp-maxind": _run_karp,
    "concentration": _run_concentration,
    "mode": _run_mode,
}


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> ExperimentReport:
    workers = worker_count(config, threads)
    t0 = time.perf_counter()
    rows, agg, verdicts = _RUNNERS[config.experiment](config, workers)
    wall = time.perf_counter() - t0
    report = ExperimentReport(config.to_dict(), agg, verdicts, rows, wall)
    if config.out:
        report.write(config.out)
    return report
