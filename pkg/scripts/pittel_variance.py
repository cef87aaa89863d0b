#!/usr/bin/env python3
"""Empirical Var(alpha(T))/n for uniform random trees, with two independent
samplers (random walk and Pruefer decoding), against candidate constants."""
import argparse

import numpy as np

from indseq.constants import solve_rho
from indseq.exact_count import forest_max_independent_set_size
from indseq.generators import sample_uniform_tree
from indseq.graph_core import prufer_decode
from indseq.rng import Seed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[200, 1000])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    c = solve_rho()
    rho = c.rho
    cands = {
        "sigma": c.variance_rate,
        "sigma^2": c.variance_rate_squared,
        "sigma/(1+rho)": c.variance_rate / (1 + rho),
    }
    print("candidates:", {k: round(v, 6) for k, v in cands.items()})
    for n in args.n:
        walk = [forest_max_independent_set_size(sample_uniform_tree(n, Seed(args.seed, i)))
                for i in range(args.trials)]
        rng = Seed(args.seed + 1).generator()
        pru = [forest_max_independent_set_size(prufer_decode(rng.integers(n, size=n - 2).tolist(), n))
               for _ in range(args.trials)]
        for name, a in (("walk", walk), ("pruefer", pru)):
            a = np.asarray(a, dtype=float)
            v = a.var(ddof=1) / n
            se = v * np.sqrt(2 / (len(a) - 1))
            print(f"n={n:6d} {name:8s} mean/n={a.mean() / n:.5f} var/n={v:.5f} +- {se:.5f}")


if __name__ == "__main__":
    main()
