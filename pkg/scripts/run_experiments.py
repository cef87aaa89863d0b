#!/usr/bin/env python3
"""Run every config in scripts/configs (or the ones named) and summarise verdicts."""
import argparse
import sys
from pathlib import Path

from indseq.experiments import ExperimentConfig, run_experiment

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("configs", nargs="*")
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()
    paths = [Path(p) for p in args.configs] or sorted((HERE / "configs").glob("*.json"))
    ok = True
    for path in paths:
        cfg = ExperimentConfig.load(path)
        cfg.out = str(Path(args.out) / path.stem)
        rep = run_experiment(cfg, threads=args.threads)
        ok &= rep.passed
        print(f"{path.stem:22s} {'PASS' if rep.passed else 'FAIL'}  {rep.wall_clock_s:7.1f}s")
        for name, v in rep.verdicts.items():
            print(f"    {name:24s} {'ok ' if v['passed'] else 'BAD'} observed={v['observed']} tol={v['tolerance']}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
