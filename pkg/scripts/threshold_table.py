#!/usr/bin/env python3
"""Print the closed-form constants and threshold crossings."""
import math

from indseq import constants as C


def main():
    c = C.solve_rho()
    print(f"rho            {c.rho:.10f}")
    print(f"mean corr      {c.mean_correction:.6f}   var rate {c.variance_rate:.6f} (squared {c.variance_rate_squared:.6f})")
    inc, dec = C.tree_unimodality_thresholds()
    print(f"tree           increasing below {inc:.6f}, decreasing above {dec:.6f}")
    for d in (1.0, 2.0, math.e):
        k = C.karp_constants(d)
        left, right = C.er_low_degree_thresholds(d)
        print(f"d={d:.4f}     a={k.a:.6f} b={k.b:.6f} beta={k.independent_fraction:.6f} "
              f"left={left:.5f} right={right}")
    for d in (10.0, 100.0, math.e ** math.e):
        print(f"frieze d={d:8.3f}  beta={C.frieze_beta(d):.6f}")
    for a in (0.01, 0.05, 0.1):
        print(f"dani alpha={a}  d >= {C.dani_degree_bound(a):.3f}")


if __name__ == "__main__":
    main()
