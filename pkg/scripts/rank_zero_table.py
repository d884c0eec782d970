"""Tabulate the two rank-zero dimensions, the Gamma_0 averaged span and the L-value oracle."""

import argparse
import time

from toricforms.cli import parse_levels
from toricforms.lvalues import nonvanishing_count
from toricforms.manin import build_space
from toricforms.toric import gamma0_products_dim, rank_zero_dims


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", default="11-25")
    ap.add_argument("--budget", type=int, default=200)
    args = ap.parse_args()
    print(f"{'l':>3} {'genus':>5} {'toric':>5} {'winding':>7} {'gamma0':>6} {'L!=0':>5} {'agree':>5} {'sec':>6}")
    for l in parse_levels([args.level]):
        t0 = time.perf_counter()
        rep = rank_zero_dims(l, budget=args.budget)
        g0 = gamma0_products_dim(l)
        nv = nonvanishing_count(l)
        genus = build_space(l, "S+").dim
        dt = time.perf_counter() - t0
        print(f"{l:>3} {genus:>5} {rep.toric_dim:>5} {rep.winding_dim:>7} {g0:>6} {nv:>5} {str(rep.agree):>5} {dt:>6.1f}")


if __name__ == "__main__":
    main()
