"""Rank of the toric Eisenstein family against the cusp-count dimension, per level."""

import argparse

from toricforms.cli import parse_levels
from toricforms.qseries import EisBasis, default_precision


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", default="2-30")
    args = ap.parse_args()
    print(f"{'l':>3} {'prec':>5} {'expected':>8} {'toric':>5} {'final':>5} {'supplemented':>12}")
    for l in parse_levels([args.level]):
        prec = default_precision(l)
        b = EisBasis(l, prec)
        print(f"{l:>3} {prec:>5} {b.expected:>8} {b.toric_rank:>5} {b.rank:>5} {str(b.supplemented):>12}")


if __name__ == "__main__":
    main()
