"""dim E(l) minus the dimension of its intersection with the span of products s_a s_b."""

import argparse
import json

from toricforms.cli import parse_levels
from toricforms.toric import eisenstein_codimension


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", default="5-25")
    ap.add_argument("--json", action="store_true", help="one JSON object per level")
    args = ap.parse_args()
    for l in parse_levels([args.level]):
        res = eisenstein_codimension(l)
        if args.json:
            print(json.dumps({"level": l, **res}, sort_keys=True))
        else:
            print(f"l = {l:>2}: codimension {res['codimension']}  (E {res['eisensteinDim']}, products {res['toricDim']}, intersection {res['intersectionDim']})")


if __name__ == "__main__":
    main()
