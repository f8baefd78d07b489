"""Density of P(f) among primes up to a growing bound, next to the Chebotarev prediction.

Usage: python3 scripts/density_scan.py [--bounds 100 500 2000] [--prec 4]
"""
from __future__ import annotations

import argparse
import json

from murley.padx import IntPolynomial, pf_scan, primes_upto

# polynomial -> expected proportion of primes with a root (Galois group heuristics)
CASES = {
    "1,0,1": 1 / 2,  # x^2 + 1, C2
    "-2,0,1": 1 / 2,  # x^2 - 2, C2
    "-2,0,0,1": 2 / 3,  # x^3 - 2, S3: an identity or a transposition fixes a root
    "1,1,1": 1 / 2,  # x^2 + x + 1, C2
    "-1,-1,0,1": 2 / 3,  # x^3 - x - 1, S3
}


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bounds", type=int, nargs="+", default=[100, 500, 2000])
    ap.add_argument("--prec", type=int, default=4)
    args = ap.parse_args(argv)
    rows = []
    for text, expected in CASES.items():
        f = IntPolynomial.parse(text)
        for bound in args.bounds:
            rep = pf_scan(f, primes_upto(bound), args.prec)
            rows.append({"poly": text, "bound": bound, "density": round(float(rep.density), 4),
                         "expected": round(expected, 4), "undecided": rep.undecided})
            print(f"{text:>12}  p<={bound:<6} density {float(rep.density):.3f}  expected {expected:.3f}"
                  f"  undecided {rep.undecided}")
    print(json.dumps(rows))


if __name__ == "__main__":
    main()
