"""For the zero type every prime is in P_0, so an irreducible f of degree >= 2 always
leaves uncovered primes: no field ring can be built. This scan counts them.

Usage: python3 scripts/coverage_scan.py [--bound 3] [--horizon 50] [--prec 4]
"""
from __future__ import annotations

import argparse
from collections import Counter
from itertools import product

from murley.padx import IntPolynomial
from murley.ringlab import fieldring_precondition, is_irreducible
from murley.typesys import TypeDescriptor


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=3)
    ap.add_argument("--horizon", type=int, default=50)
    ap.add_argument("--prec", type=int, default=4)
    args = ap.parse_args(argv)
    zero = TypeDescriptor.zero()
    total, rejected = 0, 0
    first_uncovered = Counter()
    for d in (2, 3):
        for lower in product(range(-args.bound, args.bound + 1), repeat=d):
            for lead in range(1, args.bound + 1):
                f = IntPolynomial(lower + (lead,))
                if not is_irreducible(f):
                    continue
                total += 1
                pre = fieldring_precondition(f, zero, args.horizon, args.prec)
                if pre.uncovered:
                    rejected += 1
                    first_uncovered[pre.uncovered[0]] += 1
    print(f"{rejected}/{total} irreducible polynomials of degree 2-3 rejected for the zero type")
    print("smallest uncovered prime:", dict(sorted(first_uncovered.items())))


if __name__ == "__main__":
    main()
