"""Hom-rigidity of forged rank-2 schemes: self-maps are scalar, maps between distinct
seeds are zero, within a box of integer matrices.

Usage: python3 scripts/rigidity_demo.py [--seeds 1 2 3 4] [--bound 10] [--pmax 100]
"""
from __future__ import annotations

import argparse

from murley import groupforge as gf
from murley.padx import primes_upto
from murley.tcond import forge_family
from murley.typesys import TypeDescriptor


def scheme(seed: int, pmax: int, K: int) -> gf.GroupScheme:
    return gf.build_murley_scheme(TypeDescriptor.zero(), 2, forge_family(1, 5, primes_upto(pmax), K, seed), K)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--bound", type=int, default=10)
    ap.add_argument("--pmax", type=int, default=100)
    ap.add_argument("--prec", type=int, default=6)
    args = ap.parse_args(argv)
    schemes = {s: scheme(s, args.pmax, args.prec) for s in args.seeds}
    for a, sa in schemes.items():
        for b, sb in schemes.items():
            maps = gf.hom_search(sa, sb, args.bound)
            if maps == [((0, 0), (0, 0))]:
                kind = "zero only"
            else:
                kind = "scalar" if all(gf.is_scalar(m) for m in maps) else "NON-SCALAR"
            print(f"Hom({a} -> {b}): {len(maps)} matrices, {kind}")


if __name__ == "__main__":
    main()
