"""Brute-force references, written without the package's lattice or Hensel code."""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form


def poly_value(coeffs, x):
    return sum(c * x**i for i, c in enumerate(coeffs))


def roots_mod(coeffs, p, K):
    """Every residue r mod p^K with f(r) = 0 mod p^K, by exhaustion."""
    m = p**K
    return [r for r in range(m) if poly_value(coeffs, r) % m == 0]


def is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def primes_to(n):
    return [q for q in range(2, n + 1) if is_prime(q)]


def vp(x, p):
    x = Fraction(x)
    if x == 0:
        return None
    v, a, b = 0, x.numerator, x.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


class IntegerLattice:
    """Full-rank sublattice of Z^n given by generating rows, via sympy's HNF."""

    def __init__(self, rows):
        self.n = len(rows[0])
        H = hermite_normal_form(Matrix(rows).T)  # column-style basis
        self.basis = H
        self.inv = H.inv()

    def contains(self, w):
        sol = self.inv * Matrix(list(w))
        return all(x.is_integer for x in sol)


def murley_local(chi, K, alpha, n, p):
    """p^L G_(p) ∩ Z^n (L = chi + K) from the literal generators p^{-chi} e_i and
    p^{-(k+chi)} (e_s + alpha_k e_{s+1}), k = 1..K; it contains p^L Z^n."""
    L = chi + K
    rows = [[p**L * int(i == j) for j in range(n)] for i in range(n)]
    rows += [[p**K * int(i == j) for j in range(n)] for i in range(n)]
    for k in range(1, K + 1):
        ak = alpha % p**k
        for s in range(n - 1):
            u = [0] * n
            u[s], u[s + 1] = 1, ak
            rows.append([x * p ** (K - k) for x in u])
    return IntegerLattice(rows), L


def oracle_height(chi, K, alpha, n, p, a):
    """Largest h with p^{-h} a in G_(p), or ('>=', cap) when membership holds at every testable h."""
    lat, L = murley_local(chi, K, alpha, n, p)
    m = min(vp(x, p) for x in a if x)
    cap = L + m  # p^{L-h} a stays integral for h <= cap
    h = -1
    for t in range(cap + 1):
        w = [x * p**L // p**t for x in a]
        if lat.contains(w):
            h = t
        else:
            break
    return ("saturated", cap) if h == cap else h


def box(n, bound):
    return product(range(-bound, bound + 1), repeat=n)


def roots_mod_np(coeffs, p, K):
    """Vectorized exhaustion over all residues mod p^K (p^K <= 10^6 keeps int64 exact)."""
    import numpy as np

    m = p**K
    x = np.arange(m, dtype=np.int64)
    acc = np.zeros(m, dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return [int(r) for r in np.flatnonzero(acc == 0)]


def rational_root(coeffs):
    """A rational root of an integer polynomial, or None (rational root theorem)."""
    a0, lead = coeffs[0], coeffs[-1]
    if a0 == 0:
        return Fraction(0)

    def divisors(n):
        n = abs(n)
        return [d for d in range(1, n + 1) if n % d == 0]

    for u in divisors(a0):
        for v in divisors(lead):
            for r in (Fraction(u, v), Fraction(-u, v)):
                if poly_value(coeffs, r) == 0:
                    return r
    return None
