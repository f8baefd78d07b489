"""Truncated p-adic integers, integer polynomials and Hensel root finding.

A :class:`PadicApprox` is a residue modulo ``p**K``; it stands for every
p-adic integer with those first ``K`` digits.  Arithmetic on mixed precisions
silently truncates to the smaller one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from sympy import isprime, primerange


class IncompatiblePrimes(ValueError):
    pass


@dataclass(frozen=True)
class AtLeast:
    """Saturated value: the true quantity is ``>= bound`` (or infinite)."""

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"

    def to_json(self) -> str:
        return str(self)


def saturated(value) -> bool:
    return isinstance(value, AtLeast)


@dataclass(frozen=True)
class PadicApprox:
    p: int
    K: int
    r: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"precision must be positive, got {self.K}")
        if not 0 <= self.r < self.p**self.K:
            raise ValueError(f"residue {self.r} out of range mod {self.p}^{self.K}")

    @classmethod
    def of(cls, value: int, p: int, K: int) -> "PadicApprox":
        """Reduce an arbitrary integer (or p-integral fraction) mod p^K."""
        m = p**K
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ValueError(f"{value} is not {p}-integral")
            value = value.numerator * pow(value.denominator, -1, m)
        return cls(p, K, value % m)

    @property
    def modulus(self) -> int:
        return self.p**self.K

    def truncate(self, K: int) -> "PadicApprox":
        K = min(K, self.K)
        return PadicApprox(self.p, K, self.r % self.p**K)

    def digits(self) -> list[int]:
        out, r = [], self.r
        for _ in range(self.K):
            r, d = divmod(r, self.p)
            out.append(d)
        return out

    def _coerce(self, other):
        if isinstance(other, int):
            return self, PadicApprox.of(other, self.p, self.K)
        if other.p != self.p:
            raise IncompatiblePrimes(f"incompatible primes: {self.p} and {other.p}")
        K = min(self.K, other.K)
        return self.truncate(K), other.truncate(K)

    def __add__(self, other):
        return padic_arith(self, other, "add")

    def __sub__(self, other):
        return padic_arith(self, other, "sub")

    def __mul__(self, other):
        return padic_arith(self, other, "mul")

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return PadicApprox(self.p, self.K, (-self.r) % self.modulus)


def padic_arith(lhs: PadicApprox, rhs: PadicApprox | int, op: str) -> PadicApprox:
    a, b = lhs._coerce(rhs)
    m = a.modulus
    if op == "add":
        r = a.r + b.r
    elif op == "sub":
        r = a.r - b.r
    elif op == "mul":
        r = a.r * b.r
    else:
        raise ValueError(f"unknown op {op!r}")
    return PadicApprox(a.p, a.K, r % m)


def int_valuation(x: int, p: int) -> int | None:
    """v_p of a nonzero integer, None for zero."""
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def frac_valuation(x: Fraction, p: int) -> int | None:
    if x == 0:
        return None
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def padic_valuation(x: PadicApprox) -> int | AtLeast:
    if x.r == 0:
        return AtLeast(x.K)
    return int_valuation(x.r, x.p)


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients lowest degree first, trailing zeros trimmed."""

    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        cs = [int(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse ``"1,0,1"`` (lowest degree first) into x^2 + 1."""
        return cls(tuple(int(t) for t in text.split(",") if t.strip()))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        g = self.content()
        if g == 0:
            return self
        if self.lead < 0:
            g = -g
        return IntPolynomial(tuple(c // g for c in self.coeffs))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mod(self, x: int, m: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % m
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def reversed(self, degree: int | None = None) -> "IntPolynomial":
        """x^d f(1/x) with d = deg f unless given."""
        d = self.degree if degree is None else degree
        cs = list(self.coeffs) + [0] * (d + 1 - len(self.coeffs))
        return IntPolynomial(tuple(reversed(cs[: d + 1])))

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' if mono else ''}{mono}"
            terms.append(("-" if c < 0 else "+", body))
        s = "".join(f" {sgn} {b}" for sgn, b in terms).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def poly_eval_padic(f: IntPolynomial, x: PadicApprox) -> PadicApprox:
    return PadicApprox(x.p, x.K, f.eval_mod(x.r, x.modulus))


def _roots_mod_p(f: IntPolynomial, p: int) -> list[int]:
    return [r for r in range(p) if f.eval_mod(r, p) == 0]


def _newton_lift(f: IntPolynomial, df: IntPolynomial, r: int, p: int, K: int) -> int:
    # quadratic convergence: precision doubles each step
    k = 1
    while k < K:
        k = min(2 * k, K)
        m = p**k
        r = (r - f.eval_mod(r, m) * pow(df.eval_mod(r, m), -1, m)) % m
    return r


def hensel_lift_tree(f: IntPolynomial, p: int, K: int) -> tuple[list[int], list[int]]:
    """Roots of f mod p^K split by branch: (above simple roots, above non-simple roots).

    Simple roots mod p lift uniquely by Newton iteration.  Non-simple roots are
    extended digit by digit; every residue mod p^{j+1} that is a root lies over a
    root mod p^j, so the search is complete.  Work is bounded by p^K per prime.
    """
    if f.is_zero():
        raise ValueError("zero polynomial has no finite root set")
    df = f.derivative()
    simple: list[int] = []
    frontier: list[int] = []
    for r in _roots_mod_p(f, p):
        if df.eval_mod(r, p) != 0:
            simple.append(_newton_lift(f, df, r, p, K) if K > 1 else r)
        else:
            frontier.append(r)
    for j in range(1, K):
        pj, pj1 = p**j, p ** (j + 1)
        frontier = [
            r + d * pj for r in frontier for d in range(p) if f.eval_mod(r + d * pj, pj1) == 0
        ]
        if not frontier:
            break
    return sorted(simple), sorted(frontier)


def hensel_roots(f: IntPolynomial, p: int, K: int) -> list[PadicApprox]:
    simple, other = hensel_lift_tree(f, p, K)
    return [PadicApprox(p, K, r) for r in sorted(simple + other)]


def certified_roots(f: IntPolynomial, p: int, K: int) -> list[PadicApprox]:
    """Roots mod p^K that lie over a simple root mod p, hence over a true root in Z_p."""
    simple, _ = hensel_lift_tree(f, p, K)
    return [PadicApprox(p, K, r) for r in simple]


MEMBER, NON_MEMBER, UNDECIDED = "member", "non-member", "undecided"


def pf_verdict(f: IntPolynomial, p: int, K: int) -> str:
    """Three-valued membership of p in P(f) = {p : f has a root in Q_p}."""
    simple, other = hensel_lift_tree(f, p, K)
    if simple:
        return MEMBER
    undecided = bool(other)
    if f.lead % p == 0 and f.degree >= 1:
        # roots of negative valuation are roots beta = 1/alpha of the reversal with p | beta
        g = f.reversed()
        rs, ro = hensel_lift_tree(g, p, K)
        if any(r % p == 0 for r in rs):
            return MEMBER
        undecided = undecided or any(r % p == 0 for r in ro)
    return UNDECIDED if undecided else NON_MEMBER


@dataclass(frozen=True)
class PfReport:
    poly: IntPolynomial
    K: int
    verdicts: dict[int, str]

    @property
    def window(self) -> list[int]:
        return sorted(self.verdicts)

    def primes_with(self, verdict: str) -> list[int]:
        return [p for p in self.window if self.verdicts[p] == verdict]

    @property
    def members(self) -> list[int]:
        return self.primes_with(MEMBER)

    @property
    def non_members(self) -> list[int]:
        return self.primes_with(NON_MEMBER)

    @property
    def undecided(self) -> list[int]:
        return self.primes_with(UNDECIDED)

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.members), len(self.verdicts)) if self.verdicts else Fraction(0)

    def to_json(self) -> dict:
        return {
            "poly": list(self.poly.coeffs),
            "K": self.K,
            "verdicts": {str(p): v for p, v in sorted(self.verdicts.items())},
            "members": self.members,
            "non_members": self.non_members,
            "undecided": self.undecided,
            "density": str(self.density),
        }


def pf_scan(f: IntPolynomial, window: Iterable[int], K: int) -> PfReport:
    if f.degree < 1:
        raise ValueError("pf_scan needs a nonconstant polynomial")
    return PfReport(f, K, {p: pf_verdict(f, p, K) for p in sorted(set(window))})


def primes_upto(bound: int) -> list[int]:
    return list(primerange(2, bound + 1))


def check_prime(p: int) -> int:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    return p


def polys_from(seq: Sequence) -> IntPolynomial:
    return seq if isinstance(seq, IntPolynomial) else IntPolynomial(tuple(seq))
