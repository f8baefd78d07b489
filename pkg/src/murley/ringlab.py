"""Rings on finite-rank groups given by structure constants.

A ring is a rational table c[i][j][k] with e_i × e_j = sum_k c[i][j][k] e_k,
optionally attached to a group (any LocalGroup).  The ideal generated by g in a
commutative associative ring on G is (g) = Zg + g×G, and the ring is filial
iff (g) = (g)^2 + Zg for every g.  Both sides are compared prime by prime as
Z_(p)-lattices.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Sequence

import sympy

from murley.groupforge import FreeScheme, GroupScheme, LocalGroup, UnsupportedDenominator, alternating_poly
from murley.lattice import (
    LocalLattice,
    denominator_exponent,
    nullspace,
    rank_mod_p,
    scale,
    solve,
    vec,
)
from murley.padx import IntPolynomial, int_valuation, pf_scan
from murley.typesys import INF, TypeDescriptor, is_idempotent_type, split_p0_pinf


class NotDivisionAlgebra(ValueError):
    pass


class FieldRingError(ValueError):
    def __init__(self, message: str, prime: int | None = None):
        super().__init__(message)
        self.prime = prime


class PreconditionFailed(ValueError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class TheoryViolation(RuntimeError):
    pass


def _primes_of(x: Fraction) -> set[int]:
    x = Fraction(x)
    out = set()
    for part in (abs(x.numerator), x.denominator):
        if part > 1:
            out |= set(sympy.primefactors(part))
    return out


# ---------------------------------------------------------------------------
# structure constants


@dataclass(frozen=True, eq=False)
class RingStructure:
    n: int
    c: tuple  # c[i][j] is the coordinate vector of e_i × e_j
    group: LocalGroup | None = None
    closure: dict | None = None
    name: str = ""

    def __post_init__(self):
        c = tuple(tuple(vec(self.c[i][j]) for j in range(self.n)) for i in range(self.n))
        if len(self.c) != self.n or any(len(row) != self.n for row in self.c) or any(
            len(v) != self.n for row in c for v in row
        ):
            raise ValueError("structure constants need shape n x n x n")
        object.__setattr__(self, "c", c)
        if self.group is not None and self.group.n != self.n:
            raise ValueError("group rank differs from ring rank")

    @classmethod
    def zero(cls, n: int, group: LocalGroup | None = None) -> "RingStructure":
        z = tuple(Fraction(0) for _ in range(n))
        return cls(n, tuple(tuple(z for _ in range(n)) for _ in range(n)), group, name="zero")

    @classmethod
    def from_products(cls, n: int, products: dict, group=None, name: str = "") -> "RingStructure":
        """Table from {(i, j): vector}, 0-based; unspecified products are 0."""
        z = tuple(Fraction(0) for _ in range(n))
        c = [[products.get((i, j), z) for j in range(n)] for i in range(n)]
        return cls(n, tuple(tuple(r) for r in c), group, name=name)

    def with_group(self, group, closure=None) -> "RingStructure":
        return RingStructure(self.n, self.c, group, closure, self.name)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.c for v in row for x in v)

    def mul(self, u: Sequence, v: Sequence) -> tuple[Fraction, ...]:
        u, v = vec(u), vec(v)
        out = [Fraction(0)] * self.n
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in enumerate(v):
                if b == 0:
                    continue
                ab = a * b
                for k, x in enumerate(self.c[i][j]):
                    if x:
                        out[k] += ab * x
        return tuple(out)

    def left_rows(self, a: Sequence) -> list[tuple[Fraction, ...]]:
        """Rows a × e_j, j = 1..n; a × x = sum_j x_j row_j."""
        return [self.mul(a, self.basis(j)) for j in range(self.n)]

    def basis(self, j: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(i == j)) for i in range(self.n))

    def identity(self) -> tuple[Fraction, ...] | None:
        # solve e × e_j = e_j for all j: linear in the coordinates of e
        eqs, rhs = [], []
        for j in range(self.n):
            for k in range(self.n):
                eqs.append([self.c[i][j][k] for i in range(self.n)])
                rhs.append(Fraction(int(j == k)))
        aug = [r + [b] for r, b in zip(eqs, rhs)]
        sol = solve_least(aug, self.n)
        return sol

    def inverse(self, a: Sequence) -> tuple[Fraction, ...] | None:
        one = self.identity()
        if one is None:
            return None
        rows = self.left_rows(a)
        # a × x = sum_j x_j rows[j] = one
        mat = [[rows[j][k] for j in range(self.n)] for k in range(self.n)]
        return solve(mat, one)

    @cached_property
    def is_field_type(self) -> bool:
        """Commutative, associative, unital and Q-algebra a field (found via a primitive element)."""
        if self.is_zero() or not assoc_comm_check(self).passed or self.identity() is None:
            return False
        x = sympy.Symbol("x")
        for coeffs in itertools.product(range(-1, 3), repeat=self.n):
            if not any(coeffs):
                continue
            rows = self.left_rows(coeffs)
            m = sympy.Matrix(self.n, self.n, lambda r, s: sympy.Rational(rows[s][r].numerator, rows[s][r].denominator))
            cp = sympy.Poly(m.charpoly(x).as_expr(), x)
            if cp.degree() == self.n and cp.is_irreducible:
                return True
        return False

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "name": self.name,
            "c": [[[str(x) for x in v] for v in row] for row in self.c],
            "closure": self.closure if self.closure is not None else {"verified": False},
        }

    @classmethod
    def from_json(cls, d: dict, group=None) -> "RingStructure":
        c = tuple(tuple(tuple(Fraction(x) for x in v) for v in row) for row in d["c"])
        closure = d.get("closure")
        return cls(int(d["n"]), c, group, closure if closure and closure.get("verified") else None, d.get("name", ""))


def solve_least(aug: list[list[Fraction]], n: int) -> tuple[Fraction, ...] | None:
    """Unique solution of an overdetermined consistent system given as augmented rows."""
    from murley.lattice import rref

    red, pivots = rref(aug, n + 1)
    if n in pivots or len(pivots) < n:
        return None
    return tuple(r[n] for r in red[:n])


@dataclass(frozen=True)
class AssocCommReport:
    associative: bool
    commutative: bool
    violation: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.associative and self.commutative

    def to_json(self) -> dict:
        return {
            "associative": self.associative,
            "commutative": self.commutative,
            "violation": list(self.violation) if self.violation else None,
        }


def assoc_comm_check(r: RingStructure) -> AssocCommReport:
    n = r.n
    comm, assoc, violation = True, True, None
    for i, j in itertools.product(range(n), repeat=2):
        if r.c[i][j] != r.c[j][i]:
            comm = False
            violation = violation or ("commutativity", i + 1, j + 1)
    for i, j, k in itertools.product(range(n), repeat=3):
        left = r.mul(r.c[i][j], r.basis(k))
        right = r.mul(r.basis(i), r.c[j][k])
        if left != right:
            assoc = False
            violation = violation or ("associativity", i + 1, j + 1, k + 1)
    return AssocCommReport(assoc, comm, violation)


@dataclass(frozen=True)
class RadicalSplit:
    semisimple_dim: int
    nilradical: tuple[tuple[Fraction, ...], ...]
    trace_form: tuple[tuple[Fraction, ...], ...]

    def to_json(self) -> dict:
        return {
            "semisimple_dim": self.semisimple_dim,
            "nilradical": [[str(x) for x in v] for v in self.nilradical],
        }


def trace_form(r: RingStructure) -> list[list[Fraction]]:
    def tr(x):
        rows = r.left_rows(x)
        return sum((rows[j][j] for j in range(r.n)), Fraction(0))

    return [[tr(r.c[i][j]) for j in range(r.n)] for i in range(r.n)]


def radical_split(r: RingStructure) -> RadicalSplit:
    """Nilradical = kernel of the trace form (commutative algebras over Q)."""
    rep = assoc_comm_check(r)
    if not rep.passed:
        raise ValueError(f"radical split needs a commutative associative table: {rep.violation}")
    T = trace_form(r)
    ker = nullspace(T, r.n)
    return RadicalSplit(r.n - len(ker), tuple(ker), tuple(tuple(row) for row in T))


def is_nilpotent(r: RingStructure) -> int | None:
    """Nilpotency index t (R^t = 0, R^{t-1} != 0) of the rational algebra, None if not nilpotent."""
    span = [r.basis(i) for i in range(r.n)]
    t = 1
    while span:
        if t > r.n + 1:
            return None
        prods = [r.mul(x, r.basis(j)) for x in span for j in range(r.n)]
        prods = [p for p in prods if any(p)]
        t += 1
        if not prods:
            return t
        from murley.lattice import rref

        span = [tuple(row) for row in rref(prods, r.n)[0]]
        if len(span) == r.n and t > 2:
            return None
    return t


def power_spans(r: RingStructure) -> list[list[tuple[Fraction, ...]]]:
    """Spanning products for R^1, R^2, ...: R^{j+1} = R^j × R, products of basis vectors."""
    levels = [[r.basis(i) for i in range(r.n)]]
    while True:
        prods = []
        for x in levels[-1]:
            for j in range(r.n):
                p = r.mul(x, r.basis(j))
                if any(p) and p not in prods:
                    prods.append(p)
        if not prods or len(levels) > r.n + 1:
            break
        levels.append(prods)
    return levels


# ---------------------------------------------------------------------------
# standard examples


def zsqrt2_ring() -> RingStructure:
    """Z[√2] with e1 = 1, e2 = √2."""
    one, s2 = (1, 0), (0, 1)
    table = {(0, 0): one, (0, 1): s2, (1, 0): s2, (1, 1): (2, 0)}
    return RingStructure.from_products(2, table, FreeScheme(TypeDescriptor.zero(), 2, 8), "Z[sqrt2]")


def gaussian_ring() -> RingStructure:
    table = {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (-1, 0)}
    return RingStructure.from_products(2, table, FreeScheme(TypeDescriptor.zero(), 2, 8), "Z[i]")


def z_one_fifth_ring(K: int = 6) -> RingStructure:
    t = TypeDescriptor(entries={5: INF}, default=0)
    return RingStructure.from_products(1, {(0, 0): (1,)}, FreeScheme(t, 1, K, (2, 3, 5)), "Z[1/5]")


def zero_ring(n: int, group: LocalGroup | None = None) -> RingStructure:
    group = group or FreeScheme(TypeDescriptor.zero(), n, 8)
    return RingStructure.zero(n, group)


def poly_ring_table(g: IntPolynomial) -> tuple:
    """Table of Q[y]/(g) on e_i = y^{i-1}."""
    n = g.degree
    lead = Fraction(g.lead)

    def reduce(power: int) -> list[Fraction]:
        coeffs = [Fraction(0)] * (power + 1)
        coeffs[power] = Fraction(1)
        for d in range(power, n - 1, -1):
            top = coeffs[d]
            if top == 0:
                continue
            coeffs[d] = Fraction(0)
            for i, gi in enumerate(g.coeffs[:-1]):
                coeffs[d - n + i] -= top * gi / lead
        return (coeffs + [Fraction(0)] * n)[:n]

    return tuple(tuple(tuple(reduce(i + j)) for j in range(n)) for i in range(n))


def reversed_normalized(f: IntPolynomial) -> IntPolynomial:
    """g(y) = y^n f(-1/y), primitive with positive leading coefficient."""
    n = f.degree
    coeffs = [0] * (n + 1)
    for i, a in enumerate(f.coeffs):
        coeffs[n - i] = a * (-1) ** i
    return IntPolynomial(tuple(coeffs)).primitive()


# ---------------------------------------------------------------------------
# field rings on Murley schemes


@dataclass(frozen=True)
class FieldRingPrecondition:
    poly: IntPolynomial
    irreducible: bool
    idempotent: bool
    p0: tuple[int, ...]
    uncovered: tuple[int, ...]  # P_0 primes where f has no root in Q_p
    undecided: tuple[int, ...]
    accepted: bool

    def to_json(self) -> dict:
        return {
            "poly": list(self.poly.coeffs),
            "irreducible": self.irreducible,
            "idempotent": self.idempotent,
            "p0": list(self.p0),
            "uncovered": list(self.uncovered),
            "undecided": list(self.undecided),
            "accepted": self.accepted,
        }


def is_irreducible(f: IntPolynomial) -> bool:
    x = sympy.Symbol("x")
    return f.degree >= 1 and sympy.Poly(sum(c * x**i for i, c in enumerate(f.coeffs)), x).is_irreducible


def fieldring_precondition(f: IntPolynomial, t: TypeDescriptor, horizon: int, K: int) -> FieldRingPrecondition:
    """The type must be idempotent and its P_0 primes up to the horizon must lie in P(f)."""
    p0, _ = split_p0_pinf(t, max(horizon, *t.window) if t.window else horizon)
    scan = pf_scan(f, p0, K) if p0 and f.degree >= 1 else None
    uncovered = tuple(scan.non_members) if scan else ()
    undecided = tuple(scan.undecided) if scan else ()
    irr = is_irreducible(f)
    idem = is_idempotent_type(t)
    return FieldRingPrecondition(f, irr, idem, tuple(p0), uncovered, undecided, irr and idem and not uncovered)


def _same_poly(a: IntPolynomial, b: IntPolynomial) -> bool:
    return a.primitive() == b.primitive()


def delta_ideal_test(r: RingStructure, s: GroupScheme) -> int | None:
    """First P_0 window prime where u_s × e_j leaves delta_p mod p^K, or None."""
    for p in s.p0:
        a = s.alpha(p)
        M = p**s.K
        for sidx in range(s.n - 1):
            u = [0] * s.n
            u[sidx], u[sidx + 1] = 1, a
            for j in range(s.n):
                w = r.mul(u, r.basis(j))
                d = denominator_exponent(w, p)
                scaled = [x * p**d for x in w]
                ints = [x.numerator * pow(x.denominator, -1, M) % M for x in scaled]
                val = alternating_poly(ints).eval_mod(a, M)
                if val and int_valuation(val, p) < s.K - d:
                    return p
    return None


def closure_certificate(r: RingStructure, primes=None) -> dict:
    """Smallest m = prod p^{e_p} with m (x × y) in G for generators x, y at half precision.

    Generators of T_h with h = floor(max_level / 2) are used so that every
    product has denominator exponent at most max_level and membership is exact.
    """
    G = r.group
    if G is None:
        return {"verified": False}
    primes = sorted(set(primes if primes is not None else G.window))
    for row in r.c:
        for v in row:
            for x in v:
                primes = sorted(set(primes) | _primes_of(Fraction(x.denominator)))
    per_prime, exact = {}, True
    for p in primes:
        try:
            if G.chi(p) == INF:
                continue  # G_(p) is a Q-space: closed under any table
            top = G.max_level(p)
        except UnsupportedDenominator:
            exact = False
            continue
        dc = max(denominator_exponent(v, p) for row in r.c for v in row)
        h = max(0, (top - dc) // 2)
        gens = G.truncated(p, h).rows
        e = 0
        for x, y in itertools.combinations_with_replacement(gens, 2):
            z = r.mul(x, y)
            if not any(z):
                continue
            if denominator_exponent(z, p) > top:
                exact = False
                continue
            while not G.local_membership(scale(p**e, z), p):
                e += 1
        if e:
            per_prime[p] = e
    m = 1
    for p, e in per_prime.items():
        m *= p**e
    return {"verified": exact, "m": str(m), "per_prime": {str(p): e for p, e in sorted(per_prime.items())}}


def field_ring_from_poly(f: IntPolynomial, s: GroupScheme) -> RingStructure:
    """Multiplication of Q[y]/(g), g(y) = y^n f(-1/y), on the scheme's basis e_i = y^{i-1}.

    With this basis delta_p = <e_s + alpha_p e_{s+1}> is the kernel of
    evaluation at y = -1/alpha_p, hence an ideal; the ideal test re-checks it
    mod p^K at every P_0 window prime.
    """
    if f.degree != s.n:
        raise FieldRingError(f"degree {f.degree} differs from rank {s.n}")
    if not is_irreducible(f):
        raise FieldRingError(f"{f} is reducible")
    if s.n > 1:
        prov = s.fam.provenance if s.fam is not None else None
        if prov is None or prov.kind != "hensel" or not _same_poly(prov.poly, f):
            raise PreconditionFailed("the scheme's family must consist of roots of f")
    pre = fieldring_precondition(f, s.t, max(s.window), s.K)
    if not pre.accepted:
        raise PreconditionFailed(
            f"precondition fails: idempotent={pre.idempotent}, uncovered P_0 primes {list(pre.uncovered)}", pre
        )
    g = reversed_normalized(f)
    r = RingStructure(s.n, poly_ring_table(g), s, name=f"field ring of {f}")
    bad = delta_ideal_test(r, s) if s.n > 1 else None
    if bad is not None:
        raise FieldRingError(f"delta_p is not an ideal at p={bad}", bad)
    cert = closure_certificate(r)
    r = r.with_group(s, cert)
    check_closed_ring_facets(r)
    return r


def check_closed_ring_facets(r: RingStructure) -> None:
    """A closure-certified nonzero ring on a Murley group is commutative, associative, not nilpotent."""
    if r.closure is None or not r.closure.get("verified") or r.is_zero():
        return
    rep = assoc_comm_check(r)
    if not rep.passed:
        raise TheoryViolation(f"closed ring fails associativity/commutativity: {rep.violation}")
    split = radical_split(r)
    if split.nilradical:
        raise TheoryViolation(f"closed ring has nonzero nilradical of dimension {len(split.nilradical)}")


# ---------------------------------------------------------------------------
# ideals and filiality


def _exact_local(G: LocalGroup, p: int) -> LocalLattice | None:
    """G_(p) itself when it is finitely generated (no infinite height at p)."""
    if isinstance(G, FreeScheme):
        chi = G.chi(p)
        return None if chi == INF else LocalLattice.standard(p, G.n, chi)
    if isinstance(G, GroupScheme):
        chi = G.chi(p)
        if chi != INF and G.n == 1:
            return LocalLattice.standard(p, 1, chi)
        return None
    from murley.groupforge import ProchazkaGroup

    if isinstance(G, ProchazkaGroup) and G.direction(p) is None:
        return LocalLattice.standard(p, 2, 0)
    return None


@dataclass(frozen=True)
class IdealLattice:
    g: tuple[Fraction, ...]
    p: int
    lattice: LocalLattice
    level: int | None  # None when exact, else the truncation level of G used
    iterations: int

    def to_json(self) -> dict:
        return {"g": [str(x) for x in self.g], "p": self.p, "level": self.level,
                "iterations": self.iterations, "lattice": self.lattice.to_json()}


def _local_source(r: RingStructure, p: int, level: int | None = None):
    G = r.group
    exact = _exact_local(G, p)
    if exact is not None:
        return exact, None
    k = G.max_level(p) if level is None else level
    return G.truncated(p, k), k


def ideal_lattice(r: RingStructure, g: Sequence, p: int, level: int | None = None) -> IdealLattice:
    """(g) at p as the fixed point of L -> L + L × G starting from Z_(p) g.

    Where G_(p) is not finitely generated the level-k lattice Zg + g×T_k is
    returned instead (level records k).
    """
    g = vec(g)
    if r.group is None:
        raise ValueError("ring has no group attached")
    if not r.group.local_membership(g, p):
        raise ValueError("g is not in the group")
    src, k = _local_source(r, p, level)
    L = LocalLattice(p, r.n, [g])
    if k is not None:
        # T_k is not multiplicatively closed; Zg + g×T_k is the level-k ideal
        L = L + LocalLattice(p, r.n, [r.mul(g, y) for y in src.rows])
        return IdealLattice(g, p, L, k, 1)
    it = 0
    while True:
        new = L + LocalLattice(p, r.n, [r.mul(x, y) for x in L.rows for y in src.rows])
        it += 1
        if new == L:
            break
        L = new
        if it > r.n + 2:
            raise RuntimeError("ideal closure did not stabilize")
    return IdealLattice(g, p, L, k, it - 1)


def _square_plus(r: RingStructure, I: LocalLattice, g) -> LocalLattice:
    prods = [r.mul(x, y) for x, y in itertools.combinations_with_replacement(I.rows, 2)]
    return LocalLattice(I.p, r.n, prods + [g])


HOLDS, FAILS, UNDECIDED = "holds at precision", "fails with witness", "undecided at precision"


@dataclass(frozen=True)
class FilialVerdict:
    verdict: str
    g: tuple[Fraction, ...]
    per_prime: dict  # p -> {"verdict", "level", "cap", "witness"}
    witness: tuple | None = None  # (p, vector in (g) but not in (g)^2 + Zg)
    m: int | None = None
    m_exact: bool = True

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "g": [str(x) for x in self.g],
            "per_prime": {str(p): v for p, v in sorted(self.per_prime.items())},
            "witness": None if self.witness is None else {"p": self.witness[0], "v": [str(x) for x in self.witness[1]]},
            "m": None if self.m is None else str(self.m),
            "m_exact": self.m_exact,
        }


def probe_primes(r: RingStructure, g) -> list[int]:
    """Primes where (g) and (g)^2 + Zg can differ when L_g is invertible, plus the window."""
    out = set(r.group.window)
    for x in g:
        out |= _primes_of(Fraction(x))
    for row in r.c:
        for v in row:
            for x in v:
                out |= _primes_of(Fraction(x.denominator))
    rows = r.left_rows(g)
    det = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows]).det()
    if det != 0:
        out |= _primes_of(Fraction(int(det.p), int(det.q)))
    else:
        out |= {2, 3, 5, 7}
    return sorted(out)


def _filial_at(r: RingStructure, g, p: int) -> dict:
    G = r.group
    exact = _exact_local(G, p)
    if exact is not None:
        I = ideal_lattice(r, g, p).lattice
        J = _square_plus(r, I, g)
        miss = J.first_missing(I)
        if miss is None:
            return {"verdict": HOLDS, "level": None, "cap": None}
        return {"verdict": FAILS, "level": None, "cap": None, "witness": miss}
    ginv = r.inverse(g)
    if ginv is None:
        return {"verdict": UNDECIDED, "reason": "g not invertible over an infinite localization"}
    k = G.max_level(p)
    e = denominator_exponent([x for row in r.left_rows(ginv) for x in row], p)
    one = r.identity()
    c = k - 2 * e
    if c < denominator_exponent(g, p) or denominator_exponent(one, p) > k or denominator_exponent(ginv, p) > k:
        return {"verdict": UNDECIDED, "reason": "precision too low", "level": k, "cap": c}
    I = ideal_lattice(r, g, p, k).lattice
    J = _square_plus(r, I, g)
    Ic, Jc = I.truncate(c), J.truncate(c)
    miss = Jc.first_missing(Ic)
    if miss is None:
        return {"verdict": HOLDS, "level": k, "cap": c}
    return {"verdict": FAILS, "level": k, "cap": c, "witness": miss}


def minimal_multiplier(r: RingStructure, g) -> tuple[int | None, bool]:
    """Smallest m (window-supported where decidable) with m g^{-1} in G, i.e. m g in G×g^2."""
    ginv = r.inverse(g)
    if ginv is None:
        return None, False
    G = r.group
    primes = set()
    for x in ginv:
        primes |= _primes_of(Fraction(x.denominator))
    m, exact = 1, True
    for p in sorted(primes):
        d = denominator_exponent(ginv, p)
        try:
            e = 0
            while e <= d and not G.local_membership(scale(p**e, ginv), p):
                e += 1
        except UnsupportedDenominator:
            e, exact = d, False
        m *= p**e
    return m, exact


def filial_probe(r: RingStructure, g: Sequence, primes=None) -> FilialVerdict:
    """Check (g) = (g)^2 + Zg prime by prime.

    Where G_(p) is finitely generated both sides are exact lattices.  Where it
    is not, g must be invertible: with k the top exact level of G and e the
    denominator exponent of multiplication by g^{-1}, every element of (g) or
    (g)^2 + Zg of denominator exponent <= k - 2e comes from T_k, so the two
    sides are compared exactly below that cap.
    """
    g = vec(g)
    if r.group is None:
        raise ValueError("ring has no group attached")
    if not assoc_comm_check(r).passed:
        raise ValueError("filial probe needs a commutative associative ring")
    primes = sorted(set(primes)) if primes is not None else probe_primes(r, g)
    per, witness = {}, None
    for p in primes:
        try:
            res = _filial_at(r, g, p)
        except UnsupportedDenominator:
            continue
        if "witness" in res:
            if witness is None:
                witness = (p, res["witness"])
            res = dict(res, witness=[str(x) for x in res["witness"]])
        per[p] = res
    verdicts = {v["verdict"] for v in per.values()}
    verdict = FAILS if FAILS in verdicts else UNDECIDED if UNDECIDED in verdicts else HOLDS
    m, m_exact = (None, True)
    if r.is_field_type and any(g):
        m, m_exact = minimal_multiplier(r, g)
    return FilialVerdict(verdict, g, per, witness, m, m_exact)


# ---------------------------------------------------------------------------
# non-filial witnesses


@dataclass(frozen=True)
class WitnessCertificate:
    p: int
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    n: int
    k: int
    h: tuple[Fraction, ...]  # n a^{-1} × b, so that (p^k a) × h = p^k n b
    z: tuple[Fraction, ...]  # p^k n b
    ideal: LocalLattice  # (p^k a) at p
    square_plus: LocalLattice  # (p^k a)^2 + Z p^k a at p

    def to_json(self) -> dict:
        s = lambda v: [str(x) for x in v]  # noqa: E731
        return {
            "p": self.p, "a": s(self.a), "b": s(self.b), "n": str(self.n), "k": self.k,
            "h": s(self.h), "z": s(self.z),
            "ideal": self.ideal.to_json(), "square_plus": self.square_plus.to_json(),
        }


def nonfilial_witness(r: RingStructure, p: int) -> WitnessCertificate | None:
    """Elements a, b independent mod p with p^k n b in (p^k a) but not in (p^k a)^2 + Z p^k a."""
    G = r.group
    if G is None:
        raise ValueError("ring has no group attached")
    if G.lattice_p_rank(p) < 2:
        return None
    one = r.identity()
    if one is None:
        raise NotDivisionAlgebra("not division-algebra type")
    if _exact_local(G, p) is None:
        return None
    # integer candidates: basis vectors, then small combinations
    cands = [r.basis(i) for i in range(r.n)] + [vec(c) for c in itertools.product(range(-1, 2), repeat=r.n) if any(c)]
    invertible = [a for a in cands if r.inverse(a) is not None]
    if not invertible:
        raise NotDivisionAlgebra("not division-algebra type")
    for a in invertible:
        ainv = r.inverse(a)
        n = 1
        for x in ainv:
            n = n * x.denominator // gcd(n, x.denominator)
        if not G.contains(scale(n, ainv)):
            continue
        k = (int_valuation(n, p) or 0) + 1
        x = scale(p**k, a)
        for b in cands:
            if not p_independent(a, b, p):
                continue
            h = r.mul(scale(n, ainv), b)
            z = scale(p**k * n, b)
            if not G.contains(h) or r.mul(x, h) != z:
                continue
            I = ideal_lattice(r, x, p).lattice
            J = _square_plus(r, I, x)
            if I.contains(z) and not J.contains(z):
                return WitnessCertificate(p, a, b, n, k, h, z, I, J)
    return None


def p_independent(a, b, p: int) -> bool:
    """Integer vectors whose residues mod p have rank 2."""
    return rank_mod_p([[int(x) for x in a], [int(x) for x in b]], p) == 2


def verify_witness(r: RingStructure, cert: WitnessCertificate) -> bool:
    """Re-check a certificate from its data: product identity, membership, non-membership."""
    p, k, n = cert.p, cert.k, cert.n
    if n % p**k == 0:
        return False
    x = scale(p**k, cert.a)
    if r.mul(x, cert.h) != cert.z or cert.z != scale(p**k * n, cert.b):
        return False
    if not r.group.contains(cert.h) or not r.group.contains(cert.a) or not r.group.contains(cert.b):
        return False
    fresh_I = ideal_lattice(r, x, p).lattice
    fresh_J = _square_plus(r, fresh_I, x)
    return (
        fresh_I == cert.ideal
        and fresh_J == cert.square_plus
        and fresh_I.contains(cert.z)
        and not fresh_J.contains(cert.z)
    )


# ---------------------------------------------------------------------------
# falsifier: nilpotent filial rings should not exist


def _monomial_set(rng: random.Random, n: int) -> list[tuple[int, ...]]:
    """Division-closed set of n monomials of positive degree containing a product."""
    v = rng.randint(1, max(1, min(2, n - 1)))
    S = [tuple(int(i == j) for j in range(v)) for i in range(v)]
    while len(S) < n:
        cands = set()
        for m in S:
            for i in range(v):
                m2 = tuple(e + (j == i) for j, e in enumerate(m))
                if m2 in S:
                    continue
                divisors = [tuple(e - (j == i2) for j, e in enumerate(m2)) for i2 in range(v) if m2[i2]]
                if all(d in S or not any(d) for d in divisors):
                    cands.add(m2)
        S.append(rng.choice(sorted(cands)))
    return sorted(S, key=lambda m: (sum(m), m))


def random_nilpotent_table(rng: random.Random, n: int) -> RingStructure:
    S = _monomial_set(rng, n)
    index = {m: i for i, m in enumerate(S)}
    lam = rng.choice([1, 2, 3, -1, -2, 5])
    base = {}
    for i, a in enumerate(S):
        for j, b in enumerate(S):
            m = tuple(x + y for x, y in zip(a, b))
            if m in index:
                base[(i, j)] = tuple(lam * int(k == index[m]) for k in range(n))
    R0 = RingStructure.from_products(n, base)
    # flag-preserving unipotent change: f_i = e_i + sum_{deg m_j > deg m_i} u_ij e_j
    U = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if sum(S[j]) > sum(S[i]):
                U[i][j] = Fraction(rng.randint(-2, 2))
    Uinv_T = [list(row) for row in _inverse([list(r) for r in zip(*U)])]
    prods = {}
    for i in range(n):
        for j in range(n):
            prod_e = R0.mul(U[i], U[j])  # coordinates in e
            prods[(i, j)] = tuple(sum(Uinv_T[k][l] * prod_e[l] for l in range(n)) for k in range(n))
    return RingStructure.from_products(n, prods, FreeScheme(TypeDescriptor.zero(), n, 8), "nilpotent")


def _inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    from murley.lattice import rref

    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, _ = rref(aug, 2 * n)
    return [row[n:] for row in red]


def falsifier_candidates(r: RingStructure) -> list[tuple[tuple[Fraction, ...], int]]:
    """Guided first: g = p x with x in R^{t-2} and x × R != 0; then small multiples of basis vectors."""
    levels = power_spans(r)
    out = []
    t = len(levels) + 1  # R^t = 0
    guide = levels[t - 3] if t >= 3 else levels[0]
    for x in guide:
        if any(any(r.mul(x, r.basis(j))) for j in range(r.n)):
            den = 1
            for v in x:
                den = den * v.denominator // gcd(den, v.denominator)
            for p in (2, 3):
                out.append((scale(p * den, x), p))
    for i in range(r.n):
        for p in (2, 3):
            out.append((scale(p, r.basis(i)), p))
    return out


@dataclass(frozen=True)
class FalsifierReport:
    seed: int
    trials: tuple[dict, ...]
    counterexamples: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {"seed": self.seed, "trials": list(self.trials), "counterexamples": list(self.counterexamples),
                "passed": self.passed}


def nilpotent_filial_falsifier(seed: int, trials: int, ranks=(2, 3, 4), budget: int = 40) -> FalsifierReport:
    """Random nonzero nilpotent commutative tables; each must fail the filiality criterion somewhere."""
    rng = random.Random(seed)
    rows, bad = [], []
    for t in range(trials):
        n = rng.choice(list(ranks))
        r = random_nilpotent_table(rng, n)
        if r.is_zero():
            continue
        if not assoc_comm_check(r).passed or is_nilpotent(r) is None:
            raise TheoryViolation("generator produced a non-nilpotent or non-associative table")
        found = None
        for g, p in falsifier_candidates(r)[:budget]:
            v = filial_probe(r, g, primes=[p])
            if v.verdict == FAILS:
                found = {"g": [str(x) for x in g], "p": p, "witness": [str(x) for x in v.witness[1]]}
                break
        entry = {"trial": t, "n": n, "c": r.to_json()["c"], "failure": found}
        rows.append(entry)
        if found is None:
            bad.append(entry)
    return FalsifierReport(seed, tuple(rows), tuple(bad))
