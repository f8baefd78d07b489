"""Torsion-free groups of finite rank described prime by prime.

A group G inside Q^n is given by its localizations G_(p).  At each prime the
finite-precision view is the chain T_c = G_(p) ∩ p^{-c} Z_(p)^n, which every
class below computes exactly for c <= max_level(p).

The main construction is the Murley scheme: given a type t with
characteristic chi and a family {alpha_p}, G is generated by the vectors
p^{-chi_p} e_i, by p^{-inf} e_i for chi_p = inf, and by

    x_{p,s}^{(k)} = p^{-(k + chi_p)} (e_s + alpha_{p,k} e_{s+1}),   1 <= s < n,

where alpha_{p,k} is alpha_p mod p^k.  Its q.d. invariant at p is spanned by
u_{p,s} = e_s + alpha_p e_{s+1}, so the p-rank is 1 on P_0 and 0 on P_inf.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from murley.lattice import (
    LocalLattice,
    congruence_lattice,
    denominator_exponent,
    rank_mod_p,
    scale,
    short_vectors,
    vec,
)
from murley.padx import AtLeast, IntPolynomial, check_prime, frac_valuation, int_valuation, primes_upto
from murley.tcond import AlphaFamily, ConditionTReport, check_condition_T
from murley.typesys import INF, TypeDescriptor


class UnsupportedDenominator(ValueError):
    pass


class SchemeRejected(ValueError):
    def __init__(self, message: str, witness: IntPolynomial | None = None, report=None):
        super().__init__(message)
        self.witness = witness
        self.report = report


def alternating_poly(w: Sequence[int]) -> IntPolynomial:
    """f_w(x) = sum_i w_i (-x)^{n-i}: f_w(alpha) = 0 iff w lies in span{e_s + alpha e_{s+1}}."""
    n = len(w)
    coeffs = [0] * n
    for i, wi in enumerate(w, start=1):
        e = n - i
        coeffs[e] += int(wi) * (-1) ** e
    return IntPolynomial(tuple(coeffs))


def _valuation_min(v: Sequence[Fraction], p: int) -> int:
    return min(frac_valuation(Fraction(x), p) for x in v if x != 0)


class LocalGroup:
    """Common queries for groups described by their truncated localizations."""

    n: int
    K: int
    window: tuple[int, ...]

    def chi(self, p: int):
        raise NotImplementedError

    def max_level(self, p: int) -> int:
        raise NotImplementedError

    def truncated(self, p: int, c: int | None = None) -> LocalLattice:
        raise NotImplementedError

    def _check_prime(self, p: int) -> None:
        check_prime(p)

    # -- membership and heights ---------------------------------------------
    def local_membership(self, v: Sequence, p: int) -> bool:
        self._check_prime(p)
        v = vec(v)
        if len(v) != self.n:
            raise ValueError(f"vector of length {len(v)} in rank {self.n}")
        d = denominator_exponent(v, p)
        if d > self.max_level(p):
            # beyond the precision every generator has been used
            return self.truncated(p).contains(v)
        return self.truncated(p, d).contains(v)

    def contains(self, v: Sequence) -> bool:
        """Global membership: conjunction over the primes in the denominators."""
        v = vec(v)
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        primes = [q for q in primes_upto(den) if den % q == 0] if den > 1 else []
        return all(self.local_membership(v, q) for q in primes)

    def height(self, v: Sequence, p: int):
        """Largest h with p^{-h} v in G_(p), by bisection on membership; AtLeast when capped."""
        v = vec(v)
        if all(x == 0 for x in v):
            raise ValueError("height of the zero vector is infinite")
        if not self.local_membership(v, p):
            raise ValueError("vector is not in the group")
        cap = self.max_level(p) + _valuation_min(v, p)
        step = Fraction(1, p)
        if self.local_membership(scale(step**cap, v), p):
            return AtLeast(cap)
        lo, hi = 0, cap  # member at lo, not at hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.local_membership(scale(step**mid, v), p):
                lo = mid
            else:
                hi = mid
        return lo

    def characteristic(self, v: Sequence, primes=None) -> dict:
        return {p: self.height(v, p) for p in (primes or self.window)}

    # -- p-rank ---------------------------------------------------------------
    def lattice_p_rank(self, p: int) -> int:
        """dim over F_p of T_c / (T_c ∩ p T_{c+1}) at the top exact level.

        For c past every finite height this is the dimension of G/pG.
        """
        c = self.max_level(p) - 1
        top = self.truncated(p, c)
        sub = top.intersect(self.truncated(p, c + 1).scaled(p))
        return sub.index_in(top)


# ---------------------------------------------------------------------------
# Murley schemes


@dataclass(frozen=True)
class QdInvariant:
    """The q.d. invariant at one prime: "full" or a basis of residue vectors mod p^K."""

    p: int
    full: bool
    basis: tuple[tuple[int, ...], ...] = ()
    K: int = 1

    @property
    def dim(self) -> int | None:
        return None if self.full else len(self.basis)

    def to_json(self):
        if self.full:
            return "full"
        return [[str(x) for x in b] for b in self.basis]


@dataclass(frozen=True, eq=False)
class GroupScheme(LocalGroup):
    t: TypeDescriptor
    n: int
    fam: AlphaFamily | None
    K: int
    window: tuple[int, ...]
    audit: ConditionTReport | None = None
    B: int = 5
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def p0(self) -> list[int]:
        return [p for p in self.window if self.t(p) != INF]

    @property
    def pinf(self) -> list[int]:
        return [p for p in self.window if self.t(p) == INF]

    def chi(self, p: int):
        return self.t(p)

    def _check_prime(self, p: int) -> None:
        check_prime(p)
        if p not in self.window and self.n > 1 and self.t(p) != INF:
            raise UnsupportedDenominator(f"unsupported denominator: {p} is outside the window")

    def alpha(self, p: int) -> int:
        return self.fam.residue(p)

    def max_level(self, p: int) -> int:
        chi = self.chi(p)
        return self.K if chi == INF else chi + self.K

    def truncated(self, p: int, c: int | None = None) -> LocalLattice:
        """T_c = G_(p) ∩ p^{-c} Z_(p)^n, exact for c <= max_level(p)."""
        self._check_prime(p)
        top = self.max_level(p)
        c = top if c is None else c
        if c > top:
            raise ValueError(f"level {c} beyond precision {top} at {p}")
        key = (p, c)
        if key in self._cache:
            return self._cache[key]
        chi = self.chi(p)
        if chi == INF or self.n == 1 or c <= chi:
            lat = LocalLattice.standard(p, self.n, c if chi == INF else min(c, chi))
        else:
            k = c - chi
            ak = self.alpha(p) % p**k
            gens = [tuple(Fraction(int(i == j), p**chi) for j in range(self.n)) for i in range(self.n)]
            for s in range(self.n - 1):
                u = [0] * self.n
                u[s], u[s + 1] = 1, ak
                gens.append(tuple(Fraction(x, p**c) for x in u))
            lat = LocalLattice(p, self.n, gens, self.K)
        self._cache[key] = lat
        return lat

    def generators(self, p: int) -> list[tuple[Fraction, ...]]:
        """The literal generator set at p: p^{-chi} e_i and x_{p,s}^{(k)} for k <= K."""
        chi = self.chi(p)
        if chi == INF:
            return [tuple(Fraction(int(i == j), p**self.K) for j in range(self.n)) for i in range(self.n)]
        gens = [tuple(Fraction(int(i == j), p**chi) for j in range(self.n)) for i in range(self.n)]
        if self.n > 1:
            for k in range(1, self.K + 1):
                ak = self.alpha(p) % p**k
                for s in range(self.n - 1):
                    u = [0] * self.n
                    u[s], u[s + 1] = 1, ak
                    gens.append(tuple(Fraction(x, p ** (k + chi)) for x in u))
        return gens

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "B": self.B,
            "window": list(self.window),
            "type": self.t.to_json(),
            "family": self.fam.to_json() if self.fam is not None else None,
        }

    @classmethod
    def from_json(cls, d: dict, family: AlphaFamily | None = None) -> "GroupScheme":
        fam = family if family is not None else (AlphaFamily.from_json(d["family"]) if d.get("family") else None)
        return build_murley_scheme(
            TypeDescriptor.from_json(d["type"]), int(d["n"]), fam, int(d["K"]),
            window=[int(p) for p in d["window"]], B=int(d.get("B", 5)),
        )


def build_murley_scheme(
    t: TypeDescriptor,
    n: int,
    fam: AlphaFamily | None,
    K: int | None = None,
    window=None,
    B: int = 5,
    budget: int = 0,
) -> GroupScheme:
    """Build the group and audit its hypothesis: the family satisfies condition (T) for n-1.

    The default window is the family's primes together with the P_inf primes
    up to the largest of them.
    """
    if n < 1:
        raise ValueError("rank must be positive")
    if K is None:
        if fam is None:
            raise ValueError("precision needed when there is no family")
        K = fam.K
    if all(v == INF for v in [t.default, *t.entries.values(), *(r.value for r in t.rules)]):
        raise SchemeRejected("the all-infinite type gives a divisible group")
    if window is None:
        if fam is None or not fam.entries:
            window = list(t.window) or [2]
        else:
            top = max(fam.primes)
            window = sorted(set(fam.primes) | {p for p in primes_upto(top) if t(p) == INF})
    window = tuple(sorted(set(window)))
    for p in window:
        check_prime(p)
    p0 = [p for p in window if t(p) != INF]
    audit = None
    if n > 1:
        if fam is None:
            raise SchemeRejected(f"rank {n} needs an alpha family")
        missing = [p for p in p0 if p not in fam.entries]
        if missing:
            raise SchemeRejected(f"family has no entry at P_0 window primes {missing}")
        if fam.K < K:
            raise SchemeRejected(f"family precision {fam.K} below scheme precision {K}")
        fam = fam.restrict(p0)
        if fam.K > K:
            fam = AlphaFamily(K, {p: a.truncate(K) for p, a in fam.entries.items()}, fam.provenance, fam.exception_log)
        if fam.entries:
            audit = check_condition_T(fam, n - 1, B, budget)
            if not audit.passed:
                raise SchemeRejected(
                    f"family fails condition (T) for degree {n - 1}: witness {audit.witness}",
                    audit.witness,
                    audit,
                )
    else:
        fam = None
    return GroupScheme(t, n, fam, K, window, audit, B)


def delta_subspace(s: GroupScheme, p: int) -> QdInvariant:
    if p not in s.window:
        raise ValueError(f"{p} is outside the window")
    if s.t(p) == INF:
        return QdInvariant(p, True, (), s.K)
    if s.n == 1:
        return QdInvariant(p, False, (), s.K)
    a = s.alpha(p)
    basis = []
    for i in range(s.n - 1):
        u = [0] * s.n
        u[i], u[i + 1] = 1, a
        basis.append(tuple(u))
    return QdInvariant(p, False, tuple(basis), s.K)


def p_rank(s: GroupScheme, p: int) -> int:
    d = delta_subspace(s, p)
    r = 0 if d.full else s.n - d.dim
    assert r <= 1, f"p-rank {r} > 1 contradicts the Murley property"
    return r


def element_height(s: LocalGroup, a: Sequence, p: int):
    """h_p(a) in N_0, or AtLeast(cap) when the precision runs out.

    On a Murley scheme an integer vector a = p^m a' (a' not divisible by p)
    has height m + chi_p + v_p(f_{a'}(alpha_p)) with f_{a'} the alternating
    polynomial of a'.  Other vectors and groups go through bisection.
    """
    if all(Fraction(x) == 0 for x in a):
        raise ValueError("height of the zero vector is infinite")
    if not isinstance(s, GroupScheme) or not all(Fraction(x).denominator == 1 for x in a):
        return s.height(a, p)
    s._check_prime(p)
    ints = [int(x) for x in a]
    m = min(int_valuation(x, p) for x in ints if x)
    chi = s.chi(p)
    if chi == INF:
        return AtLeast(s.max_level(p) + m)
    if s.n == 1:
        return m + chi
    reduced = [x // p**m for x in ints]
    value = alternating_poly(reduced).eval_mod(s.alpha(p), p**s.K)
    if value == 0:
        return AtLeast(m + chi + s.K)
    return m + chi + int_valuation(value, p)


@dataclass(frozen=True)
class HomogeneityReport:
    samples: tuple[dict, ...]
    passed: bool
    max_discrepancy: int

    def to_json(self) -> dict:
        return {"passed": self.passed, "max_discrepancy": self.max_discrepancy, "samples": list(self.samples)}


def explain_discrepancy(s: GroupScheme, a: Sequence[int], p: int) -> str | None:
    """Why h_p(a) may exceed chi_p, from the provenance alone; None if nothing explains it."""
    ints = [int(x) for x in a]
    if all(x % p == 0 for x in ints):
        return "content"
    fa = alternating_poly(ints).primitive()
    if s.fam is None:
        return None
    prov = s.fam.provenance
    if p in s.fam.exception_log:
        return "forge-log"
    if prov.kind == "hensel":
        from murley.tcond import _resultant

        res = _resultant(prov.poly, fa)
        return "resultant" if res != 0 and res % p == 0 else None
    if prov.kind == "forged" and p in prov.window:
        from murley.tcond import enumerate_coprime_polys, forge_head

        head = forge_head(enumerate_coprime_polys(prov.n, prov.B), p, prov.window.index(p) + 1)
        return None if fa in head else "forge-order"
    return None


def homogeneity_probe(
    s: GroupScheme,
    samples: int,
    seed: int,
    coeff_bound: int | None = None,
    max_discrepancy: int | None = None,
    vectors=None,
) -> HomogeneityReport:
    """Height profiles of random integer vectors over the P_0 window primes.

    A sample passes when no P_0 prime saturates, every prime with
    h_p(a) != chi_p is explained by the provenance (explain_discrepancy), and
    there are at most `max_discrepancy` such primes.  The default 4n is
    empirical: the count behaves like the number of small prime factors of a
    random p-adic value.  Coefficients default to the audited bound B, the
    range in which the family is certified not to saturate.
    """
    coeff_bound = s.B if coeff_bound is None else coeff_bound
    limit = 4 * s.n if max_discrepancy is None else max_discrepancy
    rng = random.Random(seed)
    if vectors is None:
        vectors = []
        while len(vectors) < samples:
            a = tuple(rng.randint(-coeff_bound, coeff_bound) for _ in range(s.n))
            if any(a):
                vectors.append(a)
    out, ok = [], True
    for a in vectors:
        sat, disc, unexplained = [], [], []
        for p in s.p0:
            h = element_height(s, a, p)
            if isinstance(h, AtLeast):
                sat.append(p)
            elif h != s.chi(p):
                disc.append(p)
                if explain_discrepancy(s, a, p) is None:
                    unexplained.append(p)
        passed = not sat and not unexplained and len(disc) <= limit
        ok &= passed
        out.append({"a": list(a), "saturated": sat, "discrepancy": disc, "unexplained": unexplained, "passed": passed})
    return HomogeneityReport(tuple(out), ok, limit)


def hom_constraints(src: GroupScheme, dst: GroupScheme) -> list[tuple[list[int], int]]:
    """Linear congruences on the entries of C (row s = image of e_s) for C(delta_p) ⊆ delta'_p.

    C maps u_s = e_s + alpha e_{s+1} to w = row_s + alpha row_{s+1}, which lies
    in delta'_p iff f_w(gamma) = sum_i w_i (-gamma)^{n-i} = 0.
    """
    n = src.n
    out = []
    for p in src.p0:
        M = p**src.K
        a, g = src.alpha(p), dst.alpha(p)
        powers = [pow(-g, n - i, M) for i in range(1, n + 1)]
        for s in range(n - 1):
            row = [0] * (n * n)
            for i in range(n):
                row[s * n + i] = powers[i] % M
                row[(s + 1) * n + i] = a * powers[i] % M
            out.append((row, M))
    return out


def hom_search(src: GroupScheme, dst: GroupScheme, bound: int) -> list[tuple[tuple[int, ...], ...]]:
    """All integer matrices with entries in [-bound, bound] preserving every delta_p mod p^K.

    The constraints cut out a sublattice of Z^{n^2}; after LLL reduction the
    box is covered by a Fincke-Pohst enumeration of radius bound * n.
    """
    if src.n != dst.n:
        raise ValueError(f"rank mismatch: {src.n} vs {dst.n}")
    if src.window != dst.window or src.p0 != dst.p0:
        raise ValueError("window mismatch")
    if src.K != dst.K:
        raise ValueError("precision mismatch")
    n = src.n
    cons = hom_constraints(src, dst) if n > 1 else []
    basis = congruence_lattice(cons, n * n)
    found = short_vectors(basis, bound * bound * n * n)
    keep = sorted({v for v in found if all(abs(x) <= bound for x in v)})
    for v in keep:
        assert all(sum(a * x for a, x in zip(row, v)) % M == 0 for row, M in cons)
    return [tuple(tuple(v[s * n : (s + 1) * n]) for s in range(n)) for v in keep]


def is_scalar(matrix) -> bool:
    n = len(matrix)
    return all(matrix[i][j] == (matrix[0][0] if i == j else 0) for i in range(n) for j in range(n))


# ---------------------------------------------------------------------------
# free groups R^n


@dataclass(frozen=True, eq=False)
class FreeScheme(LocalGroup):
    """R^n for the rank-one group R of characteristic t; Z^n when t is zero."""

    t: TypeDescriptor
    n: int
    K: int
    window: tuple[int, ...] = ()

    def chi(self, p: int):
        return self.t(p)

    def max_level(self, p: int) -> int:
        chi = self.chi(p)
        return self.K if chi == INF else chi + self.K

    def truncated(self, p: int, c: int | None = None) -> LocalLattice:
        check_prime(p)
        c = self.max_level(p) if c is None else c
        chi = self.chi(p)
        return LocalLattice.standard(p, self.n, c if chi == INF else min(c, chi))

    def to_json(self) -> dict:
        return {"kind": "free", "n": self.n, "K": self.K, "window": list(self.window), "type": self.t.to_json()}


# ---------------------------------------------------------------------------
# the rank-2 group generated by p_j^{-inf} c_j


def primitive_directions(J: int) -> list[tuple[int, int]]:
    """c_1 = e_1, c_2 = e_2, then k1 > 0, k2 != 0, gcd 1, by (max(k1,|k2|), k1, |k2|, k2 < 0)."""
    out = [(1, 0), (0, 1)]
    size = 1
    while len(out) < J:
        batch = [
            (k1, k2)
            for k1 in range(1, size + 1)
            for k2 in range(-size, size + 1)
            if k2 != 0 and max(k1, abs(k2)) == size and gcd(k1, abs(k2)) == 1
        ]
        batch.sort(key=lambda v: (v[0], abs(v[1]), v[1] < 0))
        out += batch
        size += 1
    return out[:J]


@dataclass(frozen=True, eq=False)
class ProchazkaGroup(LocalGroup):
    """G = <p_j^{-K} c_j : j <= J> + Z^2 with p_j the j-th prime."""

    J: int
    K: int
    n: int = 2
    directions: tuple = ()
    window: tuple[int, ...] = ()

    def direction(self, p: int):
        return dict(zip(self.window, self.directions)).get(p)

    def chi(self, p: int):
        return 0

    def max_level(self, p: int) -> int:
        return self.K

    def truncated(self, p: int, c: int | None = None) -> LocalLattice:
        check_prime(p)
        c = self.K if c is None else min(c, self.K)
        gens = [(1, 0), (0, 1)]
        d = self.direction(p)
        if d is not None:
            gens.append((Fraction(d[0], p**c), Fraction(d[1], p**c)))
        return LocalLattice(p, 2, gens, self.K)

    def p_rank(self, p: int) -> int:
        return self.lattice_p_rank(p)

    def to_json(self) -> dict:
        return {
            "kind": "prochazka",
            "J": self.J,
            "K": self.K,
            "generators": [{"p": p, "c": list(c)} for p, c in zip(self.window, self.directions)],
        }


def build_prochazka_example(J: int, K: int) -> ProchazkaGroup:
    if J < 2:
        raise ValueError("need at least two generators")
    primes = []
    q = 2
    while len(primes) < J:
        if all(q % r for r in primes):
            primes.append(q)
        q += 1
    return ProchazkaGroup(J, K, 2, tuple(primitive_directions(J)), tuple(primes))


def residue_rank(vectors, p: int) -> int:
    """Rank mod p of integer vectors (used for p-independence)."""
    return rank_mod_p([[int(x) for x in v] for v in vectors], p)
