"""Condition (T) audits at finite precision and forging of families {alpha_p}.

A family satisfies condition (T) for n when no integer polynomial of degree
<= n vanishes at any member, and each such polynomial vanishes mod p at only
finitely many members.  At desk scale the polynomials are bounded by a
coefficient bound B and both properties are audited residue-wise.
"""
from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np
import sympy

from murley.padx import (
    IntPolynomial,
    PadicApprox,
    certified_roots,
    int_valuation,
    poly_eval_padic,
)


def _signed_order(B: int) -> list[int]:
    out = [0]
    for k in range(1, B + 1):
        out += [k, -k]
    return out


@lru_cache(maxsize=64)
def _enumerate(n: int, B: int) -> tuple[IntPolynomial, ...]:
    order = _signed_order(B)
    out = []
    for d in range(n + 1):
        for lead in range(1, B + 1):
            for rest in itertools.product(order, repeat=d):
                # rest lists coefficients from degree d-1 down to 0
                coeffs = tuple(reversed(rest)) + (lead,)
                g = 0
                for c in coeffs:
                    g = gcd(g, c)
                if g == 1:
                    out.append(IntPolynomial(coeffs))
    return tuple(out)


def enumerate_coprime_polys(n: int, B: int) -> list[IntPolynomial]:
    """Nonzero polynomials of degree <= n, coefficients in [-B, B], content 1, lead > 0.

    Order: by degree, then leading coefficient, then the remaining coefficients
    from the top down, each running through 0, 1, -1, 2, -2, ...
    """
    if n < 0 or B < 1:
        raise ValueError("need n >= 0 and B >= 1")
    return list(_enumerate(n, B))


def _coeff_matrix(polys) -> np.ndarray:
    width = max(len(f.coeffs) for f in polys)
    return np.array([list(f.coeffs) + [0] * (width - len(f.coeffs)) for f in polys], dtype=np.int64)


def vanishing_table(polys, p: int) -> np.ndarray:
    """Boolean table [poly, residue] of f(residue) == 0 mod p."""
    C = _coeff_matrix(polys) % p
    x = np.arange(p, dtype=np.int64)
    powers = np.ones((C.shape[1], p), dtype=np.int64)
    for k in range(1, C.shape[1]):
        powers[k] = powers[k - 1] * x % p
    vals = np.zeros((C.shape[0], p), dtype=np.int64)
    for k in range(C.shape[1]):
        vals = (vals + C[:, k : k + 1] * powers[k]) % p
    return vals == 0


@dataclass(frozen=True)
class Provenance:
    kind: str  # "forged", "hensel" or "explicit"
    seed: int | None = None
    n: int | None = None
    B: int | None = None
    poly: IntPolynomial | None = None
    window: tuple[int, ...] = ()  # forge window, fixes the index k of each prime

    def to_json(self) -> dict:
        if self.kind == "forged":
            return {"kind": "forged", "seed": self.seed, "n": self.n, "B": self.B, "window": list(self.window)}
        if self.kind == "hensel":
            return {"kind": "hensel", "poly": list(self.poly.coeffs)}
        return {"kind": "explicit"}

    @classmethod
    def from_json(cls, d: dict) -> "Provenance":
        kind = d["kind"]
        if kind == "forged":
            return cls("forged", int(d["seed"]), int(d["n"]), int(d["B"]),
                       window=tuple(int(p) for p in d.get("window", ())))
        if kind == "hensel":
            return cls("hensel", poly=IntPolynomial(tuple(int(c) for c in d["poly"])))
        if kind == "explicit":
            return cls("explicit")
        raise ValueError(f"unknown provenance kind {kind!r}")


@dataclass(frozen=True)
class AlphaFamily:
    K: int
    entries: dict  # prime -> PadicApprox
    provenance: Provenance
    exception_log: dict = field(default_factory=dict)  # prime -> reason

    def __post_init__(self):
        for p, a in self.entries.items():
            if a.p != p:
                raise ValueError(f"entry for {p} carries prime {a.p}")
            if a.K != self.K:
                raise ValueError(f"entry for {p} has precision {a.K}, family has {self.K}")
        if not set(self.exception_log) <= set(self.entries):
            raise ValueError("exception primes must belong to the family")

    def __hash__(self):
        return hash((self.K, tuple(sorted(self.entries.items())), self.provenance))

    @property
    def exceptions(self) -> tuple[int, ...]:
        return tuple(sorted(self.exception_log))

    @property
    def primes(self) -> list[int]:
        return sorted(self.entries)

    def residue(self, p: int) -> int:
        return self.entries[p].r

    def __getitem__(self, p: int) -> PadicApprox:
        return self.entries[p]

    def restrict(self, primes) -> "AlphaFamily":
        keep = set(primes)
        return AlphaFamily(
            self.K,
            {p: a for p, a in self.entries.items() if p in keep},
            self.provenance,
            {p: why for p, why in self.exception_log.items() if p in keep},
        )

    def to_json(self) -> dict:
        return {
            "provenance": self.provenance.to_json(),
            "K": self.K,
            "entries": {str(p): str(a.r) for p, a in sorted(self.entries.items())},
            "exceptions": {str(p): why for p, why in sorted(self.exception_log.items())},
        }

    @classmethod
    def from_json(cls, d: dict) -> "AlphaFamily":
        K = int(d["K"])
        entries = {int(p): PadicApprox(int(p), K, int(r)) for p, r in d["entries"].items()}
        log = {int(p): str(why) for p, why in d.get("exceptions", {}).items()}
        return cls(K, entries, Provenance.from_json(d["provenance"]), log)


def explicit_family(residues: dict, K: int) -> AlphaFamily:
    return AlphaFamily(K, {p: PadicApprox.of(r, p, K) for p, r in residues.items()}, Provenance("explicit"))


def hensel_family(f: IntPolynomial, primes, K: int, choice: str = "smallest") -> AlphaFamily:
    """One certified root of f per prime (the smallest residue mod p^K by default)."""
    entries = {}
    for p in sorted(set(primes)):
        roots = certified_roots(f, p, K)
        if not roots:
            raise ValueError(f"{f} has no certified root at p={p}")
        entries[p] = roots[0] if choice == "smallest" else roots[-1]
    return AlphaFamily(K, entries, Provenance("hensel", poly=f))


def prime_stream(seed: int, p: int) -> random.Random:
    """Deterministic per-(seed, prime) stream; independent of window and call order."""
    h = hashlib.sha256(f"murley-forge:{seed}:{p}".encode()).digest()
    return random.Random(int.from_bytes(h, "big"))


def forge_head(polys, p: int, k: int) -> list[IntPolynomial]:
    """f_1, ..., f_k: the enumeration order restricted to leading coefficient < p, first k."""
    return [f for f in polys if f.lead < p][:k]


TAIL_ATTEMPTS = 64


def forge_family(n: int, B: int, window, K: int, seed: int) -> AlphaFamily:
    """Family {alpha_p} built prime by prime as alpha_p = a_p + p * beta_p.

    For the k-th window prime p_k the leading digit a_p is drawn from the
    residues 1..p-1 that are not roots of f_1 * ... * f_k mod p (see
    forge_head); every f_j therefore avoids p_k for all k >= j.  The higher
    digits beta_p come from a seeded per-prime stream, redrawn (at most
    TAIL_ATTEMPTS times) until no bounded polynomial vanishes mod p^K.  Primes
    where either step cannot succeed are logged with the reason ("residue" or
    "saturation").
    """
    window = sorted(set(window))
    if not window:
        raise ValueError("forge_family needs a nonempty window")
    polys = enumerate_coprime_polys(n, B)
    entries, log = {}, {}
    for k, p in enumerate(window, start=1):
        head = forge_head(polys, p, k)
        rng = prime_stream(seed, p)
        counts = vanishing_table(head, p)[:, 1:].sum(axis=0) if head else np.zeros(p - 1, dtype=int)
        free = [a for a in range(1, p) if counts[a - 1] == 0]
        if free:
            a = free[rng.randrange(len(free))]
        else:
            log[p] = "residue"
            a = 1 + int(np.argmin(counts))
        m = p**K
        risky = [f for f in polys if f.eval_mod(a, p) == 0]
        best, best_hits = None, None
        for _ in range(TAIL_ATTEMPTS if K > 1 else 1):
            alpha = a + p * (rng.randrange(p ** (K - 1)) if K > 1 else 0)
            hits = sum(1 for f in risky if f.eval_mod(alpha, m) == 0)
            if best is None or hits < best_hits:
                best, best_hits = alpha, hits
            if hits == 0:
                break
        if best_hits:
            log.setdefault(p, "saturation")
        entries[p] = PadicApprox(p, K, best)
    return AlphaFamily(K, entries, Provenance("forged", seed, n, B, window=tuple(window)), log)


# ---------------------------------------------------------------------------
# audit


@dataclass(frozen=True)
class PolyVerdict:
    poly: IntPolynomial
    saturated: tuple[int, ...]  # primes with f(alpha_p) = 0 mod p^K
    exceptions: tuple[int, ...]  # primes with f(alpha_p) = 0 mod p
    excused: tuple[int, ...]  # subset of exceptions explained by the provenance
    ok: bool

    def to_json(self) -> dict:
        return {
            "poly": list(self.poly.coeffs),
            "saturated": list(self.saturated),
            "exceptions": list(self.exceptions),
            "excused": list(self.excused),
            "ok": self.ok,
        }


@dataclass(frozen=True)
class ConditionTReport:
    n: int
    B: int
    K: int
    window: tuple[int, ...]
    verdicts: tuple[PolyVerdict, ...]  # only polynomials with something to report
    exception_set: tuple[int, ...]
    budget: int
    passed: bool
    checked: int = 0

    @property
    def failures(self) -> list[PolyVerdict]:
        return [v for v in self.verdicts if not v.ok]

    @property
    def witness(self) -> IntPolynomial | None:
        f = self.failures
        return f[0].poly if f else None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "B": self.B,
            "K": self.K,
            "window": list(self.window),
            "checked": self.checked,
            "budget": self.budget,
            "exception_set": list(self.exception_set),
            "passed": self.passed,
            "witness": list(self.witness.coeffs) if self.witness else None,
            "verdicts": [v.to_json() for v in self.verdicts],
        }


def _resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    x = sympy.Symbol("x")
    fe = sum(c * x**i for i, c in enumerate(f.coeffs))
    ge = sum(c * x**i for i, c in enumerate(g.coeffs))
    if g.degree == 0:
        return int(g.coeffs[0]) ** max(f.degree, 0)
    return int(sympy.resultant(fe, ge, x))


def _forge_admitted(prov: Provenance):
    """Map prime -> set of polynomials the forge made avoid that prime."""
    polys = enumerate_coprime_polys(prov.n, prov.B)
    return {p: set(forge_head(polys, p, k)) for k, p in enumerate(prov.window, start=1)}


def check_condition_T(fam: AlphaFamily, n: int, B: int, budget: int = 0) -> ConditionTReport:
    """Audit both properties of condition (T) over the family's primes.

    Property 1 is checked one-sidedly: f(alpha_p) = 0 mod p^K counts as a
    violation.  Property 2 collects, per polynomial, the primes where
    f(alpha_p) = 0 mod p.  An exception is excused when the provenance explains
    it.  For a forged family that means the prime is logged by the forge, or
    f was not yet among the polynomials the forge avoided at that prime (the
    finite initial segment that "almost all" allows).  For a root family of a
    polynomial h it means the prime divides Res(h, f).  Saturation is excused
    only at forge-logged primes.  A polynomial passes when nothing unexcused
    saturates and at most `budget` exceptions remain unexplained.
    """
    if not fam.entries:
        raise ValueError("empty family")
    prov = fam.provenance
    forged = prov.kind == "forged"
    flagged = set(fam.exceptions) if forged else set()
    admitted = _forge_admitted(prov) if forged else {}
    hensel_f = prov.poly if prov.kind == "hensel" else None
    K = fam.K
    polys = enumerate_coprime_polys(n, B)
    primes = fam.primes
    verdicts, all_exc = [], set()
    for f in polys:
        sat, exc = [], []
        for p in primes:
            v = poly_eval_padic(f, fam.entries[p])
            if v.r % p == 0:
                exc.append(p)
                if v.r == 0 and p not in flagged:
                    sat.append(p)
        if not exc:
            continue
        excused, rest = [], []
        for p in exc:
            early = forged and f not in admitted.get(p, {f})
            (excused if p in flagged or early else rest).append(p)
        if rest and hensel_f is not None:
            res = _resultant(hensel_f, f)
            if res != 0:
                excused += [p for p in rest if res % p == 0]
                rest = [p for p in rest if res % p != 0]
        ok = not sat and len(rest) <= budget
        all_exc.update(exc)
        verdicts.append(PolyVerdict(f, tuple(sat), tuple(exc), tuple(sorted(excused)), ok))
    passed = all(v.ok for v in verdicts)
    return ConditionTReport(n, B, K, tuple(primes), tuple(verdicts), tuple(sorted(all_exc)), budget, passed, len(polys))


def explains_exception(fam: AlphaFamily, p: int) -> bool:
    """Independently re-verify a forge log entry from the provenance alone."""
    prov = fam.provenance
    if prov.kind != "forged" or p not in fam.exception_log:
        return False
    polys = enumerate_coprime_polys(prov.n, prov.B)
    k = prov.window.index(p) + 1
    why = fam.exception_log[p]
    if why == "residue":
        head = forge_head(polys, p, k)
        return bool(head) and bool(vanishing_table(head, p)[:, 1:].any(axis=0).all())
    if why == "saturation":
        a = fam.entries[p]
        return any(poly_eval_padic(f, a).r == 0 for f in polys)
    return False


def residue_avoids_head(fam: AlphaFamily, p: int) -> bool:
    """The leading digit at p avoids every root of f_1 * ... * f_k mod p."""
    prov = fam.provenance
    head = forge_head(enumerate_coprime_polys(prov.n, prov.B), p, prov.window.index(p) + 1)
    a = fam.residue(p) % p
    return a != 0 and not any(f.eval_mod(a, p) == 0 for f in head)


def valuation_profile(fam: AlphaFamily, f: IntPolynomial) -> dict[int, int | None]:
    out = {}
    for p in fam.primes:
        v = poly_eval_padic(f, fam.entries[p])
        out[p] = None if v.r == 0 else int_valuation(v.r, p)
    return out
