"""Characteristics and types over a finite prime window plus residue-class rules.

A characteristic assigns each prime a value in N_0 or infinity.  Inside the
window the values are listed explicitly; beyond it an ordered list of
residue-class rules decides, first match wins, with a mandatory default.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, inf
from typing import Iterable

from sympy import primefactors

from murley.padx import check_prime, primes_upto

INF = inf


def parse_value(v):
    if v in ("inf", "∞", INF):
        return INF
    v = int(v)
    if v < 0:
        raise ValueError(f"characteristic values are non-negative, got {v}")
    return v


def dump_value(v):
    return "inf" if v == INF else int(v)


@dataclass(frozen=True)
class Rule:
    mod: int
    residues: frozenset[int]
    value: float | int

    def matches(self, p: int) -> bool:
        return p % self.mod in self.residues


@dataclass(frozen=True)
class TypeDescriptor:
    window: tuple[int, ...] = ()
    entries: dict = field(default_factory=dict)
    rules: tuple[Rule, ...] = ()
    default: float | int = 0

    def __post_init__(self):
        window = tuple(sorted(set(self.window) | set(self.entries)))
        for p in window:
            check_prime(p)
        missing = [p for p in window if p not in self.entries]
        if missing:
            raise ValueError(f"window primes without an entry: {missing}")
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "entries", {p: parse_value(v) for p, v in self.entries.items()})
        object.__setattr__(self, "default", parse_value(self.default))
        rules = []
        for r in self.rules:
            if r.mod < 1:
                raise ValueError("rule modulus must be positive")
            rules.append(Rule(r.mod, frozenset(x % r.mod for x in r.residues), parse_value(r.value)))
        object.__setattr__(self, "rules", tuple(rules))

    def __hash__(self):
        return hash((self.window, tuple(sorted(self.entries.items())), self.rules, self.default))

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, value) -> "TypeDescriptor":
        return cls(default=value)

    @classmethod
    def zero(cls) -> "TypeDescriptor":
        return cls.constant(0)

    @classmethod
    def from_sets(cls, window: Iterable[int], infinite: Iterable[int], default=INF) -> "TypeDescriptor":
        """Window primes in `infinite` get infinity, the rest 0; beyond: `default`."""
        infinite = set(infinite)
        return cls(entries={p: (INF if p in infinite else 0) for p in window}, default=default)

    # -- evaluation -------------------------------------------------------
    def eventual_value(self, p: int):
        for r in self.rules:
            if r.matches(p):
                return r.value
        return self.default

    def value(self, p: int):
        if p in self.entries:
            return self.entries[p]
        return self.eventual_value(p)

    __call__ = value

    def is_infinite_at(self, p: int) -> bool:
        return self.value(p) == INF

    def rule_modulus(self) -> int:
        m = 1
        for r in self.rules:
            m = m * r.mod // gcd(m, r.mod)
        return m

    def class_values(self, modulus: int | None = None) -> dict[int, float | int]:
        """Eventual value on each reduced residue class; each holds infinitely many primes."""
        m = modulus or self.rule_modulus()
        out = {}
        for c in range(m):
            if gcd(c, m) != 1:
                continue
            # c itself may not be prime; any prime in the class gives the same rule hits
            out[c] = next((r.value for r in self.rules if c % r.mod in r.residues), self.default)
        return out

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "window": list(self.window),
            "entries": {str(p): dump_value(v) for p, v in sorted(self.entries.items())},
            "rules": [
                {"mod": r.mod, "residues": sorted(r.residues), "value": dump_value(r.value)}
                for r in self.rules
            ]
            + [{"default": dump_value(self.default)}],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TypeDescriptor":
        rules, default = [], None
        for r in data.get("rules", []):
            if "default" in r:
                default = r["default"]
                continue
            rules.append(Rule(int(r["mod"]), frozenset(int(x) for x in r["residues"]), r["value"]))
        if default is None:
            raise ValueError("type descriptor needs a default rule")
        entries = {int(p): v for p, v in data.get("entries", {}).items()}
        return cls(tuple(int(p) for p in data.get("window", [])), entries, tuple(rules), default)


def split_p0_pinf(t: TypeDescriptor, horizon: int) -> tuple[list[int], list[int]]:
    if t.window and horizon < max(t.window):
        raise ValueError(f"horizon {horizon} below window maximum {max(t.window)}")
    p0, pinf = [], []
    for p in primes_upto(horizon):
        (pinf if t.is_infinite_at(p) else p0).append(p)
    return p0, pinf


def is_idempotent_type(t: TypeDescriptor) -> bool:
    return all(v in (0, INF) for v in t.class_values().values())


@dataclass(frozen=True)
class TypeEquality:
    equal: bool
    discrepancies: tuple[int, ...]
    reason: str = ""

    def __bool__(self) -> bool:
        return self.equal


def type_equal(a: TypeDescriptor, b: TypeDescriptor, horizon: int) -> TypeEquality:
    """Equivalence: the characteristics differ at finitely many primes, only at finite values.

    Beyond the windows each reduced class mod lcm(moduli) holds infinitely many
    primes, so the eventual values must agree classwise.  Primes up to the
    horizon (and every prime dividing a modulus) are compared one by one.
    """
    m = a.rule_modulus() * b.rule_modulus() // gcd(a.rule_modulus(), b.rule_modulus())
    va, vb = a.class_values(m), b.class_values(m)
    for c in va:
        if va[c] != vb[c]:
            return TypeEquality(False, (), f"eventual values differ on residue class {c} mod {m}")
    bound = max([horizon, *a.window, *b.window, *primefactors(m)] or [2])
    disc = []
    for p in primes_upto(bound):
        x, y = a.value(p), b.value(p)
        if x == y:
            continue
        if INF in (x, y):
            return TypeEquality(False, (p,), f"infinite/finite mismatch at {p}")
        disc.append(p)
    return TypeEquality(True, tuple(disc))
