"""Exact linear algebra: rational matrices, Z_(p)-lattices and integer lattices.

`LocalLattice` is a finitely generated Z_(p)-submodule of Q^n held in a
canonical echelon form: pivots are exact powers of p and the entries above a
pivot p^v are reduced to the residue system {c / p^s : 0 <= c / p^s < p^v}.
Two lattices are equal iff their echelon rows are equal.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from murley.padx import frac_valuation

Vec = tuple[Fraction, ...]


def vec(xs: Iterable) -> Vec:
    return tuple(Fraction(x) for x in xs)


def add(u: Sequence, v: Sequence) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> Vec:
    c = Fraction(c)
    return tuple(c * a for a in v)


def is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


def denominator_exponent(v: Sequence[Fraction], p: int) -> int:
    """Smallest d >= 0 with p^d v p-integral."""
    d = 0
    for a in v:
        if a != 0:
            d = max(d, -frac_valuation(Fraction(a), p))
    return d


def unit_part(x: Fraction, p: int) -> tuple[int, Fraction]:
    v = frac_valuation(x, p)
    return v, x / Fraction(p) ** v


def canonical_residue(x: Fraction, p: int, v: int) -> Fraction:
    """Representative of x mod p^v Z_(p) of the form c / p^s with 0 <= c / p^s < p^v."""
    if x == 0 or frac_valuation(x, p) >= v:
        return Fraction(0)
    s = -frac_valuation(x, p) if frac_valuation(x, p) < 0 else 0
    num, den = x.numerator, x.denominator
    den_unit = den // p**s
    m = p ** (v + s)
    c = (num * pow(den_unit, -1, m)) % m
    return Fraction(c, p**s)


# ---------------------------------------------------------------------------
# rational matrices (lists of rows of Fractions)


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    m = [list(map(Fraction, r)) for r in rows]
    ncols = ncols if ncols is not None else (len(m[0]) if m else 0)
    pivots, r = [], 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vec]:
    """Basis of {x : rows . x = 0}."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, c in zip(red, pivots):
            x[c] = -r[f]
        basis.append(tuple(x))
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> Vec | None:
    """Unique solution of matrix . x = rhs, None if singular or inconsistent."""
    n = len(matrix[0])
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    red, pivots = rref(aug, n + 1)
    if n in pivots or len(pivots) < n:
        return None
    return tuple(r[n] for r in red)


def mat_vec(matrix: Sequence[Sequence], v: Sequence) -> Vec:
    return tuple(sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in matrix)


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    rk, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        inv = pow(m[rk][c], -1, p)
        m[rk] = [x * inv % p for x in m[rk]]
        for i in range(len(m)):
            if i != rk and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rk])]
        rk += 1
    return rk


# ---------------------------------------------------------------------------
# Z_(p)-lattices


class LocalLattice:
    """Z_(p)-span of finitely many rational vectors, in canonical echelon form."""

    def __init__(self, p: int, n: int, gens: Iterable[Sequence] = (), precision: int | None = None):
        self.p = p
        self.n = n
        self.precision = precision
        self.rows: tuple[Vec, ...] = self._echelon([vec(g) for g in gens])

    @classmethod
    def standard(cls, p: int, n: int, shift: int = 0) -> "LocalLattice":
        """p^{-shift} Z_(p)^n."""
        c = Fraction(1, p**shift) if shift >= 0 else Fraction(p ** (-shift))
        return cls(p, n, [tuple(c if i == j else 0 for j in range(n)) for i in range(n)])

    def _echelon(self, rows: list[Vec]) -> tuple[Vec, ...]:
        p, n = self.p, self.n
        rows = [r for r in rows if not is_zero(r)]
        pivot_cols: list[tuple[int, int]] = []
        r = 0
        for col in range(n):
            best, best_v = None, None
            for i in range(r, len(rows)):
                x = rows[i][col]
                if x != 0:
                    v = frac_valuation(x, p)
                    if best_v is None or v < best_v:
                        best, best_v = i, v
            if best is None:
                continue
            rows[r], rows[best] = rows[best], rows[r]
            _, u = unit_part(rows[r][col], p)
            piv = [a / u for a in rows[r]]
            rows[r] = piv
            pv = Fraction(p) ** best_v
            for i in range(len(rows)):
                if i == r or rows[i][col] == 0:
                    continue
                if i > r:
                    q = rows[i][col] / pv
                else:
                    q = (rows[i][col] - canonical_residue(rows[i][col], p, best_v)) / pv
                rows[i] = [a - q * b for a, b in zip(rows[i], piv)]
            pivot_cols.append((col, best_v))
            r += 1
        self._pivots = tuple(pivot_cols)
        return tuple(tuple(row) for row in rows[:r])

    # -- queries ------------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> tuple[tuple[int, int], ...]:
        return self._pivots

    @property
    def full_rank(self) -> bool:
        return self.rank == self.n

    @property
    def volume_exponent(self) -> int:
        """Sum of pivot valuations; [Z_(p)^n : L] = p^volume for full-rank L."""
        return sum(v for _, v in self._pivots)

    def contains(self, v: Sequence) -> bool:
        w = list(vec(v))
        for row, (col, pv) in zip(self.rows, self._pivots):
            x = w[col]
            if x == 0:
                continue
            if frac_valuation(x, self.p) < pv:
                return False
            q = x / Fraction(self.p) ** pv
            w = [a - q * b for a, b in zip(w, row)]
        return is_zero(w)

    __contains__ = contains

    def contains_lattice(self, other: "LocalLattice") -> bool:
        return all(self.contains(r) for r in other.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalLattice) and (self.p, self.n, self.rows) == (other.p, other.n, other.rows)

    def __hash__(self):
        return hash((self.p, self.n, self.rows))

    def __repr__(self) -> str:
        body = ", ".join("(" + ", ".join(str(x) for x in r) + ")" for r in self.rows)
        return f"LocalLattice(p={self.p}, [{body}])"

    # -- constructions ------------------------------------------------------
    def _like(self, gens) -> "LocalLattice":
        return LocalLattice(self.p, self.n, gens, self.precision)

    def __add__(self, other: "LocalLattice") -> "LocalLattice":
        return self._like(self.rows + other.rows)

    def scaled(self, c) -> "LocalLattice":
        return self._like(scale(c, r) for r in self.rows)

    def intersect(self, other: "LocalLattice") -> "LocalLattice":
        n = self.n
        zero = (Fraction(0),) * n
        big = [r + r for r in self.rows] + [r + zero for r in other.rows]
        ech = LocalLattice(self.p, 2 * n, big)
        return self._like(r[n:] for r in ech.rows if is_zero(r[:n]))

    def truncate(self, cap: int) -> "LocalLattice":
        """L intersected with p^{-cap} Z_(p)^n."""
        return self.intersect(LocalLattice.standard(self.p, self.n, cap))

    def index_in(self, other: "LocalLattice") -> int:
        """log_p [other : self] for full-rank self inside other."""
        if not (self.full_rank and other.full_rank):
            raise ValueError("index needs full-rank lattices")
        if not other.contains_lattice(self):
            raise ValueError("not a sublattice")
        return self.volume_exponent - other.volume_exponent

    def first_missing(self, other: "LocalLattice") -> Vec | None:
        """A generator of `other` not in self, or None if other is contained in self."""
        for r in other.rows:
            if not self.contains(r):
                return r
        return None

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "rows": [[str(x) for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "LocalLattice":
        return cls(int(data["p"]), int(data["n"]), [[Fraction(x) for x in r] for r in data["rows"]])


# ---------------------------------------------------------------------------
# integer lattices


def integer_hnf(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form, zero rows dropped."""
    m = [list(map(int, r)) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(m)) if m[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            done = True
            for i in range(r + 1, len(m)):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < len(m) and m[r][c]:
            if m[r][c] < 0:
                m[r] = [-a for a in m[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
            r += 1
            if r == len(m):
                break
    return [row for row in m[:r]]


def congruence_lattice(constraints: Iterable[tuple[Sequence[int], int]], dim: int) -> list[list[int]]:
    """HNF basis of {x in Z^dim : a . x = 0 mod m for every (a, m)}."""
    basis = [[int(i == j) for j in range(dim)] for i in range(dim)]
    for a, m in constraints:
        t = [sum(ai * bi for ai, bi in zip(a, b)) % m for b in basis]
        if not any(t):
            continue
        aug = [[t[i]] + [int(i == j) for j in range(dim)] for i in range(dim)]
        aug.append([m] + [0] * dim)
        h = integer_hnf(aug)
        kernel = [row[1:] for row in h if row[0] == 0]
        basis = integer_hnf([[sum(k[i] * basis[i][j] for i in range(dim)) for j in range(dim)] for k in kernel])
    return basis


def lll_reduce(basis: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(basis)
    dm = DomainMatrix([[ZZ(int(x)) for x in r] for r in basis], (n, len(basis[0])), ZZ)
    return [[int(x) for x in r] for r in dm.lll().to_list()]


def short_vectors(basis: Sequence[Sequence[int]], radius_sq: int) -> list[tuple[int, ...]]:
    """All lattice vectors with squared norm <= radius_sq (Fincke-Pohst, exact arithmetic)."""
    b = lll_reduce(basis)
    n = len(b)
    bstar: list[list[Fraction]] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms: list[Fraction] = []
    for i in range(n):
        v = [Fraction(x) for x in b[i]]
        for j in range(i):
            mu[i][j] = sum((Fraction(x) * y for x, y in zip(b[i], bstar[j])), Fraction(0)) / norms[j]
            v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(sum((a * a for a in v), Fraction(0)))
    out: list[tuple[int, ...]] = []
    coeff = [0] * n

    def rec(k: int, remaining: Fraction):
        center = -sum((coeff[j] * mu[j][k] for j in range(k + 1, n)), Fraction(0))
        # |x_k - center|^2 * norms[k] <= remaining
        span = remaining / norms[k]
        lo = center - _frac_sqrt_ceil(span)
        hi = center + _frac_sqrt_ceil(span)
        for x in range(_ceil(lo), _floor(hi) + 1):
            d = (x - center) ** 2 * norms[k]
            if d > remaining:
                continue
            coeff[k] = x
            if k == 0:
                out.append(tuple(sum(coeff[i] * b[i][j] for i in range(n)) for j in range(len(b[0]))))
            else:
                rec(k - 1, remaining - d)
        coeff[k] = 0

    rec(n - 1, Fraction(radius_sq))
    return out


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _frac_sqrt_ceil(x: Fraction) -> int:
    # integer >= sqrt(x)
    q = _ceil(x)
    s = isqrt(q)
    return s if s * s >= q else s + 1


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out
