from hypothesis import given, settings
from hypothesis import strategies as st

from murley.lattice import (
    LocalLattice,
    canonical_residue,
    congruence_lattice,
    integer_hnf,
    short_vectors,
)
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from oracles import IntegerLattice, box, vp

P = 3
small = st.integers(-12, 12)
int_rows = st.lists(st.tuples(small, small), min_size=1, max_size=4)


@st.composite
def full_rank_rows(draw):
    rows = draw(int_rows)
    # add P^3 Z^2 so the lattice is full rank
    return rows + [(P**3, 0), (0, P**3)]


@settings(max_examples=80, deadline=None)
@given(full_rank_rows(), st.tuples(small, small))
def test_contains_matches_oracle_on_p_power_index(rows, w):
    # w lies in the Z_(P)-span of an integer lattice L iff d0 w lies in L,
    # where d0 is the part of [Z^2 : L] prime to P
    oracle = IntegerLattice([list(r) for r in rows])
    d0 = abs(int(oracle.basis.det()))
    while d0 % P == 0:
        d0 //= P
    assert LocalLattice(P, 2, rows).contains(w) == oracle.contains([d0 * x for x in w])


@given(int_rows)
def test_echelon_is_canonical(rows):
    a = LocalLattice(P, 2, rows)
    b = LocalLattice(P, 2, list(reversed(rows)) + [tuple(x + y for x, y in zip(rows[0], rows[-1]))])
    assert a == b


def test_intersect_and_index():
    L = LocalLattice(5, 2, [(1, 7), (0, 25)])
    std = LocalLattice.standard(5, 2)
    assert L.index_in(std) == 2
    assert L.intersect(LocalLattice(5, 2, [(5, 0), (0, 1)])).index_in(std) == 3
    assert LocalLattice.standard(5, 2, 1).truncate(0) == std


@given(st.fractions(max_denominator=200), st.integers(0, 3))
def test_canonical_residue(x, v):
    r = canonical_residue(x, 5, v)
    assert 0 <= r < 5**v
    d = x - r
    assert d == 0 or vp(d, 5) >= v


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=4))
def test_integer_hnf_spans_same_group(rows):
    h = integer_hnf(rows)
    assert len(h) == Matrix(rows).rank()
    if h:
        assert hermite_normal_form(Matrix(h).T) == hermite_normal_form(Matrix(rows).T)


def test_congruence_lattice_and_short_vectors():
    cons = [([1, 2], 5), ([1, 0], 1)]
    basis = congruence_lattice(cons, 2)
    found = set(short_vectors(basis, 50))
    brute = {v for v in box(2, 7) if (v[0] + 2 * v[1]) % 5 == 0 and v[0] ** 2 + v[1] ** 2 <= 50}
    assert found == brute
