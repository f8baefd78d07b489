import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from murley import groupforge as gf
from murley.padx import AtLeast, IntPolynomial, certified_roots, primes_upto
from murley.tcond import explicit_family, forge_family, hensel_family
from murley.typesys import INF, Rule, TypeDescriptor
from oracles import oracle_height

X2P1 = IntPolynomial.parse("1,0,1")
CUBE = IntPolynomial.parse("-2,0,0,1")
ZERO = TypeDescriptor.zero()
GAUSS_TYPE = TypeDescriptor(rules=(Rule(4, frozenset({1}), 0),), default=INF)


@pytest.fixture(scope="module")
def hensel_k3():
    # alpha_5 = 57 at K = 3
    fam = hensel_family(X2P1, [5, 13, 17], 3)
    return gf.build_murley_scheme(ZERO, 2, fam, 3)


@pytest.fixture(scope="module")
def gauss_scheme():
    primes = [p for p in primes_upto(60) if p % 4 == 1]
    fam = hensel_family(X2P1, primes, 5)
    return gf.build_murley_scheme(GAUSS_TYPE, 2, fam, 5)


@pytest.fixture(scope="module")
def forged():
    fam = forge_family(1, 5, primes_upto(100), 6, 42)
    return gf.build_murley_scheme(ZERO, 2, fam, 6)


def test_reference_examples(hensel_k3):
    s = hensel_k3
    assert s.alpha(5) == 57
    assert gf.delta_subspace(s, 5).basis == ((1, 57),)
    assert gf.element_height(s, (1, 7), 5) == 2
    assert s.height((1, 7), 5) == 2
    assert gf.element_height(s, (0, 1), 5) == 0
    assert s.local_membership((Fraction(1, 25), Fraction(7, 25)), 5)
    assert not s.local_membership((0, Fraction(1, 5)), 5)
    assert s.local_membership((1, 0), 5)


def test_infinite_primes(gauss_scheme):
    s = gauss_scheme
    assert 3 in s.pinf and 5 in s.p0
    assert gf.delta_subspace(s, 3).full
    assert gf.p_rank(s, 3) == 0 and gf.p_rank(s, 5) == 1
    assert isinstance(gf.element_height(s, (1, 2), 3), AtLeast)
    assert s.local_membership((Fraction(1, 27), 0), 3)


def test_rank_one_and_rejections():
    t = TypeDescriptor(entries={5: INF}, default=0)
    s = gf.build_murley_scheme(t, 1, None, 4, window=[2, 3, 5])
    assert gf.p_rank(s, 2) == 1 and gf.p_rank(s, 5) == 0
    assert gf.delta_subspace(s, 2).basis == ()
    with pytest.raises(gf.SchemeRejected) as err:
        gf.build_murley_scheme(ZERO, 2, explicit_family({p: 1 for p in primes_upto(50)}, 6), 6)
    failures = {v.poly: v for v in err.value.report.failures}
    assert len(failures[IntPolynomial((-1, 1))].saturated) == 15
    with pytest.raises(gf.SchemeRejected):
        gf.build_murley_scheme(TypeDescriptor.constant(INF), 1, None, 4)


def test_unsupported_denominator(forged):
    with pytest.raises(gf.UnsupportedDenominator):
        forged.local_membership((Fraction(1, 101), 0), 101)


@pytest.mark.parametrize("n", [2, 3])
def test_murley_identity(n):
    for fam in (forge_family(n - 1, 5, primes_upto(60), 6, 5), hensel_family(X2P1, [5, 13, 17, 29], 6)):
        if n == 3 and fam.provenance.kind == "hensel":
            fam = hensel_family(CUBE, [p for p in primes_upto(60) if p > 3 and certified_roots(CUBE, p, 6)], 6)
        s = gf.build_murley_scheme(ZERO, n, fam, 6)
        for p in s.window:
            d = gf.delta_subspace(s, p)
            r = gf.p_rank(s, p)
            assert r + d.dim == n and r <= 1
            assert s.lattice_p_rank(p) == r


def test_precision_saturation_rejects():
    # Res(x^3 - 2, 4x^2 + 5x - 1) = 5^4, so at K = 4 the value vanishes mod 5^K
    fam = hensel_family(CUBE, [5, 11, 17], 4)
    with pytest.raises(gf.SchemeRejected) as err:
        gf.build_murley_scheme(ZERO, 3, fam, 4)
    assert err.value.witness == IntPolynomial((-1, 5, 4))
    assert gf.build_murley_scheme(ZERO, 3, hensel_family(CUBE, [5, 11, 17], 6), 6).p0 == [5, 11, 17]


@settings(max_examples=60, deadline=None)
@given(st.tuples(st.integers(-60, 60), st.integers(-60, 60)).filter(any), st.integers(0, 9))
def test_height_formula_matches_oracle(a, i):
    s = _forged_small()
    p = s.p0[i % len(s.p0)]
    h = gf.element_height(s, a, p)
    o = oracle_height(s.chi(p), s.K, s.alpha(p), 2, p, a)
    assert o == (("saturated", h.bound) if isinstance(h, AtLeast) else h)
    assert s.height(a, p) == h


_SMALL = {}


def _forged_small():
    if "s" not in _SMALL:
        t = TypeDescriptor(entries={2: 1, 3: 2}, default=0)
        fam = forge_family(1, 5, primes_upto(23), 4, 9)
        _SMALL["s"] = gf.build_murley_scheme(t, 2, fam, 4)
    return _SMALL["s"]


def test_truncation_is_a_chain(gauss_scheme):
    s = gauss_scheme
    for p in (5, 13):
        prev = s.truncated(p, 0)
        for c in range(1, s.max_level(p) + 1):
            cur = s.truncated(p, c)
            assert cur.contains_lattice(prev)
            prev = cur
        for g in s.generators(p):
            assert s.local_membership(g, p)


def test_homogeneity(gauss_scheme, forged):
    rep = gf.homogeneity_probe(gauss_scheme, 100, 1)
    assert rep.passed
    assert max(len(x["discrepancy"]) for x in rep.samples) <= 3
    one = gf.homogeneity_probe(gauss_scheme, 1, 0, vectors=[(0, 1)])
    assert one.samples[0]["discrepancy"] == []
    assert gf.homogeneity_probe(forged, 100, 2).passed


def test_hom_rigidity(forged):
    mats = gf.hom_search(forged, forged, 10)
    assert sorted(m[0][0] for m in mats) == list(range(-10, 11))
    assert all(gf.is_scalar(m) for m in mats)
    other = gf.build_murley_scheme(ZERO, 2, forge_family(1, 5, primes_upto(100), 6, 43), 6)
    assert gf.hom_search(forged, other, 10) == [((0, 0), (0, 0))]


def test_hom_search_against_box(hensel_k3):
    # every box matrix passing the congruences is found, and nothing else
    from itertools import product

    s = hensel_k3
    cons = gf.hom_constraints(s, s)
    found = set(gf.hom_search(s, s, 3))
    brute = set()
    for v in product(range(-3, 4), repeat=4):
        if all(sum(a * x for a, x in zip(row, v)) % M == 0 for row, M in cons):
            brute.add(((v[0], v[1]), (v[2], v[3])))
    assert found == brute


def test_prochazka():
    G = gf.build_prochazka_example(4, 5)
    assert G.directions[:3] == ((1, 0), (0, 1), (1, 1))
    assert G.window == (2, 3, 5, 7)
    assert G.p_rank(5) == 1
    assert G.height((1, 0), 2) == AtLeast(5)
    assert G.height((0, 1), 2) == 0
    assert G.local_membership((Fraction(1, 125), Fraction(1, 125)), 5)
    assert G.lattice_p_rank(11) == 2


def test_free_scheme():
    t = TypeDescriptor(entries={2: 1}, default=0)
    F = gf.FreeScheme(t, 2, 4)
    assert F.local_membership((Fraction(1, 2), 0), 2)
    assert not F.local_membership((Fraction(1, 4), 0), 2)
    assert F.lattice_p_rank(3) == 2


def test_random_vectors_heights_consistent(gauss_scheme):
    rng = random.Random(3)
    for _ in range(30):
        a = (rng.randint(-40, 40), rng.randint(-40, 40))
        if not any(a):
            continue
        for p in (5, 13):
            h = gf.element_height(gauss_scheme, a, p)
            assert gauss_scheme.height(a, p) == h
