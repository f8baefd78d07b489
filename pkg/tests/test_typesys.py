import pytest
from hypothesis import given
from hypothesis import strategies as st

from murley.typesys import INF, Rule, TypeDescriptor, is_idempotent_type, split_p0_pinf, type_equal

values = st.one_of(st.integers(0, 5), st.just(INF))
window_primes = st.sampled_from([2, 3, 5, 7, 11, 13])


@st.composite
def descriptors(draw):
    entries = draw(st.dictionaries(window_primes, values, max_size=4))
    rules = ()
    if draw(st.booleans()):
        rules = (Rule(4, frozenset({1}), draw(values)),)
    return TypeDescriptor(entries=entries, rules=rules, default=draw(values))


@given(descriptors())
def test_json_round_trip(t):
    assert TypeDescriptor.from_json(t.to_json()) == t


@given(descriptors())
def test_type_equals_itself(t):
    assert type_equal(t, t, 50)


def test_rules_and_window():
    t = TypeDescriptor(entries={2: 3}, rules=(Rule(4, frozenset({1}), 0),), default=INF)
    assert t(2) == 3 and t(5) == 0 and t(7) == INF
    p0, pinf = split_p0_pinf(t, 20)
    assert p0 == [2, 5, 13, 17]
    assert pinf == [3, 7, 11, 19]
    # finitely many finite entries do not change the type
    assert is_idempotent_type(t)
    assert not is_idempotent_type(TypeDescriptor(rules=(Rule(4, frozenset({1}), 1),), default=0))
    assert is_idempotent_type(TypeDescriptor.from_sets([2, 3], [3], default=0))


def test_rejects_negative_and_bad_prime():
    with pytest.raises(ValueError):
        TypeDescriptor(entries={4: 0})
    with pytest.raises(ValueError):
        TypeDescriptor(entries={2: -1})


def test_type_equality_finite_changes():
    a = TypeDescriptor.zero()
    b = TypeDescriptor(entries={2: 5, 3: 1}, default=0)
    eq = type_equal(a, b, 30)
    assert eq and eq.discrepancies == (2, 3)
    assert not type_equal(a, TypeDescriptor(entries={2: INF}, default=0), 30)
    assert not type_equal(a, TypeDescriptor.constant(1), 30)


def test_split_horizon_check():
    with pytest.raises(ValueError):
        split_p0_pinf(TypeDescriptor(entries={13: 0}), 10)
