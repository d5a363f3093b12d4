from __future__ import annotations

from itertools import permutations, product

import pytest
from hypothesis import given, strategies as st

from multisch.multiset import (
    Multiset,
    ParseError,
    canonical_iso,
    canonical_shape,
    cardinality,
    compositions,
    disjoint_union,
    factorial,
    is_isomorphic,
    partitions,
    product as ms_product,
    relabel,
    splittings,
)

multisets = st.dictionaries(st.integers(0, 6), st.integers(1, 3), max_size=4).map(Multiset.from_dict)


def test_cardinality_examples():
    assert cardinality(Multiset()) == 0
    assert cardinality(Multiset.from_dict({1: 2, 2: 1})) == 3
    assert cardinality(Multiset.ones(5)) == 5


def test_factorial_examples():
    assert factorial(Multiset.from_dict({1: 2, 2: 1})) == 2
    assert factorial(Multiset.ones(4)) == 1
    assert factorial(Multiset.from_dict({1: 3, 2: 3})) == 36
    assert factorial(Multiset()) == 1


def test_sum_examples():
    a = Multiset.from_dict({1: 1})
    assert a + a == Multiset.from_dict({1: 2})
    t = Multiset.from_dict({3: 2, 4: 1})
    assert Multiset() + t == t
    assert Multiset.from_dict({1: 2}) + Multiset.from_dict({2: 1}) == Multiset.from_dict({1: 2, 2: 1})


def test_disjoint_union_keeps_copies_apart():
    u, ia, ib = disjoint_union(Multiset.from_dict({1: 2}), Multiset.from_dict({1: 1}))
    assert u == Multiset.partition([2, 1])
    assert ia == {1: 1} and ib == {1: 2}
    u, _, ib = disjoint_union(Multiset(), Multiset.from_dict({7: 3}))
    assert u == Multiset.partition([3]) and ib == {7: 1}
    u, _, _ = disjoint_union(Multiset.from_dict({1: 2}), Multiset.from_dict({2: 3}))
    assert cardinality(u) == 5


def test_product_examples():
    p, pairs = ms_product(Multiset.from_dict({1: 2}), Multiset.from_dict({2: 3}))
    assert p.mults == (6,) and pairs[1] == (1, 2)
    assert ms_product(Multiset(), Multiset.ones(3))[0] == Multiset()
    p, _ = ms_product(Multiset.ones(2), Multiset.ones(2))
    assert p.mults == (1, 1, 1, 1)


def test_canonical_shape_examples():
    assert canonical_shape(Multiset.from_dict({1: 1, 2: 2})) == (2, 1)
    assert canonical_shape(Multiset.from_dict({5: 2, 9: 1})) == (2, 1)
    assert canonical_shape(Multiset()) == ()


def test_splittings_examples():
    sp = splittings(Multiset.from_dict({3: 2}))
    assert [(a.mults, b.mults) for a, b in sp] == [((2,), ()), ((1,), (1,)), ((), (2,))]
    assert len(splittings(Multiset.ones(2))) == 4
    assert splittings(Multiset()) == [(Multiset(), Multiset())]


def test_parse_and_print_round_trip():
    for text in ["[2,1]", "{1:2, 3:1}", "[]", "{}", "[1,1,1]"]:
        s = Multiset.parse(text)
        assert Multiset.parse(str(s)) == s
    assert str(Multiset.parse("{1:2,2:1}")) == "[2,1]"
    assert Multiset.parse("{}") == Multiset.parse("[]")


@pytest.mark.parametrize("text, pos", [("[2,", 3), ("{1:0}", 3), ("(1)", 0), ("[1] x", 4), ("{1:1, 1:2}", 6)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as exc:
        Multiset.parse(text)
    assert exc.value.pos == pos


def test_rejects_bad_storage():
    with pytest.raises(ValueError):
        Multiset(((2, 1), (1, 1)))
    with pytest.raises(ValueError):
        Multiset(((1, 0),))


@given(multisets, multisets, multisets)
def test_sum_is_a_commutative_monoid(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a + Multiset() == a


@given(multisets, multisets)
def test_cardinality_is_additive_and_multiplicative(a, b):
    assert cardinality(a + b) == cardinality(a) + cardinality(b)
    assert cardinality(ms_product(a, b)[0]) == cardinality(a) * cardinality(b)
    assert cardinality(disjoint_union(a, b)[0]) == cardinality(a) + cardinality(b)


def _brute_isomorphic(a: Multiset, b: Multiset) -> bool:
    if len(a) != len(b):
        return False
    return any(all(a.mult(x) == b.mult(y) for x, y in zip(a.support, perm))
               for perm in permutations(b.support))


def test_shape_detects_isomorphism_exhaustively():
    small = []
    for k in range(4):
        for mults in product(range(1, 4), repeat=k):
            if sum(mults) <= 6:
                small.append(Multiset.partition(mults))
    for a in small:
        for b in small:
            assert is_isomorphic(a, b) == _brute_isomorphic(a, b)


@given(multisets)
def test_canonical_iso_lands_on_the_representative(a):
    iso = canonical_iso(a)
    r = relabel(a, iso)
    assert r.support == tuple(range(1, len(a) + 1))
    assert r.mults == canonical_shape(a)


def test_splitting_count_against_brute_force():
    for k in range(4):
        for mults in product(range(1, 4), repeat=k):
            g = Multiset.partition(mults)
            if cardinality(g) > 6:
                continue
            sp = splittings(g)
            expected = 1
            for m in mults:
                expected *= m + 1
            assert len(sp) == expected == len(set(sp))
            for a, b in sp:
                assert a + b == g


def test_partitions_and_compositions():
    assert [len(partitions(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert len(compositions(Multiset.partition([2]), 3)) == 6
