from __future__ import annotations

import random
from itertools import product as iproduct
from math import comb

import pytest

from multisch.exactlin import FPModule, rank_q
from multisch.gamma import (
    ExactMatrix,
    SizeError,
    apply_linear_map,
    basis,
    block_dimension,
    direct_sum_decompose,
    expected_dimension,
    gamma_of_presentation,
    gamma_shape_of_presentation,
    invariants_oracle,
    oracle_lower,
    oracle_realize_graph,
    oracle_upper,
    realize,
    realize_graph,
    realize_lower,
    realize_upper,
)
from multisch.multijection import Multijection, all_multijections, compose as mj_compose, degree
from multisch.multiset import Multiset, partitions, representative
from multisch.schurcat import GraphMorphism, compose, hom_basis, identity, lowerstar, upperstar

P = Multiset.partition
f11 = Multijection.from_map(P([1, 1]), P([2]), {1: 1, 2: 1})


def test_basis_examples():
    b = basis(P([2]), 2)
    assert b.basis == [((2, 0),), ((1, 1),), ((0, 2),)]
    assert len(basis(P([1, 1]), 2)) == 4
    assert len(basis(Multiset(), 7)) == 1


def test_basis_dimension_formula():
    for n in range(5):
        for lam in partitions(n):
            for m in range(5):
                a = representative(lam)
                brute = sum(1 for e in iproduct(*(iproduct(range(k + 1), repeat=m) for k in lam))
                            if all(sum(r) == k for r, k in zip(e, lam)))
                assert len(basis(a, m)) == expected_dimension(a, m) == brute


def test_realize_lower_examples():
    assert realize_lower(f11, 1).to_dense() == [[2]]
    assert realize_lower(Multijection.from_map(P([2]), P([2]), {1: 1}), 2) == ExactMatrix.identity(3)
    L = realize_lower(f11, 2)
    src, tgt = basis(P([1, 1]), 2), basis(P([2]), 2)
    j = src.index[((1, 0), (0, 1))]
    assert L.column(j) == {tgt.index[((1, 1),)]: 1}


def test_realize_upper_examples():
    assert realize_upper(f11, 1).to_dense() == [[1]]
    U = realize_upper(f11, 2)
    src, tgt = basis(P([1, 1]), 2), basis(P([2]), 2)
    col = U.column(tgt.index[((1, 1),)])
    assert col == {src.index[((1, 0), (0, 1))]: 1, src.index[((0, 1), (1, 0))]: 1}


def test_realize_examples():
    assert realize(identity(P([2])), 2) == ExactMatrix.identity(3)
    x = compose(lowerstar(f11), upperstar(f11))
    assert realize(x, 2) == ExactMatrix.identity(3).scale(2)
    swap = GraphMorphism(P([1, 1]), P([1, 1]), ((0, 1), (1, 0)))
    R = realize_graph(swap, 2)
    sp = basis(P([1, 1]), 2)
    for j, (r1, r2) in enumerate(sp.basis):
        assert R.column(j) == {sp.index[(r2, r1)]: 1}


def test_apply_linear_map_examples():
    assert apply_linear_map(P([2]), [[3]]).to_dense() == [[9]]
    assert apply_linear_map(P([2]), [[1], [1]]).to_dense() == [[1], [1], [1]]
    perm = apply_linear_map(P([1, 1]), [[0, 1], [1, 0]])
    assert sorted(perm.data.values()) == [1, 1, 1, 1]


def _symmetric_oracle(k: int, g):
    """Expand (sum_i g_i e_i)^{⊗k} word by word, grouped by weight."""
    out = {}
    for word in iproduct(range(len(g)), repeat=k):
        w = tuple(sum(1 for x in word if x == i) for i in range(len(g)))
        c = 1
        for x in word:
            c *= g[x]
        out[w] = out.get(w, 0) + c
    return out


def _orbit_size(w):
    n, out = sum(w), 1
    for x in w:
        out *= comb(n, x)
        n -= x
    return out


def test_apply_linear_map_against_tensor_expansion():
    # γ_k(v) is v^{⊗k}; a weight basis vector is the sum over its orbit of words
    for g in ([1, 1], [2, -1], [1, 3, 2]):
        for k in range(1, 4):
            M = apply_linear_map(P([k]), [[x] for x in g])
            tgt = basis(P([k]), len(g))
            col = M.column(0)
            expect = _symmetric_oracle(k, g)
            for i, (w,) in enumerate(tgt.basis):
                assert col.get(i, 0) * _orbit_size(w) == expect.get(tuple(w), 0)


def test_apply_linear_map_is_functorial():
    rng = random.Random(4)
    for _ in range(15):
        shape = rng.choice([P([2]), P([1, 1]), P([2, 1]), P([3])])
        m, m1, m2 = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
        g = [[rng.randint(-2, 2) for _ in range(m)] for _ in range(m1)]
        h = [[rng.randint(-2, 2) for _ in range(m1)] for _ in range(m2)]
        hg = [[sum(h[i][k] * g[k][j] for k in range(m1)) for j in range(m)] for i in range(m2)]
        assert apply_linear_map(shape, hg) == apply_linear_map(shape, h) @ apply_linear_map(shape, g)


def test_oracle_examples():
    assert invariants_oracle(P([2]), 2).dimension == 3
    for n in range(1, 5):
        assert invariants_oracle(Multiset.ones(n), 1).dimension == 1
    assert oracle_lower(f11, 2) == realize_lower(f11, 2)
    assert oracle_upper(f11, 2) == realize_upper(f11, 2)
    with pytest.raises(SizeError):
        invariants_oracle(Multiset.ones(7), 1)


def test_oracle_agrees_with_weight_basis_realization():
    for n in range(1, 5):
        for mu in partitions(n):
            for lam in partitions(n):
                for f in all_multijections(representative(mu), representative(lam)):
                    for m in (1, 2):
                        assert realize_lower(f, m) == oracle_lower(f, m)
                        assert realize_upper(f, m) == oracle_upper(f, m)
    g = hom_basis(P([2, 1]), P([1, 1, 1]))[1]
    assert oracle_realize_graph(g, 2) == realize_graph(g, 2)


def test_coassociativity_and_associativity():
    for a, b, c in [(1, 1, 1), (2, 1, 1), (1, 2, 1)]:
        src = P([a, b, c])
        top = P([a + b + c])
        full = Multijection.from_map(src, top, {1: 1, 2: 1, 3: 1})
        left = Multijection.from_map(src, P([a + b, c]), {1: 1, 2: 1, 3: 2})
        right = Multijection.from_map(src, Multiset.from_dict({1: a, 2: b + c}), {1: 1, 2: 2, 3: 2})
        for m in (1, 2, 3):
            for first in (left, right):
                second = Multijection.from_map(first.target, top, {x: 1 for x in first.target.support})
                assert mj_compose(second, first) == full
                assert realize_upper(first, m) @ realize_upper(second, m) == realize_upper(full, m)
                assert realize_lower(second, m) @ realize_lower(first, m) == realize_lower(full, m)


def test_lower_after_upper_is_degree():
    for n in range(6):
        for mu in partitions(n):
            for lam in partitions(n):
                for f in all_multijections(representative(mu), representative(lam)):
                    for m in range(1, 4) if n <= 4 else (1, 2):
                        d = len(basis(f.target, m))
                        assert realize_lower(f, m) @ realize_upper(f, m) == ExactMatrix.identity(d).scale(degree(f))


def test_realization_is_injective_rationally():
    for n in range(5):
        shapes = [representative(l) for l in partitions(n)]
        for b in shapes:
            for a in shapes:
                rows = [realize_graph(g, n).flat() for g in hom_basis(b, a)]
                assert rank_q(rows) == len(rows)


def test_gamma_of_presentation_examples():
    assert str(gamma_of_presentation(2, FPModule.cyclic(2))) == "Z/4"
    assert str(gamma_of_presentation(2, FPModule.free(1))) == "Z"
    assert str(gamma_of_presentation(1, FPModule.cyclic(2))) == "Z/2"


def test_gamma_of_cyclic_groups():
    # Γ^n(Z/p^k) has a closed form we can test small cases of:
    # Γ^2(Z/2^k) = Z/2^{k+1}, Γ^2(Z/d) for odd d is Z/d, Γ^n(Z) = Z
    assert str(gamma_of_presentation(2, FPModule.cyclic(4))) == "Z/8"
    assert str(gamma_of_presentation(2, FPModule.cyclic(3))) == "Z/3"
    assert str(gamma_of_presentation(3, FPModule.free(2))) == "Z^4"
    assert str(gamma_of_presentation(0, FPModule.cyclic(2))) == "Z"
    # Γ^2 of a direct sum splits over multi-maps: Γ²A + A⊗B + Γ²B
    assert str(gamma_of_presentation(2, FPModule.from_invariants([2], 1))) == "Z/2 + Z/4 + Z"


def test_gamma_shape_of_presentation():
    assert str(gamma_shape_of_presentation(P([1, 1]), FPModule.cyclic(2))) == "Z/2"
    assert str(gamma_shape_of_presentation(P([2, 1]), FPModule.cyclic(2))) == "Z/2"


def test_direct_sum_decompose_examples():
    blocks = direct_sum_decompose(P([2]), [1, 1])
    assert len(blocks) == 3 and all(len(v) == 1 for v in blocks.values())
    assert len(direct_sum_decompose(P([1, 1]), [1, 1])) == 4
    assert len(direct_sum_decompose(P([2, 1]), [3])) == 1


def test_direct_sum_block_dimensions():
    for shape in (P([2]), P([2, 1]), P([1, 1, 1]), P([3, 1])):
        for widths in ([1, 2], [2, 2], [1, 1, 1]):
            blocks = direct_sum_decompose(shape, widths)
            assert sum(len(v) for v in blocks.values()) == len(basis(shape, sum(widths)))
            for key, idx in blocks.items():
                assert len(idx) == block_dimension(key, widths)
