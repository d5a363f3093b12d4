from __future__ import annotations

from itertools import product
from math import factorial

import pytest

from multisch.exactlin import FPModule
from multisch.gamma import sigma_alpha
from multisch.multiset import Multiset, factorial as ms_factorial, partitions, representative
from multisch.polyfun import eval_on_free
from multisch.sigma import (
    CoxeterViolation,
    SigmaModule,
    evaluate_S,
    extend_to_sch_module,
    orbit_module,
    regular,
    scalar_extend,
    sign,
    trivial,
)

P = Multiset.partition


def test_orbit_module_examples():
    m = orbit_module(P([2]))
    assert m.rank == 1 and m.gen_actions[0].tolist() == [[1]]
    m = orbit_module(P([1, 1]))
    assert m.rank == 2 and m.gen_actions[0].tolist() == [[0, 1], [1, 0]]
    assert orbit_module(P([2, 1])).rank == 3


def test_orbit_sizes_against_brute_force():
    for n in range(7):
        for lam in partitions(n):
            a = representative(lam)
            brute = sum(1 for w in product(a.support, repeat=n)
                        if all(w.count(x) == a.mult(x) for x in a.support))
            assert len(sigma_alpha(a)) == brute == factorial(n) // ms_factorial(a)


def test_coxeter_validation_rejects_bad_modules():
    with pytest.raises(CoxeterViolation):
        SigmaModule(2, FPModule.free(1), [[[2]]])
    # s1 and s2 both swap but fail the braid relation on this 2-dim module
    with pytest.raises(CoxeterViolation):
        SigmaModule(3, FPModule.free(2), [[[0, 1], [1, 0]], [[1, 0], [0, -1]]])
    with pytest.raises(CoxeterViolation):
        SigmaModule(3, FPModule.free(1), [[[1]]])
    # well-definedness: on Z/2, s acting by 1 is fine
    SigmaModule(2, FPModule.cyclic(2), [[[1]]])


def test_scalar_extend_examples():
    assert str(scalar_extend(trivial(2), P([1, 1]))) == "Z"
    assert str(scalar_extend(sign(2), P([2]))) == "Z/2"
    assert str(scalar_extend(sign(2), P([1, 1]))) == "Z"
    with pytest.raises(ValueError):
        scalar_extend(trivial(2), P([3]))


def test_trivial_extension_has_rank_one():
    for n in range(1, 5):
        for lam in partitions(n):
            inv = scalar_extend(trivial(n), representative(lam)).invariants
            assert inv.free == 1 and inv.torsion == ()


def test_regular_extension_is_the_orbit_module():
    for n in range(1, 4):
        for lam in partitions(n):
            a = representative(lam)
            assert str(scalar_extend(regular(n), a)) == f"Z^{len(sigma_alpha(a))}".replace("Z^1", "Z")


def test_evaluate_S_examples():
    assert str(evaluate_S([trivial(2)], 2)) == "Z^3"
    assert str(evaluate_S([sign(2)], 1)) == "Z/2"
    zero = SigmaModule(2, FPModule(0), [[]] * 1, validate=False)
    assert evaluate_S([zero], 3).is_zero()


def test_extension_examples():
    ext = extend_to_sch_module(regular(2))
    assert str(ext.component(P([1, 1]))) == "Z^2" and str(ext.component(P([2]))) == "Z"
    ext = extend_to_sch_module(sign(2))
    assert str(ext.component(P([1, 1]))) == "Z" and str(ext.component(P([2]))) == "Z/2"
    ext = extend_to_sch_module(trivial(3))
    assert all(str(c) == "Z" for c in ext.components.values())


def test_extension_is_a_valid_module():
    for M in (trivial(2), sign(2), regular(2), trivial(3), sign(3)):
        assert extend_to_sch_module(M).validate() == []


def test_evaluate_S_agrees_with_extension():
    for n in range(1, 4):
        for M in (trivial(n), sign(n), regular(n)):
            ext = extend_to_sch_module(M)
            for m in range(1, 4):
                assert evaluate_S([M], m).isomorphic(eval_on_free(ext, m).module)


def test_sigma_json_round_trip():
    M = sign(3)
    back = SigmaModule.from_json(M.to_json())
    assert back.n == 3 and [a.tolist() for a in back.gen_actions] == [a.tolist() for a in M.gen_actions]
