"""Acceptance criteria, one printed PASS/FAIL line each.

All comparisons are exact (tolerance 0: integers and fractions only).  Each
criterion must also finish within TIME_BUDGET seconds.  Run directly with
``python tests/test_acceptance.py`` or through pytest.
"""
from __future__ import annotations

import os
import random
import subprocess
import sys
import time
from collections import Counter
from itertools import permutations, product
from math import comb, factorial
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from multisch.exactlin import FPModule, as_matrix, cokernel_invariants, identity_matrix, rank_q
from multisch.gamma import (
    ExactMatrix,
    basis,
    gamma_of_presentation,
    oracle_permutation_action,
    realize,
    realize_graph,
)
from multisch.multijection import (
    Multijection,
    all_multijections,
    degree,
    multishuffle,
    orbit_pullback_oracle,
    pullback_components,
)
from multisch.multiset import Multiset, disjoint_union, factorial as ms_factorial, partitions, representative, splittings
from multisch.plocal import char0_reduce, check_splitting, p_reduce
from multisch.polyfun import box_product, eval_on_free, eval_on_presented, representable
from multisch.rings import QQ
from multisch.schurcat import (
    SchMorphism,
    compose,
    compose_graphs,
    hom_basis,
    identity,
    lowerstar,
    lowerstar_graph,
    monoidal_graph,
    shuffle_factorize,
    upperstar,
)
from multisch.sigma import evaluate_S, extend_to_sch_module, regular, scalar_extend, sign, trivial

TIME_BUDGET = 120.0  # seconds per criterion
SEED = 20240601
P = Multiset.partition


def shapes(n: int) -> list[Multiset]:
    return [representative(l) for l in partitions(n)]


def multijections_up_to(n: int):
    for k in range(n + 1):
        for a in shapes(k):
            for b in shapes(k):
                yield from all_multijections(a, b)


# -- criteria ---------------------------------------------------------------

def criterion_1():
    checks = 0
    for f in multijections_up_to(5):
        d = degree(f)
        assert d * ms_factorial(f.source) == ms_factorial(f.target)
        assert compose(lowerstar(f), upperstar(f)) == identity(f.target).scale(d)
        checks += 1
    return True, f"{checks} multijections, |α| <= 5, exact"


def criterion_2():
    ranks = 0
    for n in range(5):
        for b in shapes(n):
            for a in shapes(n):
                hb = hom_basis(b, a)
                rows = [realize_graph(g, n).flat() for g in hb]
                if rank_q(rows) != len(hb):
                    return False, f"rank deficit for {b} -> {a}"
                ranks += 1
    rng = random.Random(SEED)
    pairs = 0
    while pairs < 200:
        n = rng.randint(1, 4)
        b, a, e = (rng.choice(shapes(n)) for _ in range(3))
        g = rng.choice(hom_basis(b, a))
        h = rng.choice(hom_basis(a, e))
        hg = compose(SchMorphism.of(h), SchMorphism.of(g))
        if realize(hg, n) != realize_graph(h, n) @ realize_graph(g, n):
            return False, f"functoriality fails for {h} after {g}"
        pairs += 1
    return True, f"{ranks} shape pairs injective, {pairs} random pairs functorial (m = n <= 4)"


def criterion_3():
    triples = 0
    for n in range(4):
        for b in shapes(n):
            for a in shapes(n):
                for e in shapes(n):
                    for g in hom_basis(b, a):
                        for h in hom_basis(a, e):
                            lhs = realize(compose(SchMorphism.of(h), SchMorphism.of(g)), n)
                            if lhs != realize_graph(h, n) @ realize_graph(g, n):
                                return False, f"structure constants wrong for {h} after {g}"
                            triples += 1

    def key(sp):
        l, r = sp.left.map, sp.right.map
        return tuple(sorted((l[q], r[q], sp.apex.mult(q)) for q in sp.apex.support))

    cospans = 0
    for n in range(5):
        for c in shapes(n):
            legs = [f for mu in partitions(n) for f in all_multijections(representative(mu), c)]
            for f in legs:
                for g in legs:
                    if Counter(map(key, pullback_components(f, g))) != Counter(map(key, orbit_pullback_oracle(f, g))):
                        return False, f"pullback mismatch for {f}, {g}"
                    cospans += 1
    return True, f"{triples} composable pairs (|α| <= 3), {cospans} cospans (|γ| <= 4)"


def weak_compositions(d: int, n: int):
    if n == 0:
        if d == 0:
            yield ()
        return
    for a in range(d, -1, -1):
        for rest in weak_compositions(d - a, n - 1):
            yield (a,) + rest


def as_multiset(c) -> Multiset:
    return Multiset.from_dict({i: x for i, x in enumerate(c, start=1) if x})


def criterion_4():
    expect = {(2, 2): 10, (2, 3): 20, (3, 2): 45, (3, 3): 165}
    out = []
    for (n, d), fixture in expect.items():
        brute = sum(1 for m in product(range(d + 1), repeat=n * n) if sum(m) == d)
        closed = comb(n * n + d - 1, d)
        comps = list(weak_compositions(d, n))
        total = sum(len(hom_basis(as_multiset(b), as_multiset(a))) for b in comps for a in comps)
        if not brute == closed == fixture == total:
            return False, f"(n,d)=({n},{d}): brute {brute}, closed {closed}, hom sum {total}"
        out.append(f"({n},{d})->{total}")
    return True, ", ".join(out)


def criterion_5():
    Z2 = FPModule.cyclic(2)
    a = gamma_of_presentation(2, Z2)
    b = eval_on_presented(representable(P([2])), Z2)
    ok = str(a) == "Z/4" and str(b) == "Z/4" and a.isomorphic(b)
    return ok, f"Γ^2(Z/2) = {a} (ideal route), {b} (coend route)"


def criterion_6():
    count = 0
    for p in (2, 3, 5):
        for n in range(9):
            for a in shapes(n):
                r = p_reduce(a, p)
                res = check_splitting(r)
                if not all(res.values()):
                    return False, f"p={p}, α={a}: {res}"
                count += 1
    for n in range(5):
        for a in shapes(n):
            r = char0_reduce(a)
            if r.reduced != Multiset.ones(n) or not all(check_splitting(r, QQ).values()):
                return False, f"char 0, α={a}"
    return True, f"{count} p-local reductions (|α| <= 8, p in 2,3,5) and char 0 up to n = 4"


def _degree_p_maps(p: int):
    m = Multijection.from_map(Multiset.ones(p), P([p]), {k: 1 for k in range(1, p + 1)})
    return lowerstar(m), upperstar(m)


def _symmetrizer_ok(p: int, g_after_f: SchMorphism) -> bool:
    for width in range(1, 4):
        sym = None
        for perm in permutations(range(p)):
            M = oracle_permutation_action(p, width, perm)
            sym = M if sym is None else sym + M
        if realize(g_after_f, width) != sym:
            return False
    return True


def criterion_7_literal():
    parts = []
    ok = True
    for p in (2, 3):
        f, g = _degree_p_maps(p)
        fg, gf = compose(f, g), compose(g, f)
        lit = fg == identity(P([p])).scale(p)
        lit = lit and all(realize(fg, w) == ExactMatrix.identity(len(basis(P([p]), w))).scale(p) for w in (1, 2, 3))
        sym = _symmetrizer_ok(p, gf)
        ok = ok and lit and sym
        parts.append(f"p={p}: fg=p {'yes' if lit else 'no'} (got {fg}), gf=Σσ {'yes' if sym else 'no'}")
    return ok, "; ".join(parts)


def criterion_7_hecke():
    parts = []
    for p in (2, 3):
        f, g = _degree_p_maps(p)
        fg, gf = compose(f, g), compose(g, f)
        unit = fg == identity(P([p])).scale(factorial(p))
        unit = unit and all(realize(fg, w) == ExactMatrix.identity(len(basis(P([p]), w))).scale(factorial(p))
                            for w in (1, 2, 3))
        if not (unit and _symmetrizer_ok(p, gf)):
            return False, f"p={p}"
        parts.append(f"p={p}: fg={factorial(p)}·id, gf=Σσ")
    return True, "; ".join(parts) + " (p! = p·unit p-locally)"


def _perm_matrix(M, perm: tuple[int, ...]):
    """Action of a position permutation as a word in adjacent transpositions."""
    word, cur = [], list(perm)
    for i in range(len(cur)):
        for j in range(len(cur) - 1 - i):
            if cur[j] > cur[j + 1]:
                cur[j], cur[j + 1] = cur[j + 1], cur[j]
                word.append(j)
    A = identity_matrix(M.rank)
    for j in word:
        A = A.dot(M.gen_actions[j])
    return A


def young_coinvariants(M, alpha: Multiset):
    """``M`` modulo ``σm - m`` for every σ in the Young subgroup of `alpha`."""
    blocks, start = [], 0
    for m in alpha.mults:
        blocks.append(range(start, start + m))
        start += m
    n = M.n
    cols = [M.underlying.relations]
    I = identity_matrix(M.rank)
    for perm in permutations(range(n)):
        if all(perm[k] in b for b in blocks for k in b):
            cols.append(_perm_matrix(M, perm) - I)
    rel = np.concatenate([as_matrix(c, rows=M.rank) for c in cols], axis=1) if cols else I[:, :0]
    return cokernel_invariants(rel)


def criterion_8():
    named = {"trivial": trivial, "sign": sign, "regular": regular}
    checks = 0
    for n in (2, 3):
        for name, make in named.items():
            M = make(n)
            for a in shapes(n):
                if scalar_extend(M, a).invariants != young_coinvariants(M, a):
                    return False, f"{name}_{n} at {a}"
                checks += 1
    fixed = (str(scalar_extend(trivial(2), P([1, 1]))) == "Z"
             and str(scalar_extend(sign(2), P([2]))) == "Z/2"
             and str(scalar_extend(sign(2), P([1, 1]))) == "Z")
    if not fixed:
        return False, "fixed examples"
    for n in (1, 2, 3):
        for make in named.values():
            M = make(n)
            ext = extend_to_sch_module(M)
            for m in (1, 2, 3):
                if not evaluate_S([M], m).isomorphic(eval_on_free(ext, m).module):
                    return False, f"S(M) vs extension, n={n}, m={m}"
                checks += 1
    return True, f"{checks} coinvariant and evaluation comparisons"


def criterion_9():
    unique = 0
    for n in range(5):
        for na in range(n + 1):
            for alpha in shapes(na):
                for beta in shapes(n - na):
                    src = disjoint_union(alpha, beta)[0]
                    for gam in shapes(n):
                        for x in hom_basis(src, gam):
                            hits = 0
                            for a1, b1 in splittings(gam):
                                h = multishuffle((a1, b1)).underlying
                                for f in hom_basis(alpha, a1):
                                    for g in hom_basis(beta, b1):
                                        w = compose_graphs(lowerstar_graph(h), monoidal_graph(f, g))
                                        hits += w == {x: 1}
                            f, g, h = shuffle_factorize(x, alpha, beta)
                            w = compose_graphs(lowerstar_graph(h.underlying), monoidal_graph(f, g))
                            if hits != 1 or w != {x: 1}:
                                return False, f"factorization of {x} not unique ({hits})"
                            unique += 1
    one = representable(P([1]))
    B = box_product(one, one)
    ranks = (B.rank(P([2])), B.rank(P([1, 1])))
    mult = (eval_on_free(B, 2).module.rank, eval_on_free(one, 2).module.rank)
    ok = ranks == (1, 2) and mult == (4, 2)
    return ok, f"{unique} unique factorizations (|γ| <= 4); box ranks {ranks}; eval {mult[0]} = {mult[1]}·{mult[1]}"


def criterion_10():
    from test_cli import CASES, GOLDEN
    stable = 0
    for name, argv in sorted(CASES.items()):
        want = (GOLDEN / f"{name}.json").read_text(encoding="utf-8")
        for seed in ("0", "7"):
            res = subprocess.run([sys.executable, "-m", "multisch.cli", *argv, "--format", "json", "--sorted"],
                                 capture_output=True, text=True, env={**os.environ, "PYTHONHASHSEED": seed})
            if res.returncode != 0 or res.stdout != want:
                return False, f"{name} differs from its golden file"
        stable += 1
    return True, f"{stable} command examples byte-identical over 2 runs each"


CRITERIA = {
    "1": ("Hecke relation", criterion_1),
    "2": ("faithful realization", criterion_2),
    "3": ("structure-constant oracle", criterion_3),
    "4": ("dimension identity", criterion_4),
    "5": ("divided powers of torsion", criterion_5),
    "6": ("p-local reduction", criterion_6),
    "7": ("degree-p example, literal fg = p", criterion_7_literal),
    "7b": ("degree-p example, fg = p!", criterion_7_hecke),
    "8": ("scalar extension", criterion_8),
    "9": ("tensor structure", criterion_9),
    "10": ("CLI golden files", criterion_10),
}

# criterion 7 asks for fg = p; exact composition gives p!, so p = 3 must fail
EXPECTED_FAIL = {"7"}


def run_criterion(key: str) -> tuple[bool, str, float]:
    title, fn = CRITERIA[key]
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except AssertionError as exc:
        ok, detail = False, f"assertion: {exc}"
    dt = time.perf_counter() - t0
    if dt > TIME_BUDGET:
        ok, detail = False, f"{detail}; over budget"
    line = f"criterion {key:>3} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{dt:.1f}s, exact]"
    return ok, line, dt


def _check(key: str, capsys):
    ok, line, _ = run_criterion(key)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


@pytest.mark.parametrize("key", [k for k in CRITERIA if k not in EXPECTED_FAIL])
def test_criterion(key, capsys):
    _check(key, capsys)


@pytest.mark.xfail(strict=True, reason="fg = p! exactly; equals p only for p = 2")
def test_criterion_7_literal(capsys):
    _check("7", capsys)


if __name__ == "__main__":
    unexpected = 0
    for k in CRITERIA:
        ok, line, _ = run_criterion(k)
        print(line, flush=True)
        unexpected += ok == (k in EXPECTED_FAIL)
    sys.exit(1 if unexpected else 0)
