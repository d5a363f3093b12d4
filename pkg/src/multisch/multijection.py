"""Multijections between finite multisets.

A multijection ``f: S -> T`` is a map on supports whose fibres carry the
target multiplicities: ``mult_T(t) == sum(mult_S(s) for s with f(s) == t)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _product
from math import factorial as _factorial, prod
from typing import Iterable, Mapping

from multisch import kernels
from multisch.multiset import (
    Multiset,
    canonical_shape,
    cardinality,
    compositions,
    disjoint_union as _ms_disjoint_union,
    factorial,
    splittings,
)


class EndpointError(ValueError):
    """Morphisms whose endpoints do not match were combined."""


class InvalidMultijection(ValueError):
    pass


@dataclass(frozen=True)
class Multijection:
    source: Multiset
    target: Multiset
    mapping: tuple[tuple[int, int], ...]

    def __post_init__(self):
        src = self.source.support
        if tuple(s for s, _ in self.mapping) != src:
            raise InvalidMultijection("map must be total on the source support")
        fibre = {}
        for s, t in self.mapping:
            fibre[t] = fibre.get(t, 0) + self.source.mult(s)
        if fibre != self.target.as_dict():
            raise InvalidMultijection(
                f"fibre sums {fibre} do not match target {self.target}")

    @classmethod
    def from_map(cls, source: Multiset, target: Multiset, mapping: Mapping[int, int]) -> Multijection:
        return cls(source, target, tuple((s, mapping[s]) for s in source.support))

    @property
    def map(self) -> dict[int, int]:
        return dict(self.mapping)

    def __call__(self, s: int) -> int:
        for a, b in self.mapping:
            if a == s:
                return b
        raise KeyError(s)

    def fibre(self, t: int) -> tuple[int, ...]:
        return tuple(s for s, b in self.mapping if b == t)

    def is_isomorphism(self) -> bool:
        return len(self.source) == len(self.target)

    def __str__(self):
        arrows = ", ".join(f"{s}->{t}" for s, t in self.mapping)
        return f"{self.source} -> {self.target} ({arrows})"


def identity(s: Multiset) -> Multijection:
    return Multijection(s, s, tuple((x, x) for x in s.support))


def induced(source: Multiset, mapping: Mapping[int, int]) -> Multijection:
    """The multijection out of `source` whose target has the fibre sums of `mapping`."""
    d: dict[int, int] = {}
    for s, m in source.entries:
        t = mapping[s]
        d[t] = d.get(t, 0) + m
    return Multijection.from_map(source, Multiset.from_dict(d), mapping)


def compose(g: Multijection, f: Multijection) -> Multijection:
    """``g ∘ f``; requires ``f.target == g.source``."""
    if f.target != g.source:
        raise EndpointError(f"cannot compose: {f.target} != {g.source}")
    gm = g.map
    return Multijection(f.source, g.target, tuple((s, gm[t]) for s, t in f.mapping))


def inverse(f: Multijection) -> Multijection:
    if not f.is_isomorphism():
        raise InvalidMultijection("only isomorphisms are invertible")
    inv = {t: s for s, t in f.mapping}
    return Multijection.from_map(f.target, f.source, inv)


def degree(f: Multijection) -> int:
    """``target! / source!``, a product of one multinomial per target point."""
    d = 1
    for t, m in f.target.entries:
        d *= _factorial(m) // prod(_factorial(f.source.mult(s)) for s in f.fibre(t))
    return d


def relabeled(f: Multijection, src_map: Mapping[int, int], tgt_map: Mapping[int, int]) -> Multijection:
    """Transport `f` along relabelings of its source and target supports."""
    src = Multiset.from_dict({src_map[s]: m for s, m in f.source.entries})
    tgt = Multiset.from_dict({tgt_map[t]: m for t, m in f.target.entries})
    return Multijection.from_map(src, tgt, {src_map[s]: tgt_map[t] for s, t in f.mapping})


def disjoint_union(f: Multijection, g: Multijection) -> Multijection:
    src, is1, is2 = _ms_disjoint_union(f.source, g.source)
    tgt, it1, it2 = _ms_disjoint_union(f.target, g.target)
    mp = {is1[s]: it1[t] for s, t in f.mapping}
    mp.update({is2[s]: it2[t] for s, t in g.mapping})
    return Multijection.from_map(src, tgt, mp)


def final_decomposition(f: Multijection) -> list[Multijection]:
    """One final multijection per target point, in target label order."""
    pieces = []
    for t, m in f.target.entries:
        fib = f.fibre(t)
        src = Multiset(tuple((s, f.source.mult(s)) for s in fib))
        pieces.append(Multijection(src, Multiset(((t, m),)), tuple((s, t) for s in fib)))
    return pieces


def elementary_factorization(f: Multijection) -> list[Multijection]:
    """Factor `f` into binary merges followed by at most one isomorphism.

    Each merge step joins the two smallest labels of the currently largest
    fibre (ties go to the smaller target label); the surviving point keeps the
    smaller label.  Composing the steps in list order gives back `f`.
    """
    steps: list[Multijection] = []
    cur = f.source
    current = f.map  # point of `cur` -> target label
    while True:
        fibres: dict[int, list[int]] = {}
        for s in cur.support:
            fibres.setdefault(current[s], []).append(s)
        big = [t for t, pts in fibres.items() if len(pts) >= 2]
        if not big:
            break
        t = min(big, key=lambda x: (-len(fibres[x]), x))
        a, b = sorted(fibres[t])[:2]
        step = induced(cur, {s: (a if s == b else s) for s in cur.support})
        steps.append(step)
        cur = step.target
        del current[b]
    last = Multijection.from_map(cur, f.target, {s: current[s] for s in cur.support})
    if last.mapping != tuple((s, s) for s in cur.support) or cur != f.target:
        steps.append(last)
    return steps


def compose_all(steps: Iterable[Multijection], start: Multiset) -> Multijection:
    out = identity(start)
    for st in steps:
        out = compose(st, out)
    return out


def all_multijections(source: Multiset, target: Multiset) -> list[Multijection]:
    """Every multijection ``source -> target`` (brute force over support maps)."""
    out = []
    if cardinality(source) != cardinality(target):
        return out
    want = target.as_dict()
    for images in _product(target.support, repeat=len(source)):
        fib: dict[int, int] = {}
        for (_, m), t in zip(source.entries, images):
            fib[t] = fib.get(t, 0) + m
        if fib == want:
            out.append(Multijection(source, target, tuple(zip(source.support, images))))
    return out


def set_partitions(items: tuple[int, ...]) -> list[list[list[int]]]:
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for part in set_partitions(rest):
        out.append([[first]] + part)
        for i in range(len(part)):
            out.append(part[:i] + [[first] + part[i]] + part[i + 1:])
    return out


def multijections_from(source: Multiset) -> list[Multijection]:
    """One multijection out of `source` per isomorphism class of targets-with-map.

    These are the induced maps of the set partitions of the support; each
    block is collapsed onto its smallest label.
    """
    out = []
    for blocks in set_partitions(source.support):
        mp = {}
        for blk in blocks:
            for s in blk:
                mp[s] = min(blk)
        out.append(induced(source, mp))
    return out


# -- spans and pullbacks ----------------------------------------------------

@dataclass(frozen=True)
class Span:
    """``A <-left- apex -right-> B``."""

    left: Multijection
    right: Multijection

    def __post_init__(self):
        if self.left.source != self.right.source:
            raise EndpointError("span legs must share their apex")

    @property
    def apex(self) -> Multiset:
        return self.left.source


def span_isomorphic(x: Span, y: Span) -> bool:
    """Exhaustive search for an apex isomorphism commuting with both legs."""
    if x.left.target != y.left.target or x.right.target != y.right.target:
        return False
    ax, ay = x.apex, y.apex
    if canonical_shape(ax) != canonical_shape(ay):
        return False
    lx, rx, ly, ry = x.left.map, x.right.map, y.left.map, y.right.map
    key_x = sorted((lx[p], rx[p], ax.mult(p)) for p in ax.support)
    key_y = sorted((ly[p], ry[p], ay.mult(p)) for p in ay.support)
    return key_x == key_y


def pullback_components(f: Multijection, g: Multijection) -> list[Span]:
    """The weak fibre product of the cospan ``f: A -> C <- B :g``.

    One component per choice, for each target point ``c``, of a margin matrix
    on ``f^-1(c) x g^-1(c)`` with row sums from `A` and column sums from `B`.
    Components are ordered lexicographically in these matrices (target points
    in label order).  Apex labels ``1..`` enumerate the nonzero pairs in
    (c, s, t) order.
    """
    if f.target != g.target:
        raise EndpointError(f"cospan targets differ: {f.target} != {g.target}")
    A, B = f.source, g.source
    per_point = []
    for c, _ in f.target.entries:
        fs, gs = f.fibre(c), g.fibre(c)
        rows = [A.mult(s) for s in fs]
        cols = [B.mult(t) for t in gs]
        per_point.append((fs, gs, kernels.contingency_tables(rows, cols)))
    spans = []
    for choice in _product(*(tabs for _, _, tabs in per_point)):
        apex, left, right = [], {}, {}
        lab = 1
        for (fs, gs, _), tab in zip(per_point, choice):
            for i, s in enumerate(fs):
                for j, t in enumerate(gs):
                    v = tab[i * len(gs) + j]
                    if v:
                        apex.append((lab, v))
                        left[lab] = s
                        right[lab] = t
                        lab += 1
        ap = Multiset(tuple(apex))
        spans.append(Span(Multijection.from_map(ap, A, left), Multijection.from_map(ap, B, right)))
    return spans


def orbit_pullback_oracle(f: Multijection, g: Multijection) -> list[Span]:
    """Weak fibre product via symmetric-group orbits (independent check).

    Pairs ``(φ, ψ)`` of label words for ``A`` and ``B`` with ``f∘φ == g∘ψ``
    are grouped into orbits under position permutations, found by search
    over adjacent transpositions.  Each orbit gives the span whose apex
    counts the pairs ``(φ(k), ψ(k))``.  At most 6 points.
    """
    if f.target != g.target:
        raise EndpointError(f"cospan targets differ: {f.target} != {g.target}")
    n = cardinality(f.target)
    if n > 6:
        raise ValueError("orbit oracle limited to cardinality 6")
    A, B = f.source, g.source
    words_a = sorted(set(_perms([s for s, m in A.entries for _ in range(m)], n)))
    words_b = sorted(set(_perms([s for s, m in B.entries for _ in range(m)], n)))
    fm, gm = f.map, g.map
    by_image: dict[tuple, list] = {}
    for w in words_b:
        by_image.setdefault(tuple(gm[x] for x in w), []).append(w)
    points = [(u, v) for u in words_a for v in by_image.get(tuple(fm[x] for x in u), ())]
    seen: set = set()
    spans = []
    for start in points:
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        while stack:
            u, v = stack.pop()
            for i in range(n - 1):
                u2 = u[:i] + (u[i + 1], u[i]) + u[i + 2:]
                v2 = v[:i] + (v[i + 1], v[i]) + v[i + 2:]
                if (u2, v2) not in seen:
                    seen.add((u2, v2))
                    stack.append((u2, v2))
        u, v = start
        counts: dict[tuple[int, int], int] = {}
        for a, b in zip(u, v):
            counts[(a, b)] = counts.get((a, b), 0) + 1
        pairs = sorted(counts)
        apex = Multiset(tuple((k, counts[p]) for k, p in enumerate(pairs, start=1)))
        spans.append(Span(Multijection.from_map(apex, A, {k: p[0] for k, p in enumerate(pairs, start=1)}),
                          Multijection.from_map(apex, B, {k: p[1] for k, p in enumerate(pairs, start=1)})))
    return spans


def _perms(pool: list[int], n: int):
    from itertools import permutations
    return permutations(pool, n)


# -- multi-shuffles ---------------------------------------------------------

@dataclass(frozen=True)
class MultiShuffle:
    heap: tuple[Multiset, ...]
    target: Multiset
    underlying: Multijection
    # placement[i] maps labels of heap[i] to labels of the disjoint union
    placement: tuple[tuple[tuple[int, int], ...], ...]


def multishuffle(heap: Iterable[Multiset]) -> MultiShuffle:
    """The induced multijection from the disjoint union of `heap` onto its sum."""
    heap = tuple(heap)
    union = Multiset()
    placement = []
    for h in heap:
        union, inj_a, inj_b = _ms_disjoint_union(union, h)
        # relabel earlier placements through inj_a (identity on 1..k here)
        placement = [tuple((lab, inj_a[v]) for lab, v in p) for p in placement]
        placement.append(tuple(sorted(inj_b.items())))
    mp = {}
    for h, p in zip(heap, placement):
        for lab, new in p:
            mp[new] = lab
    target = Multiset()
    for h in heap:
        target = target + h
    und = induced(union, mp) if union.entries else identity(union)
    return MultiShuffle(heap, target, und, tuple(placement))


def enumerate_multishuffles(parts: int, target: Multiset) -> list[MultiShuffle]:
    """All `parts`-heaped multi-shuffles onto `target`, in splitting order."""
    if parts == 2:
        heaps = [(a, b) for a, b in splittings(target)]
    else:
        heaps = compositions(target, parts)
    return [multishuffle(h) for h in heaps]


__all__ = [
    "EndpointError",
    "InvalidMultijection",
    "Multijection",
    "MultiShuffle",
    "Span",
    "all_multijections",
    "compose",
    "compose_all",
    "degree",
    "disjoint_union",
    "elementary_factorization",
    "enumerate_multishuffles",
    "factorial",
    "final_decomposition",
    "identity",
    "induced",
    "inverse",
    "multijections_from",
    "multishuffle",
    "orbit_pullback_oracle",
    "pullback_components",
    "relabeled",
    "set_partitions",
    "span_isomorphic",
]
