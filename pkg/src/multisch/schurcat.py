"""The Schur category: multisets with formal combinations of graphs as morphisms.

A graph ``β -> α`` is a nonnegative integer matrix with rows indexed by the
support of ``β`` and columns by the support of ``α``, whose row sums are the
multiplicities of ``β`` and column sums those of ``α``.  It stands for the
span ``β <- γ -> α`` with apex the support of the matrix, and realizes on
divided powers as ``f_* g^*``.

Composition of graphs sums over transport tensors and weights each term by
the degree of the collapse onto its image graph; see :func:`compose_graphs`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, prod
from typing import Mapping

from multisch import kernels
from multisch.multijection import (
    EndpointError,
    Multijection,
    MultiShuffle,
    Span,
    multishuffle,
)
from multisch.multiset import Multiset, cardinality, disjoint_union
from multisch.rings import ZZ, CoeffRing


class MarginError(ValueError):
    pass


@dataclass(frozen=True)
class GraphMorphism:
    source: Multiset
    target: Multiset
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows, cols = self.source.mults, self.target.mults
        if len(self.entries) != len(rows) or any(len(r) != len(cols) for r in self.entries):
            raise MarginError("entry matrix has the wrong shape")
        if any(v < 0 for r in self.entries for v in r):
            raise MarginError("entries must be nonnegative")
        if tuple(sum(r) for r in self.entries) != rows:
            raise MarginError(f"row sums differ from {self.source}")
        if tuple(sum(r[j] for r in self.entries) for j in range(len(cols))) != cols:
            raise MarginError(f"column sums differ from {self.target}")

    @classmethod
    def from_flat(cls, source: Multiset, target: Multiset, flat) -> GraphMorphism:
        c = len(target)
        return cls(source, target, tuple(tuple(flat[i * c:(i + 1) * c]) for i in range(len(source))))

    @property
    def flat(self) -> tuple[int, ...]:
        return tuple(v for r in self.entries for v in r)

    def entry(self, t: int, s: int) -> int:
        return self.entries[self.source.support.index(t)][self.target.support.index(s)]

    def sort_key(self):
        return tuple(-v for v in self.flat)

    def transpose(self) -> GraphMorphism:
        ent = tuple(zip(*self.entries)) if self.entries else tuple(() for _ in self.target.entries)
        return GraphMorphism(self.target, self.source, tuple(tuple(r) for r in ent))

    def span(self) -> Span:
        """The span ``source <- apex -> target``; apex labels run row-major."""
        apex, left, right = [], {}, {}
        lab = 1
        for t, row in zip(self.source.support, self.entries):
            for s, v in zip(self.target.support, row):
                if v:
                    apex.append((lab, v))
                    left[lab], right[lab] = t, s
                    lab += 1
        ap = Multiset(tuple(apex))
        return Span(Multijection.from_map(ap, self.source, left),
                    Multijection.from_map(ap, self.target, right))

    def __str__(self):
        rows = "; ".join(" ".join(str(v) for v in r) for r in self.entries)
        return f"{self.source}->{self.target} [{rows}]"


@dataclass
class SchMorphism:
    """A formal combination of graphs ``source -> target`` over `ring`."""

    source: Multiset
    target: Multiset
    terms: dict[GraphMorphism, object] = field(default_factory=dict)
    ring: CoeffRing = ZZ

    def __post_init__(self):
        clean = {}
        for g, c in self.terms.items():
            if g.source != self.source or g.target != self.target:
                raise EndpointError("term does not match morphism endpoints")
            c = self.ring.coerce(c)
            if c != 0:
                clean[g] = c
        self.terms = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))

    @classmethod
    def of(cls, g: GraphMorphism, coeff=1, ring: CoeffRing = ZZ) -> SchMorphism:
        return cls(g.source, g.target, {g: coeff}, ring)

    @classmethod
    def zero(cls, source: Multiset, target: Multiset, ring: CoeffRing = ZZ) -> SchMorphism:
        return cls(source, target, {}, ring)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: SchMorphism):
        if (self.source, self.target) != (other.source, other.target):
            raise EndpointError("morphisms have different endpoints")
        if self.ring != other.ring:
            raise EndpointError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other: SchMorphism) -> SchMorphism:
        self._check(other)
        t = dict(self.terms)
        for g, c in other.terms.items():
            t[g] = t.get(g, 0) + c
        return SchMorphism(self.source, self.target, t, self.ring)

    def __neg__(self) -> SchMorphism:
        return self.scale(-1)

    def __sub__(self, other: SchMorphism) -> SchMorphism:
        return self + (-other)

    def scale(self, c) -> SchMorphism:
        return SchMorphism(self.source, self.target,
                           {g: v * c for g, v in self.terms.items()}, self.ring)

    def __rmul__(self, c) -> SchMorphism:
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchMorphism):
            return NotImplemented
        return (self.source, self.target, self.ring, self.terms) == \
            (other.source, other.target, other.ring, other.terms)

    def change_ring(self, ring: CoeffRing) -> SchMorphism:
        return SchMorphism(self.source, self.target, dict(self.terms), ring)

    def coefficient(self, g: GraphMorphism):
        return self.terms.get(g, 0)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{self.ring.format(c)}*{g}" for g, c in self.terms.items())


# -- bases and special morphisms --------------------------------------------

def hom_basis(source: Multiset, target: Multiset) -> list[GraphMorphism]:
    """All graphs ``source -> target`` in descending lexicographic order."""
    if cardinality(source) != cardinality(target):
        return []
    return [GraphMorphism.from_flat(source, target, flat)
            for flat in kernels.contingency_tables(source.mults, target.mults)]


def identity_graph(a: Multiset) -> GraphMorphism:
    n = len(a)
    return GraphMorphism(a, a, tuple(tuple(m if i == j else 0 for j in range(n))
                                     for i, m in enumerate(a.mults)))


def identity(a: Multiset, ring: CoeffRing = ZZ) -> SchMorphism:
    return SchMorphism.of(identity_graph(a), 1, ring)


def lowerstar_graph(f: Multijection) -> GraphMorphism:
    tgt = f.target.support
    fm = f.map
    return GraphMorphism(f.source, f.target, tuple(
        tuple(m if fm[s] == t else 0 for t in tgt) for s, m in f.source.entries))


def lowerstar(f: Multijection, ring: CoeffRing = ZZ) -> SchMorphism:
    """``f_*``: the graph ``source -> target`` with entries ``[s, f(s)] = mult(s)``."""
    return SchMorphism.of(lowerstar_graph(f), 1, ring)


def upperstar(f: Multijection, ring: CoeffRing = ZZ) -> SchMorphism:
    """``f^*``: the transpose of ``f_*``, a morphism ``target -> source``."""
    return SchMorphism.of(lowerstar_graph(f).transpose(), 1, ring)


def transpose(x: SchMorphism) -> SchMorphism:
    return SchMorphism(x.target, x.source, {g.transpose(): c for g, c in x.terms.items()}, x.ring)


def permutation_graph(a: Multiset, perm: Mapping[int, int]) -> GraphMorphism:
    """The isomorphism graph of a multiplicity-preserving support permutation."""
    sup = a.support
    return GraphMorphism(a, a, tuple(
        tuple(m if perm[s] == t else 0 for t in sup) for s, m in a.entries))


# -- composition ------------------------------------------------------------

def compose_graphs(h: GraphMorphism, g: GraphMorphism) -> dict[GraphMorphism, int]:
    """``h ∘ g`` for graphs ``g: β -> α`` and ``h: α -> ε``.

    Sums over tensors ``Z[t,s,u]`` with ``sum_u Z = g[t,s]`` and
    ``sum_t Z = h[s,u]``; each contributes ``prod_{t,u} W[t,u]! / prod Z!``
    times the graph ``W[t,u] = sum_s Z[t,s,u]``.
    """
    if g.target != h.source:
        raise EndpointError(f"cannot compose: {g.target} != {h.source}")
    nt, ns, nu = len(g.source), len(g.target), len(h.target)
    raw = kernels.transport_compose(g.flat, h.flat, nt, ns, nu)
    return {GraphMorphism.from_flat(g.source, h.target, w): c for w, c in raw.items()}


def compose(h: SchMorphism, g: SchMorphism) -> SchMorphism:
    """``h ∘ g`` (apply `g` first)."""
    if g.target != h.source:
        raise EndpointError(f"cannot compose: {g.target} != {h.source}")
    if g.ring != h.ring:
        raise EndpointError(f"ring mismatch: {g.ring} vs {h.ring}")
    acc: dict[GraphMorphism, object] = {}
    for gg, cg in g.terms.items():
        for hh, ch in h.terms.items():
            for w, c in compose_graphs(hh, gg).items():
                acc[w] = acc.get(w, 0) + c * cg * ch
    return SchMorphism(g.source, h.target, acc, g.ring)


def compose_chain(*maps: SchMorphism) -> SchMorphism:
    """``maps[-1] ∘ ... ∘ maps[0]``."""
    out = maps[0]
    for m in maps[1:]:
        out = compose(m, out)
    return out


def span_to_graph(sp: Span, ring: CoeffRing = ZZ) -> SchMorphism:
    """The primitive morphism of a span: its image graph times the collapse degree."""
    beta, alpha = sp.left.target, sp.right.target
    if cardinality(beta) != cardinality(alpha):
        raise EndpointError("span endpoints have different cardinalities")
    lm, rm = sp.left.map, sp.right.map
    cells: dict[tuple[int, int], list[int]] = {}
    for p, m in sp.apex.entries:
        cells.setdefault((lm[p], rm[p]), []).append(m)
    W = tuple(tuple(sum(cells.get((t, s), ())) for s in alpha.support) for t in beta.support)
    coeff = prod(factorial(sum(ms)) // prod(factorial(m) for m in ms) for ms in cells.values())
    return SchMorphism.of(GraphMorphism(beta, alpha, W), coeff, ring)


# -- monoidal structure -----------------------------------------------------

def monoidal_graph(x: GraphMorphism, y: GraphMorphism) -> GraphMorphism:
    src = disjoint_union(x.source, y.source)[0]
    tgt = disjoint_union(x.target, y.target)[0]
    cx, cy = len(x.target), len(y.target)
    rows = [tuple(r) + (0,) * cy for r in x.entries]
    rows += [(0,) * cx + tuple(r) for r in y.entries]
    return GraphMorphism(src, tgt, tuple(rows))


def monoidal_product(x: SchMorphism, y: SchMorphism) -> SchMorphism:
    if x.ring != y.ring:
        raise EndpointError("ring mismatch")
    src = disjoint_union(x.source, y.source)[0]
    tgt = disjoint_union(x.target, y.target)[0]
    acc: dict[GraphMorphism, object] = {}
    for gx, cx in x.terms.items():
        for gy, cy in y.terms.items():
            g = monoidal_graph(gx, gy)
            acc[g] = acc.get(g, 0) + cx * cy
    return SchMorphism(src, tgt, acc, x.ring)


def shuffle_factorize(x: GraphMorphism, alpha: Multiset, beta: Multiset
                      ) -> tuple[GraphMorphism, GraphMorphism, MultiShuffle]:
    """Split a graph out of ``alpha ⊔ beta`` as ``h ∘ (f ⊔ g)``.

    `f` and `g` are graphs into submultisets ``alpha', beta'`` of the target
    with ``alpha' + beta' == target``, and `h` is the multi-shuffle of that
    pair.  The rows coming from `alpha` determine ``alpha'`` by column sums.
    """
    union, ia, ib = disjoint_union(alpha, beta)
    if x.source != union:
        raise EndpointError(f"source {x.source} is not {alpha} ⊔ {beta}")
    tgt = x.target.support
    rows = dict(zip(x.source.support, x.entries))
    ra = [rows[ia[t]] for t in alpha.support]
    rb = [rows[ib[t]] for t in beta.support]
    sums_a = [sum(r[j] for r in ra) for j in range(len(tgt))]
    sums_b = [sum(r[j] for r in rb) for j in range(len(tgt))]
    a1 = Multiset(tuple((u, v) for u, v in zip(tgt, sums_a) if v))
    b1 = Multiset(tuple((u, v) for u, v in zip(tgt, sums_b) if v))
    keep_a = [j for j, v in enumerate(sums_a) if v]
    keep_b = [j for j, v in enumerate(sums_b) if v]
    f = GraphMorphism(alpha, a1, tuple(tuple(r[j] for j in keep_a) for r in ra))
    g = GraphMorphism(beta, b1, tuple(tuple(r[j] for j in keep_b) for r in rb))
    return f, g, multishuffle((a1, b1))


def hom_rank(source: Multiset, target: Multiset) -> int:
    if cardinality(source) != cardinality(target):
        return 0
    return kernels.count_tables(source.mults, target.mults)


def endomorphism_permutations(n: int) -> list[GraphMorphism]:
    """The ``n!`` permutation graphs of ``[1^n]``."""
    return hom_basis(Multiset.ones(n), Multiset.ones(n))


__all__ = [
    "GraphMorphism",
    "MarginError",
    "SchMorphism",
    "compose",
    "compose_chain",
    "compose_graphs",
    "endomorphism_permutations",
    "hom_basis",
    "hom_rank",
    "identity",
    "identity_graph",
    "lowerstar",
    "lowerstar_graph",
    "monoidal_graph",
    "monoidal_product",
    "permutation_graph",
    "shuffle_factorize",
    "span_to_graph",
    "transpose",
    "upperstar",
]
