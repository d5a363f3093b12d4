"""Modules over the Schur category and the polynomial functors they define.

A module is stored on partition shapes: the component at ``λ`` sits on the
representative multiset with labels ``1..k`` and decreasing multiplicities.
Modules are right modules: a graph ``x: β -> α`` acts by a matrix
``M_α -> M_β`` (rows index generators of ``M_β``).  Only the actions of a
generating set are stored:

* adjacent swaps of two points of equal multiplicity,
* ``m_*`` and ``m^*`` for one canonical merge of two points per pair of
  multiplicity values.

Any other graph is factored through these (see :meth:`act_graph`).  The
functor attached to ``M`` sends ``K`` to the coend of ``M_α ⊗ Γ^α(K)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from multisch.exactlin import FPModule, ModuleMap, as_matrix, direct_sum as fp_direct_sum, zeros
from multisch.gamma import gamma_shape_of_presentation, realize_graph
from multisch.multijection import Multijection, induced
from multisch.multiset import (
    Multiset,
    canonical_iso,
    canonical_shape,
    cardinality,
    partitions,
    representative,
    splittings,
)
from multisch.rings import ZZ, CoeffRing
from multisch.schurcat import (
    GraphMorphism,
    SchMorphism,
    compose,
    compose_graphs,
    hom_basis,
    lowerstar_graph,
    shuffle_factorize,
)
from multisch import serialize as ser


class InvariantViolation(AssertionError):
    """A module failed one of its defining relations."""


Shape = tuple[int, ...]


# -- generators -------------------------------------------------------------

def blocks(shape: Shape) -> dict[int, list[int]]:
    """Label positions (1-based) of each multiplicity value in the representative."""
    out: dict[int, list[int]] = {}
    for i, m in enumerate(shape, start=1):
        out.setdefault(m, []).append(i)
    return out


def swap_iso(shape: Shape, i: int) -> Multijection:
    rep = representative(shape)
    mp = {x: x for x in rep.support}
    mp[i], mp[i + 1] = i + 1, i
    return Multijection.from_map(rep, rep, mp)


def merge_pairs(shape: Shape) -> list[tuple[int, int]]:
    """Canonical pairs of points to merge: one per pair of multiplicity values."""
    bl = blocks(shape)
    vals = sorted(bl, reverse=True)
    pairs = [(bl[v][0], bl[v][1]) for v in vals if len(bl[v]) >= 2]
    pairs += [(bl[a][0], bl[b][0]) for a, b in combinations(vals, 2)]
    return sorted(pairs)


def merge_map(shape: Shape, i: int, j: int) -> Multijection:
    """Merge points `i` and `j` of the representative, then move to the new representative."""
    rep = representative(shape)
    step = induced(rep, {x: (i if x == j else x) for x in rep.support})
    iso = canonical_iso(step.target)
    return Multijection.from_map(rep, representative(canonical_shape(step.target)),
                                 {x: iso[step.map[x]] for x in rep.support})


def generator_graphs(shape: Shape) -> list[tuple[str, GraphMorphism]]:
    """Generators with source at `shape`'s representative (for swaps and m_*)
    or target there (for m^*), tagged by kind."""
    out = []
    for i in range(1, len(shape)):
        if shape[i - 1] == shape[i]:
            out.append(("swap", lowerstar_graph(swap_iso(shape, i))))
    for i, j in merge_pairs(shape):
        g = lowerstar_graph(merge_map(shape, i, j))
        out.append(("lower", g))
        out.append(("upper", g.transpose()))
    return out


def all_generators(degrees: Iterable[int]) -> list[tuple[str, GraphMorphism]]:
    out = []
    for n in sorted(set(degrees)):
        for lam in partitions(n):
            out.extend(generator_graphs(lam))
    return out


def _automorphism_word(perm: dict[int, int], shape: Shape) -> list[Multijection]:
    """Adjacent swaps ``s_1, s_2, ...`` with ``perm = ... ∘ s_2 ∘ s_1``."""
    p = dict(perm)
    word = []
    k = len(shape)
    while True:
        i = next((i for i in range(1, k) if shape[i - 1] == shape[i] and p[i] > p[i + 1]), None)
        if i is None:
            break
        word.append(swap_iso(shape, i))
        p[i], p[i + 1] = p[i + 1], p[i]
    if any(p[x] != x for x in p):
        raise InvariantViolation("permutation does not preserve multiplicities")
    return word


def factor_multijection(f: Multijection) -> list[Multijection]:
    """Write a multijection between representatives as generator steps (first step first)."""
    lam = canonical_shape(f.source)
    rep = representative(lam)
    if f.source != rep or f.target != representative(canonical_shape(f.target)):
        raise ValueError("factor_multijection needs representatives at both ends")
    if len(f.source) == len(f.target):
        return _automorphism_word(f.map, lam)
    fm = f.map
    fib: dict[int, list[int]] = {}
    for x in rep.support:
        fib.setdefault(fm[x], []).append(x)
    t = min(t for t, xs in fib.items() if len(xs) >= 2)
    a, b = sorted(fib[t])[:2]
    bl = blocks(lam)
    va, vb = lam[a - 1], lam[b - 1]
    if va == vb:
        want = {a: bl[va][0], b: bl[va][1]}
    else:
        want = {a: bl[va][0], b: bl[vb][0]}
    tau = {}
    for v, pos in bl.items():
        chosen = [x for x in (a, b) if lam[x - 1] == v]
        front = [want[x] for x in chosen]
        rest_src = [x for x in pos if x not in chosen]
        rest_tgt = [x for x in pos if x not in front]
        tau.update({x: want[x] for x in chosen})
        tau.update(dict(zip(rest_src, rest_tgt)))
    i, j = sorted(want.values())
    mg = merge_map(lam, i, j)
    tau_inv = {v: k for k, v in tau.items()}
    # f = rest ∘ mg ∘ tau
    rest = {}
    for x in rep.support:
        rest[mg.map[x]] = fm[tau_inv[x]]
    rest_mj = Multijection.from_map(mg.target, f.target, rest)
    return _automorphism_word(tau, lam) + [mg] + factor_multijection(rest_mj)


# -- modules ----------------------------------------------------------------

def _transport(g: GraphMorphism) -> GraphMorphism:
    """Relabel a graph onto the representatives of its endpoints."""
    ib, ia = canonical_iso(g.source), canonical_iso(g.target)
    rb, ra = representative(canonical_shape(g.source)), representative(canonical_shape(g.target))
    ent = [[0] * len(ra) for _ in range(len(rb))]
    for t, row in zip(g.source.support, g.entries):
        for s, v in zip(g.target.support, row):
            ent[ib[t] - 1][ia[s] - 1] = v
    return GraphMorphism(rb, ra, tuple(tuple(r) for r in ent))


class SchModulePresentation:
    """A right module over the Schur category, in degrees `degrees`.

    ``components[λ]`` is an FP module for every partition ``λ`` of every
    degree; ``actions[g]`` is the lift matrix ``M_target -> M_source`` of a
    generator graph ``g``.
    """

    def __init__(self, degrees: Iterable[int], components: dict[Shape, FPModule],
                 actions: dict[GraphMorphism, np.ndarray], ring: CoeffRing = ZZ,
                 name: str = "M"):
        self.degrees = tuple(sorted(set(degrees)))
        self.ring = ring
        self.name = name
        self.components = {}
        for n in self.degrees:
            for lam in partitions(n):
                self.components[lam] = components.get(lam, FPModule(0, ring=ring))
        self.actions = {}
        for kind, g in all_generators(self.degrees):
            A = actions.get(g)
            src = self.components[canonical_shape(g.source)]
            tgt = self.components[canonical_shape(g.target)]
            if A is None:
                A = zeros(src.rank, tgt.rank)
            A = as_matrix(A, rows=src.rank, cols=tgt.rank)
            if A.shape != (src.rank, tgt.rank):
                raise InvariantViolation(f"action of {g} has shape {A.shape}")
            self.actions[g] = A
        self._cache: dict[GraphMorphism, np.ndarray] = {}

    # construction helpers
    @classmethod
    def from_action(cls, degrees, components, act: Callable[[GraphMorphism], np.ndarray],
                    ring: CoeffRing = ZZ, name: str = "M") -> SchModulePresentation:
        acts = {g: act(g) for _, g in all_generators(degrees)}
        return cls(degrees, components, acts, ring, name)

    def component(self, s: Multiset | Shape) -> FPModule:
        lam = canonical_shape(s) if isinstance(s, Multiset) else tuple(s)
        return self.components.get(lam, FPModule(0, ring=self.ring))

    def rank(self, s) -> int:
        return self.component(s).rank

    def _word_matrix(self, steps: list[Multijection], upper: bool) -> np.ndarray:
        if not steps:
            raise ValueError("empty word")
        mats = []
        for st in steps:
            g = lowerstar_graph(st)
            if len(st.source) == len(st.target):
                # adjacent swap: its own inverse, so f^* and f_* agree
                mats.append(self.actions[g])
            else:
                mats.append(self.actions[g.transpose()] if upper else self.actions[g])
        out = mats[-1] if upper else mats[0]
        seq = reversed(mats[:-1]) if upper else mats[1:]
        for A in seq:
            out = out.dot(A)
        return out

    def _identity(self, lam: Shape) -> np.ndarray:
        n = self.components[lam].rank
        out = zeros(n, n)
        for i in range(n):
            out[i, i] = 1
        return out

    def act_graph(self, g: GraphMorphism) -> np.ndarray:
        """Lift matrix of the action of one graph (any labels), via generators."""
        g = _transport(g)
        hit = self._cache.get(g)
        if hit is not None:
            return hit
        lam_b = canonical_shape(g.source)
        if lam_b not in self.components:
            return zeros(0, self.rank(g.target))
        sp = g.span()
        iso = canonical_iso(sp.apex)
        rep = representative(canonical_shape(sp.apex))
        iso_inv = {v: k for k, v in iso.items()}
        fprime = Multijection.from_map(rep, g.target, {y: sp.right.map[iso_inv[y]] for y in rep.support})
        gprime = Multijection.from_map(rep, g.source, {y: sp.left.map[iso_inv[y]] for y in rep.support})
        lam_g = canonical_shape(rep)
        fw, gw = factor_multijection(fprime), factor_multijection(gprime)
        A_low = self._word_matrix(fw, upper=False) if fw else self._identity(lam_g)
        A_up = self._word_matrix(gw, upper=True) if gw else self._identity(lam_g)
        out = A_up.dot(A_low)
        self._cache[g] = out
        return out

    def act(self, x: SchMorphism) -> np.ndarray:
        out = zeros(self.rank(x.source), self.rank(x.target))
        for g, c in x.terms.items():
            out = out + self.act_graph(g) * c
        return out

    def action_map(self, x: SchMorphism | GraphMorphism) -> ModuleMap:
        if isinstance(x, GraphMorphism):
            x = SchMorphism.of(x, 1, self.ring)
        return ModuleMap(self.component(x.target), self.component(x.source), self.act(x), check=False)

    # validation
    def validate(self, raise_on_error: bool = True) -> list[str]:
        """Check well-definedness and composition on all composable generator pairs."""
        errors = []
        gens = [g for _, g in all_generators(self.degrees)]
        for g in gens:
            try:
                ModuleMap(self.component(g.target), self.component(g.source), self.actions[g])
            except ValueError as exc:
                errors.append(f"{g}: {exc}")
        for g in gens:
            for h in gens:
                if g.target != h.source:
                    continue
                lhs = self.act(compose(SchMorphism.of(h, 1, self.ring), SchMorphism.of(g, 1, self.ring)))
                rhs = self.actions[g].dot(self.actions[h])
                cod = self.component(g.source)
                if not ModuleMap(self.component(h.target), cod, lhs, check=False) == \
                        ModuleMap(self.component(h.target), cod, rhs, check=False):
                    errors.append(f"composition fails for {h} after {g}")
        if errors and raise_on_error:
            raise InvariantViolation("; ".join(errors[:5]))
        return errors

    # JSON
    def to_json(self) -> dict:
        return {
            "version": ser.VERSION,
            "name": self.name,
            "ring": self.ring.tag,
            "degrees": list(self.degrees),
            "components": [{"shape": list(lam), "module": mod.to_json()}
                           for lam, mod in self.components.items()],
            "actions": [{"graph": ser.graph_to_json(g), "matrix": ser.matrix_to_json(A.tolist())}
                        for g, A in self.actions.items() if A.size],
        }

    @classmethod
    def from_json(cls, d: dict) -> SchModulePresentation:
        from multisch.rings import ring_from_tag
        ring = ring_from_tag(d.get("ring", "Z"))
        comps = {}
        for c in d["components"]:
            m = c["module"]
            rel = ser.matrix_from_json(m.get("relations", []))
            rank = int(m["rank"])
            comps[tuple(c["shape"])] = FPModule(rank, rel if rel and rel[0] else zeros(rank, 0), ring)
        acts = {}
        for a in d.get("actions", []):
            acts[ser.graph_from_json(a["graph"])] = as_matrix(ser.matrix_from_json(a["matrix"]))
        return cls(d["degrees"], comps, acts, ring, d.get("name", "M"))

    def __repr__(self):
        ranks = ", ".join(f"{list(l)}:{m.describe()}" for l, m in self.components.items())
        return f"SchModule({self.name}; {ranks})"


# -- examples of modules ----------------------------------------------------

def representable(alpha0: Multiset, ring: CoeffRing = ZZ) -> SchModulePresentation:
    """``β -> Z[Hom(β, alpha0)]`` with ``b·x = b ∘ x``: the functor ``Γ^{alpha0}``."""
    n = cardinality(alpha0)
    comps, bases = {}, {}
    for lam in partitions(n):
        hb = hom_basis(representative(lam), alpha0)
        bases[lam] = {g: i for i, g in enumerate(hb)}
        comps[lam] = FPModule.free(len(hb), ring)

    def act(x: GraphMorphism) -> np.ndarray:
        lam_b, lam_a = canonical_shape(x.source), canonical_shape(x.target)
        A = zeros(len(bases[lam_b]), len(bases[lam_a]))
        for b, j in bases[lam_a].items():
            for w, c in compose_graphs(b, x).items():
                A[bases[lam_b][w], j] += c
        return A

    return SchModulePresentation.from_action([n], comps, act, ring, name=f"rep{alpha0}")


def direct_representable_action(alpha0: Multiset, x: GraphMorphism) -> np.ndarray:
    """The action of any graph on ``representable(alpha0)``, computed directly."""
    hb_b = {g: i for i, g in enumerate(hom_basis(x.source, alpha0))}
    hb_a = list(hom_basis(x.target, alpha0))
    A = zeros(len(hb_b), len(hb_a))
    for j, b in enumerate(hb_a):
        for w, c in compose_graphs(b, x).items():
            A[hb_b[w], j] += c
    return A


def zero_module(ring: CoeffRing = ZZ) -> SchModulePresentation:
    return SchModulePresentation([], {}, {}, ring, name="0")


def direct_sum(mods: list[SchModulePresentation]) -> SchModulePresentation:
    ring = mods[0].ring if mods else ZZ
    degrees = sorted({d for m in mods for d in m.degrees})
    comps = {}
    for n in degrees:
        for lam in partitions(n):
            comps[lam] = fp_direct_sum([m.component(lam) for m in mods])
    acts = {}
    for _, g in all_generators(degrees):
        lb, la = canonical_shape(g.source), canonical_shape(g.target)
        A = zeros(comps[lb].rank, comps[la].rank)
        r = c = 0
        for m in mods:
            rb, ra = m.rank(lb), m.rank(la)
            if g in m.actions:
                A[r:r + rb, c:c + ra] = m.actions[g]
            r, c = r + rb, c + ra
        acts[g] = A
    return SchModulePresentation(degrees, comps, acts, ring, name="+".join(m.name for m in mods))


def homogeneous_split(M: SchModulePresentation) -> list[SchModulePresentation]:
    """One module per degree; actions never cross degrees (asserted)."""
    out = []
    for n in M.degrees:
        comps = {lam: mod for lam, mod in M.components.items() if sum(lam) == n}
        acts = {}
        for g, A in M.actions.items():
            if cardinality(g.source) != cardinality(g.target):
                if A.size and any(A.flat):
                    raise InvariantViolation("an action mixes degrees")
                continue
            if cardinality(g.source) == n:
                acts[g] = A
        out.append(SchModulePresentation([n], comps, acts, M.ring, name=f"{M.name}[{n}]"))
    return out


# -- evaluation -------------------------------------------------------------

@dataclass
class FunctorValue:
    module: FPModule
    grading: list[tuple[Multiset, FPModule]] = field(default_factory=list)

    def describe(self) -> str:
        return self.module.describe()


def weight_vectors(n: int, m: int) -> list[Multiset]:
    """Multisets of cardinality `n` on labels ``1..m``, descending lex in weights."""
    from multisch.gamma import weak_compositions
    return [Multiset(tuple((i, k) for i, k in enumerate(c, start=1) if k))
            for c in weak_compositions(n, m)]


def eval_on_free(M: SchModulePresentation, m: int) -> FunctorValue:
    """``F(Z^m) = ⊕ F_α`` over multisets ``α`` supported in ``{1..m}``."""
    grading = []
    for n in M.degrees:
        for alpha in weight_vectors(n, m):
            grading.append((alpha, M.component(alpha)))
    mod = fp_direct_sum([c for _, c in grading]) if grading else FPModule(0, ring=M.ring)
    return FunctorValue(mod, grading)


MAX_PRESENTED_GENS = 4000


def eval_on_presented(M: SchModulePresentation, K: FPModule) -> FPModule:
    """``F(K)`` as the coend ``⊕_λ M_λ ⊗ Γ^λ(K)`` modulo ``(b·x)⊗a = b⊗Γ(x)a``."""
    width = K.rank
    blocks_, offset = {}, 0
    for lam, comp in M.components.items():
        gk = gamma_shape_of_presentation(representative(lam), K)
        blocks_[lam] = (offset, comp, gk)
        offset += comp.rank * gk.rank
    if offset > MAX_PRESENTED_GENS:
        raise ValueError(f"presentation too large ({offset} generators)")
    cols: list[dict] = []
    for lam, (off, comp, gk) in blocks_.items():
        t = comp.tensor(gk)
        for j in range(t.relations.shape[1]):
            cols.append({off + i: t.relations[i, j] for i in range(t.rank) if t.relations[i, j]})
    for g, A in M.actions.items():
        lb, la = canonical_shape(g.source), canonical_shape(g.target)
        off_b, comp_b, gk_b = blocks_[lb]
        off_a, comp_a, gk_a = blocks_[la]
        if comp_a.rank == 0 or gk_b.rank == 0:
            continue
        R = realize_graph(g, width)  # Γ^β(Z^w) -> Γ^α(Z^w)
        Rcols = [R.column(j) for j in range(gk_b.rank)]
        for bi in range(comp_a.rank):
            Ab = A[:, bi]
            for aj in range(gk_b.rank):
                vec: dict[int, object] = {}
                for r in range(comp_b.rank):
                    if Ab[r]:
                        k = off_b + r * gk_b.rank + aj
                        vec[k] = vec.get(k, 0) + Ab[r]
                for ai, c in Rcols[aj].items():
                    k = off_a + bi * gk_a.rank + ai
                    vec[k] = vec.get(k, 0) - c
                vec = {k: v for k, v in vec.items() if v}
                if vec:
                    cols.append(vec)
    rel = zeros(offset, len(cols))
    for j, col in enumerate(cols):
        for i, v in col.items():
            rel[i, j] = v
    return FPModule(offset, rel, K.ring)


# -- the tensor structure ---------------------------------------------------

def box_product(M: SchModulePresentation, N: SchModulePresentation) -> SchModulePresentation:
    """Component at ``γ`` is ``⊕ M_α' ⊗ N_β'`` over splittings ``γ = α' + β'``."""
    ring = M.ring
    degrees = sorted({a + b for a in M.degrees for b in N.degrees})
    layout: dict[Shape, list] = {}
    comps: dict[Shape, FPModule] = {}
    for n in degrees:
        for lam in partitions(n):
            gamma = representative(lam)
            parts, mods, off = [], [], 0
            for a1, b1 in splittings(gamma):
                if cardinality(a1) not in M.degrees or cardinality(b1) not in N.degrees:
                    continue
                ma, nb = M.component(a1), N.component(b1)
                parts.append((a1, b1, off, ma.rank, nb.rank))
                mods.append(ma.tensor(nb))
                off += ma.rank * nb.rank
            layout[lam] = parts
            comps[lam] = fp_direct_sum(mods) if mods else FPModule(0, ring=ring)
    index = {lam: {(a1, b1): (o, ra, rb) for a1, b1, o, ra, rb in parts}
             for lam, parts in layout.items()}

    def act(x: GraphMorphism) -> np.ndarray:
        lb, la = canonical_shape(x.source), canonical_shape(x.target)
        A = zeros(comps[lb].rank, comps[la].rank)
        for a1, b1, off, ra, rb in layout[la]:
            ht = lowerstar_graph(_shuffle_underlying(a1, b1)).transpose()  # γ -> α'⊔β'
            for P, c in compose_graphs(ht, x).items():
                f, g, h = shuffle_factorize(P.transpose(), a1, b1)
                o2, r2a, r2b = index[lb][(f.target, g.target)]
                Af = M.act_graph(f.transpose())   # M_α' -> M_{f.target}
                Ag = N.act_graph(g.transpose())
                K = np.kron(Af, Ag) * c if Af.size and Ag.size else zeros(r2a * r2b, ra * rb)
                A[o2:o2 + r2a * r2b, off:off + ra * rb] += K
        return A

    return SchModulePresentation.from_action(degrees, comps, act, ring,
                                             name=f"({M.name})x({N.name})")


def _shuffle_underlying(a1: Multiset, b1: Multiset) -> Multijection:
    from multisch.multijection import multishuffle
    return multishuffle((a1, b1)).underlying


__all__ = [
    "FunctorValue",
    "InvariantViolation",
    "SchModulePresentation",
    "all_generators",
    "box_product",
    "direct_representable_action",
    "direct_sum",
    "eval_on_free",
    "eval_on_presented",
    "factor_multijection",
    "generator_graphs",
    "homogeneous_split",
    "merge_map",
    "merge_pairs",
    "representable",
    "weight_vectors",
    "zero_module",
]
