"""Symmetric-group modules and their scalar extension to the Schur category.

A Σ_n-module is given by the matrices of the adjacent transpositions
``s_1, ..., s_{n-1}`` acting on an FP module (right action, column vectors).
Extension along ``Σ_n -> End([1^n])`` gives the Schur-category module
``α -> M ⊗_{Σ_n} Z[Hom(α, [1^n])]``.
"""
from __future__ import annotations

from itertools import product as _product

import numpy as np

from multisch.exactlin import FPModule, ModuleMap, as_matrix, direct_sum, identity_matrix, zeros
from multisch.gamma import sigma_alpha
from multisch.multiset import Multiset, cardinality, partitions, representative
from multisch.polyfun import SchModulePresentation
from multisch.rings import ZZ, CoeffRing
from multisch.schurcat import GraphMorphism, compose_graphs, hom_basis, permutation_graph
from multisch import serialize as ser


class CoxeterViolation(ValueError):
    pass


MAX_TENSOR_GENS = 20000


class SigmaModule:
    def __init__(self, n: int, underlying: FPModule, gen_actions, validate: bool = True):
        self.n = n
        self.underlying = underlying
        self.gen_actions = [as_matrix(a, rows=underlying.rank, cols=underlying.rank)
                            for a in gen_actions]
        if len(self.gen_actions) != max(n - 1, 0):
            raise CoxeterViolation(f"need {max(n - 1, 0)} generator matrices, got {len(self.gen_actions)}")
        if validate:
            self.validate()

    @property
    def rank(self) -> int:
        return self.underlying.rank

    @property
    def ring(self) -> CoeffRing:
        return self.underlying.ring

    def _is_identity(self, A: np.ndarray) -> bool:
        M = self.underlying
        I = identity_matrix(M.rank)
        return ModuleMap(M, M, A, check=False) == ModuleMap(M, M, I, check=False)

    def validate(self):
        M = self.underlying
        S = self.gen_actions
        for i, A in enumerate(S):
            try:
                ModuleMap(M, M, A)
            except ValueError as exc:
                raise CoxeterViolation(f"s_{i + 1} is not well defined: {exc}") from exc
            if not self._is_identity(A.dot(A)):
                raise CoxeterViolation(f"s_{i + 1} does not square to the identity")
        for i in range(len(S)):
            for j in range(i + 1, len(S)):
                P = S[i].dot(S[j])
                k = 3 if j == i + 1 else 2
                W = identity_matrix(M.rank)
                for _ in range(k):
                    W = W.dot(P)
                if not self._is_identity(W):
                    raise CoxeterViolation(f"(s_{i + 1} s_{j + 1})^{k} is not the identity")

    def to_json(self) -> dict:
        return {"n": self.n, "rank": self.rank,
                "relations": ser.matrix_to_json(self.underlying.relations.tolist()),
                "gen_actions": [ser.matrix_to_json(A.tolist()) for A in self.gen_actions]}

    @classmethod
    def from_json(cls, d: dict, ring: CoeffRing = ZZ) -> SigmaModule:
        rank = int(d["rank"])
        rel = ser.matrix_from_json(d.get("relations", []))
        under = FPModule(rank, rel if rel and rel[0] else zeros(rank, 0), ring)
        return cls(int(d["n"]), under, [ser.matrix_from_json(a) for a in d["gen_actions"]])


def trivial(n: int, ring: CoeffRing = ZZ) -> SigmaModule:
    return SigmaModule(n, FPModule.free(1, ring), [[[1]] for _ in range(n - 1)])


def sign(n: int, ring: CoeffRing = ZZ) -> SigmaModule:
    return SigmaModule(n, FPModule.free(1, ring), [[[-1]] for _ in range(n - 1)])


class OrbitModule(SigmaModule):
    """``Z[Σ^α]``: transpositions act on ``φ: [1^n] -> α`` by permuting positions."""

    def __init__(self, alpha: Multiset, ring: CoeffRing = ZZ):
        self.alpha = alpha
        self.basis = sigma_alpha(alpha)
        idx = {phi: k for k, phi in enumerate(self.basis)}
        n = cardinality(alpha)
        mats = []
        for i in range(n - 1):
            A = zeros(len(self.basis), len(self.basis))
            for k, phi in enumerate(self.basis):
                A[idx[_swap(phi, i)], k] = 1
            mats.append(A)
        super().__init__(n, FPModule.free(len(self.basis), ring), mats)


def _swap(t: tuple, i: int) -> tuple:
    t = list(t)
    t[i], t[i + 1] = t[i + 1], t[i]
    return tuple(t)


def orbit_module(alpha: Multiset, ring: CoeffRing = ZZ) -> OrbitModule:
    return OrbitModule(alpha, ring)


def regular(n: int, ring: CoeffRing = ZZ) -> OrbitModule:
    return OrbitModule(Multiset.ones(n), ring)


def _coinvariants(M: SigmaModule, items: list, act) -> FPModule:
    """``M ⊗_{Σ_n} Z[items]`` where ``act(i, item)`` is ``s_{i+1}`` on an item."""
    r, k = M.rank, len(items)
    idx = {x: j for j, x in enumerate(items)}
    cols = []
    rel = M.underlying.relations
    for j in range(k):
        for c in range(rel.shape[1]):
            cols.append({a * k + j: rel[a, c] for a in range(r) if rel[a, c]})
    for i, S in enumerate(M.gen_actions):
        for a in range(r):
            for j, x in enumerate(items):
                vec: dict[int, int] = {}
                for b in range(r):
                    if S[b, a]:
                        vec[b * k + j] = vec.get(b * k + j, 0) + S[b, a]
                y = idx[act(i, x)]
                vec[a * k + y] = vec.get(a * k + y, 0) - 1
                vec = {q: v for q, v in vec.items() if v}
                if vec:
                    cols.append(vec)
    out = zeros(r * k, len(cols))
    for c, col in enumerate(cols):
        for q, v in col.items():
            out[q, c] = v
    return FPModule(r * k, out, M.ring)


def scalar_extend(M: SigmaModule, alpha: Multiset) -> FPModule:
    """Coinvariants ``M ⊗_{Σ_n} Z[Σ^α]``."""
    if cardinality(alpha) != M.n:
        raise ValueError(f"degree mismatch: |{alpha}| != {M.n}")
    return _coinvariants(M, sigma_alpha(alpha), lambda i, phi: _swap(phi, i))


def evaluate_S(Ms: dict[int, SigmaModule] | list[SigmaModule], m: int) -> FPModule:
    """``⊕_n M_n ⊗_{Σ_n} (Z^m)^{⊗n}``."""
    if isinstance(Ms, dict):
        Ms = [Ms[k] for k in sorted(Ms)]
    parts = []
    for M in Ms:
        size = M.rank * m ** M.n
        if size > MAX_TENSOR_GENS:
            raise ValueError(f"tensor power too large ({size} generators)")
        words = list(_product(range(m), repeat=M.n))
        parts.append(_coinvariants(M, words, lambda i, w: _swap(w, i)))
    return direct_sum(parts) if parts else FPModule(0)


def extend_to_sch_module(M: SigmaModule) -> SchModulePresentation:
    """``α -> M ⊗_{Σ_n} Z[Hom(α, [1^n])]``, acted on by precomposition."""
    n, r = M.n, M.rank
    top = Multiset.ones(n)
    swaps = [permutation_graph(top, {x: (x + 1 if x == i + 1 else x - 1 if x == i + 2 else x)
                                     for x in top.support}) for i in range(n - 1)]
    comps, bases = {}, {}
    for lam in partitions(n):
        hb = hom_basis(representative(lam), top)
        bases[lam] = {g: j for j, g in enumerate(hb)}

        def post(i, y, _sw=swaps):
            (w, c), = compose_graphs(_sw[i], y).items()
            return w
        comps[lam] = _coinvariants(M, hb, post)

    def act(x: GraphMorphism) -> np.ndarray:
        from multisch.multiset import canonical_shape
        lb, la = canonical_shape(x.source), canonical_shape(x.target)
        kb, ka = len(bases[lb]), len(bases[la])
        A = zeros(r * kb, r * ka)
        for y, j in bases[la].items():
            for w, c in compose_graphs(y, x).items():
                i2 = bases[lb][w]
                for a in range(r):
                    A[a * kb + i2, a * ka + j] += c
        return A

    return SchModulePresentation.from_action([n], comps, act, M.ring, name=f"ext(S{n})")


__all__ = [
    "CoxeterViolation",
    "OrbitModule",
    "SigmaModule",
    "evaluate_S",
    "extend_to_sch_module",
    "orbit_module",
    "regular",
    "scalar_extend",
    "sign",
    "trivial",
]
