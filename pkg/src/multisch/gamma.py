"""Divided powers ``Γ^α`` of free modules and the realization of the Schur category.

``Γ^α(Z^m)`` has a basis of weight monomials: matrices ``exps`` with rows
indexed by the support of ``α`` and ``m`` columns whose row sums are the
multiplicities.  The monomial stands for ``prod_{s,i} γ_{exps[s,i]}(e_i)``,
one tensor factor per point of ``α``.  Bases are listed in descending
lexicographic order of the flattened matrix.

Matrices here act on column vectors of source-basis coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product as _product
from math import comb, factorial, prod
from typing import Iterable

import numpy as np

from multisch import kernels
from multisch.exactlin import FPModule, as_matrix, zeros
from multisch.multijection import Multijection
from multisch.multiset import Multiset, cardinality
from multisch.rings import ZZ, CoeffRing
from multisch.schurcat import GraphMorphism, SchMorphism


class SizeError(ValueError):
    """The requested object is too large for explicit enumeration."""


# -- sparse exact matrices --------------------------------------------------

class ExactMatrix:
    """Sparse matrix with exact entries, stored as ``{(row, col): value}``."""

    __slots__ = ("shape", "data")

    def __init__(self, nrows: int, ncols: int, data: dict | None = None):
        self.shape = (nrows, ncols)
        self.data = {k: v for k, v in (data or {}).items() if v != 0}

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, rows) -> ExactMatrix:
        rows = [list(r) for r in rows]
        nc = len(rows[0]) if rows else 0
        return cls(len(rows), nc, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    def to_dense(self) -> list[list]:
        out = [[0] * self.shape[1] for _ in range(self.shape[0])]
        for (i, j), v in self.data.items():
            out[i][j] = v
        return out

    def to_array(self) -> np.ndarray:
        return as_matrix(self.to_dense(), rows=self.shape[0], cols=self.shape[1])

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: dict[int, list] = {}
        for (k, j), v in other.data.items():
            by_row.setdefault(k, []).append((j, v))
        out: dict = {}
        for (i, k), a in self.data.items():
            for j, b in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + a * b
        return ExactMatrix(self.shape[0], other.shape[1], out)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = dict(self.data)
        for k, v in other.data.items():
            out[k] = out.get(k, 0) + v
        return ExactMatrix(*self.shape, out)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + other.scale(-1)

    def scale(self, c) -> ExactMatrix:
        return ExactMatrix(*self.shape, {k: v * c for k, v in self.data.items()})

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(self.shape[1], self.shape[0], {(j, i): v for (i, j), v in self.data.items()})

    def column(self, j: int) -> dict[int, object]:
        return {i: v for (i, jj), v in self.data.items() if jj == j}

    def flat(self) -> dict[int, object]:
        """Entries keyed by their row-major position (for rank computations)."""
        nc = self.shape[1]
        return {i * nc + j: v for (i, j), v in self.data.items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __repr__(self):
        return f"ExactMatrix({self.shape[0]}x{self.shape[1]}, nnz={len(self.data)})"


# -- bases ------------------------------------------------------------------

@dataclass(frozen=True)
class WeightMonomial:
    shape: Multiset
    width: int
    exps: tuple[tuple[int, ...], ...]

    def __str__(self):
        factors = []
        for row in self.exps:
            f = " ".join(f"g{k}(e{i})" for i, k in enumerate(row, start=1) if k)
            factors.append(f or "1")
        return " (x) ".join(factors) if factors else "1"

    def to_json(self) -> dict:
        return {"shape": str(self.shape), "width": self.width, "exps": [list(r) for r in self.exps]}


@lru_cache(maxsize=None)
def weak_compositions(n: int, parts: int) -> tuple[tuple[int, ...], ...]:
    """Compositions of `n` into `parts` nonnegative parts, descending lex."""
    if parts == 0:
        return ((),) if n == 0 else ()
    if parts == 1:
        return ((n,),)
    return tuple((k,) + rest for k in range(n, -1, -1) for rest in weak_compositions(n - k, parts - 1))


class GammaSpace:
    __slots__ = ("shape", "width", "basis", "index")

    def __init__(self, shape: Multiset, width: int):
        if width < 0:
            raise ValueError("width must be nonnegative")
        self.shape, self.width = shape, width
        rows = [weak_compositions(m, width) for m in shape.mults]
        self.basis = [tuple(r) for r in _product(*rows)]
        self.index = {e: i for i, e in enumerate(self.basis)}

    def __len__(self):
        return len(self.basis)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def monomial(self, i: int) -> WeightMonomial:
        return WeightMonomial(self.shape, self.width, self.basis[i])


@lru_cache(maxsize=None)
def basis(shape: Multiset, width: int) -> GammaSpace:
    return GammaSpace(shape, width)


def expected_dimension(shape: Multiset, width: int) -> int:
    if width == 0:
        return 1 if cardinality(shape) == 0 else 0
    return prod(comb(m + width - 1, width - 1) for m in shape.mults)


def _multinomial(parts) -> int:
    return factorial(sum(parts)) // prod(factorial(p) for p in parts)


# -- f_* and f^* ------------------------------------------------------------

@lru_cache(maxsize=None)
def realize_lower(f: Multijection, width: int) -> ExactMatrix:
    """``f_*``: merge rows along `f`, weighting by divided-power multiplication."""
    src, tgt = basis(f.source, width), basis(f.target, width)
    spos = {s: i for i, s in enumerate(f.source.support)}
    fibres = [[spos[s] for s in f.fibre(t)] for t in f.target.support]
    data = {}
    for j, E in enumerate(src.basis):
        F, coeff = [], 1
        for fib in fibres:
            row = []
            for i in range(width):
                parts = [E[k][i] for k in fib]
                row.append(sum(parts))
                coeff *= _multinomial(parts)
            F.append(tuple(row))
        data[(tgt.index[tuple(F)], j)] = coeff
    return ExactMatrix(len(tgt), len(src), data)


@lru_cache(maxsize=None)
def realize_upper(f: Multijection, width: int) -> ExactMatrix:
    """``f^*``: split each target row over its fibre in every way, coefficient 1."""
    src, tgt = basis(f.source, width), basis(f.target, width)
    spos = {s: i for i, s in enumerate(f.source.support)}
    fibres = [[spos[s] for s in f.fibre(t)] for t in f.target.support]
    mults = f.source.mults
    data = {}
    for j, F in enumerate(tgt.basis):
        options = []
        for fib, row in zip(fibres, F):
            options.append(kernels.contingency_tables(tuple(mults[k] for k in fib), row))
        for choice in _product(*options):
            E = [None] * len(mults)
            for fib, tab in zip(fibres, choice):
                for a, k in enumerate(fib):
                    E[k] = tuple(tab[a * width:(a + 1) * width])
            data[(src.index[tuple(E)], j)] = 1
    return ExactMatrix(len(src), len(tgt), data)


def realize_graph(g: GraphMorphism, width: int) -> ExactMatrix:
    sp = g.span()
    return realize_lower(sp.right, width) @ realize_upper(sp.left, width)


def realize(x: SchMorphism, width: int) -> ExactMatrix:
    """Matrix of ``x: β -> α`` as a map ``Γ^β(Z^m) -> Γ^α(Z^m)``."""
    out = ExactMatrix(len(basis(x.target, width)), len(basis(x.source, width)))
    for g, c in x.terms.items():
        out = out + realize_graph(g, width).scale(c)
    return out


# -- functoriality in the module variable -----------------------------------

def apply_linear_map(shape: Multiset, g, ring: CoeffRing = ZZ) -> ExactMatrix:
    """``Γ^shape(g)`` for a matrix ``g: Z^m -> Z^m'`` given as ``m' x m`` rows.

    ``γ_n(sum_i c_i e_i) = sum_{|k|=n} prod c_i^{k_i} prod γ_{k_i}(e_i)``, and a
    product of divided powers of one vector picks up a multinomial.
    """
    G = [list(r) for r in (g.tolist() if isinstance(g, np.ndarray) else g)]
    mp = len(G)
    m = len(G[0]) if G else 0
    src, tgt = basis(shape, m), basis(shape, mp)
    data: dict = {}
    for j, E in enumerate(src.basis):
        per_row = []
        for row in E:
            terms: dict[tuple, object] = {}
            choices = [weak_compositions(k, mp) for k in row]
            for pick in _product(*choices):
                coeff = 1
                for src_i, comp in enumerate(pick):
                    for tgt_i, k in enumerate(comp):
                        if k:
                            coeff *= G[tgt_i][src_i] ** k
                if coeff == 0:
                    continue
                out_row = tuple(sum(comp[t] for comp in pick) for t in range(mp))
                for t in range(mp):
                    coeff *= _multinomial([comp[t] for comp in pick])
                terms[out_row] = terms.get(out_row, 0) + coeff
            per_row.append(list(terms.items()))
        for combo in _product(*per_row):
            F = tuple(r for r, _ in combo)
            c = prod(v for _, v in combo)
            key = (tgt.index[F], j)
            data[key] = data.get(key, 0) + c
    return ExactMatrix(len(tgt), len(src), {k: ring.coerce(v) for k, v in data.items()})


# -- the tensor-invariant oracle --------------------------------------------

MAX_ORACLE_CARD = 6


def sigma_alpha(shape: Multiset) -> list[tuple[int, ...]]:
    """``Hom([1^n], shape)`` as label tuples ``(φ(1), ..., φ(n))``, lex order."""
    n = cardinality(shape)
    pool = [lab for lab, m in shape.entries for _ in range(m)]
    return sorted(set(permutations(pool, n)))


class InvariantSpace:
    """``(⊕_φ (Z^m)^{⊗n})^{Σ_n}`` with its orbit-sum basis.

    Pure tensors are pairs ``(φ, word)``; the symmetric group acts on both
    tuples by permuting positions.  The orbit of a pair is determined by its
    count matrix, which is matched with the weight monomial of those exponents.
    """

    def __init__(self, shape: Multiset, width: int):
        n = cardinality(shape)
        if n > MAX_ORACLE_CARD:
            raise SizeError(f"tensor oracle limited to cardinality {MAX_ORACLE_CARD}, got {n}")
        self.shape, self.width = shape, width
        self.space = basis(shape, width)
        self.orbits: list[list[tuple]] = [[] for _ in self.space.basis]
        for phi in sigma_alpha(shape):
            for word in _product(range(width), repeat=n):
                self.orbits[self.space.index[self.count_matrix(phi, word)]].append((phi, word))
        self._pairs = {p for o in self.orbits for p in o}

    def count_matrix(self, phi, word) -> tuple:
        pos = {s: i for i, s in enumerate(self.shape.support)}
        C = [[0] * self.width for _ in self.shape.support]
        for s, w in zip(phi, word):
            C[pos[s]][w] += 1
        return tuple(tuple(r) for r in C)

    @property
    def dimension(self) -> int:
        return sum(1 for o in self.orbits if o)

    def orbit_vector(self, i: int) -> dict:
        return {pair: 1 for pair in self.orbits[i]}

    def coordinates(self, vec: dict) -> list:
        """Coordinates of an invariant tensor in the orbit-sum basis (checked)."""
        out = []
        for orb in self.orbits:
            vals = {vec.get(pair, 0) for pair in orb}
            if len(vals) != 1:
                raise ValueError("tensor is not invariant")
            out.append(vals.pop())
        if any(pair not in self._pairs for pair, v in vec.items() if v):
            raise ValueError("tensor has support outside the space")
        return out


def invariants_oracle(shape: Multiset, width: int) -> InvariantSpace:
    return InvariantSpace(shape, width)


def oracle_lower(f: Multijection, width: int) -> ExactMatrix:
    """``f_*`` computed on invariant tensors: ``(φ, w) -> (f∘φ, w)``."""
    S, T = InvariantSpace(f.source, width), InvariantSpace(f.target, width)
    fm = f.map
    data = {}
    for j in range(len(S.orbits)):
        img: dict = {}
        for phi, w in S.orbits[j]:
            key = (tuple(fm[x] for x in phi), w)
            img[key] = img.get(key, 0) + 1
        for i, c in enumerate(T.coordinates(img)):
            if c:
                data[(i, j)] = c
    return ExactMatrix(len(T.orbits), len(S.orbits), data)


def oracle_upper(f: Multijection, width: int) -> ExactMatrix:
    """``f^*`` on invariant tensors: ``(ψ, w) -> sum over φ with f∘φ = ψ``."""
    S, T = InvariantSpace(f.source, width), InvariantSpace(f.target, width)
    fm = f.map
    lifts: dict[tuple, list] = {}
    for phi in sigma_alpha(f.source):
        lifts.setdefault(tuple(fm[x] for x in phi), []).append(phi)
    data = {}
    for j in range(len(T.orbits)):
        img: dict = {}
        for psi, w in T.orbits[j]:
            for phi in lifts.get(psi, ()):
                img[(phi, w)] = img.get((phi, w), 0) + 1
        for i, c in enumerate(S.coordinates(img)):
            if c:
                data[(i, j)] = c
    return ExactMatrix(len(S.orbits), len(T.orbits), data)


def oracle_realize_graph(g: GraphMorphism, width: int) -> ExactMatrix:
    sp = g.span()
    return oracle_lower(sp.right, width) @ oracle_upper(sp.left, width)


def oracle_permutation_action(n: int, width: int, perm: tuple[int, ...]) -> ExactMatrix:
    """Place permutation on ``Γ^{[1^n]}(Z^m) = (Z^m)^{⊗n}``: factor k moves to perm[k]."""
    shape = Multiset.ones(n)
    sp = basis(shape, width)
    data = {}
    for j, E in enumerate(sp.basis):
        F = [None] * n
        for k in range(n):
            F[perm[k]] = E[k]
        data[(sp.index[tuple(F)], j)] = 1
    return ExactMatrix(len(sp), len(sp), data)


# -- Γ of finitely presented modules ----------------------------------------

def _tensor_vec(u: dict, v_index: tuple, first: GammaSpace, target: GammaSpace) -> dict:
    out = {}
    for i, c in u.items():
        out[target.index[(first.basis[i][0], v_index)]] = c
    return out


def gamma_of_presentation(n: int, M: FPModule) -> FPModule:
    """``Γ^n(M)`` for ``M = Z^b / A``.

    Generators are the weight monomials of ``Γ^n(Z^b)``.  Relations are the
    products ``Γ^i(A)(u) · v`` for ``1 <= i <= n``, ``u`` a monomial of
    ``Γ^i(Z^a)`` and ``v`` of ``Γ^{n-i}(Z^b)``.
    """
    b = M.rank
    A = M.relations
    a = A.shape[1]
    top = basis(Multiset.partition([n]) if n else Multiset(), b)
    cols: list[dict] = []
    if a:
        for i in range(1, n + 1):
            Gi = apply_linear_map(Multiset.partition([i]), A.tolist())
            gi_src = basis(Multiset.partition([i]), a)
            gi_tgt = basis(Multiset.partition([i]), b)
            if i == n:
                for j in range(len(gi_src)):
                    cols.append(Gi.column(j))
                continue
            pair = Multiset.partition([i, n - i])
            merge = Multijection.from_map(pair, Multiset.partition([n]), {1: 1, 2: 1})
            L = realize_lower(merge, b)
            rest = basis(Multiset.partition([n - i]), b)
            pair_sp = basis(pair, b)
            for j in range(len(gi_src)):
                u = Gi.column(j)
                for v in rest.basis:
                    vec = _tensor_vec(u, v[0], gi_tgt, pair_sp)
                    img: dict = {}
                    for k, c in vec.items():
                        for r, w in L.column(k).items():
                            img[r] = img.get(r, 0) + c * w
                    cols.append(img)
    rel = zeros(len(top), len(cols))
    for j, col in enumerate(cols):
        for i, v in col.items():
            rel[i, j] = v
    return FPModule(len(top), rel, M.ring)


def gamma_shape_of_presentation(shape: Multiset, M: FPModule) -> FPModule:
    """``Γ^shape(M) = ⊗_s Γ^{μ(s)}(M)``; generators follow ``basis(shape, rank)``."""
    out = FPModule(1, zeros(1, 0), M.ring)
    for m in shape.mults:
        out = out.tensor(gamma_of_presentation(m, M))
    return out


# -- direct sums ------------------------------------------------------------

def direct_sum_decompose(shape: Multiset, widths: Iterable[int]) -> dict[tuple, list[int]]:
    """Split ``basis(shape, sum(widths))`` by how much weight each row puts in each summand.

    Keys are multi-maps ``shape -> summands``: per point of `shape`, the
    composition of its multiplicity over the summands.  Values list basis
    indices in basis order.
    """
    widths = list(widths)
    bounds, start = [], 0
    for w in widths:
        bounds.append((start, start + w))
        start += w
    sp = basis(shape, start)
    blocks: dict[tuple, list[int]] = {}
    for idx, E in enumerate(sp.basis):
        key = tuple(tuple(sum(row[a:b]) for a, b in bounds) for row in E)
        blocks.setdefault(key, []).append(idx)
    return blocks


def block_dimension(key: tuple, widths: Iterable[int]) -> int:
    widths = list(widths)
    return prod(comb(k + w - 1, w - 1) if w else (1 if k == 0 else 0)
                for row in key for k, w in zip(row, widths))


__all__ = [
    "ExactMatrix",
    "GammaSpace",
    "InvariantSpace",
    "SizeError",
    "WeightMonomial",
    "apply_linear_map",
    "basis",
    "block_dimension",
    "direct_sum_decompose",
    "expected_dimension",
    "gamma_of_presentation",
    "gamma_shape_of_presentation",
    "invariants_oracle",
    "oracle_lower",
    "oracle_permutation_action",
    "oracle_realize_graph",
    "oracle_upper",
    "realize",
    "realize_graph",
    "realize_lower",
    "realize_upper",
    "sigma_alpha",
    "weak_compositions",
]
