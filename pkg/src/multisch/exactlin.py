"""Exact linear algebra: Smith normal form, cokernels, finitely presented modules.

Matrices are numpy arrays of ``dtype=object`` holding Python ints, so entries
never overflow.  A finitely presented module is ``Z^rank / image(relations)``
base-changed to a :class:`~multisch.rings.CoeffRing`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm

import numpy as np

from multisch.rings import (
    ZZ,
    CoeffRing,
    IntegersMod,
    Integers,
    LocalRationals,
    Rationals,
)


class RelationViolation(ValueError):
    """A lift does not carry relations into relations."""


def as_matrix(m, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce nested lists (or an array) to an object array of Python ints."""
    if isinstance(m, np.ndarray) and m.dtype == object and m.ndim == 2:
        out = m.copy()
    else:
        data = [[int(v) for v in row] for row in m]
        if not data:
            out = np.zeros((rows or 0, cols or 0), dtype=object)
        else:
            out = np.empty((len(data), len(data[0])), dtype=object)
            for i, row in enumerate(data):
                out[i, :] = row
    if rows is not None and out.shape[0] != rows and out.size:
        raise ValueError(f"expected {rows} rows, got {out.shape[0]}")
    if out.size == 0:
        out = np.zeros((rows if rows is not None else out.shape[0],
                        cols if cols is not None else out.shape[1]), dtype=object)
    return out


def identity_matrix(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=object)


@dataclass
class SNF:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    Uinv: np.ndarray
    Vinv: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        k = min(self.D.shape)
        return [int(self.D[i, i]) for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(a) -> SNF:
    A = as_matrix(a)
    r, c = A.shape
    U, Uinv = identity_matrix(r), identity_matrix(r)
    V, Vinv = identity_matrix(c), identity_matrix(c)

    def swap_rows(i, j):
        if i != j:
            A[[i, j], :] = A[[j, i], :]
            U[[i, j], :] = U[[j, i], :]
            Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def swap_cols(i, j):
        if i != j:
            A[:, [i, j]] = A[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]
            Vinv[[i, j], :] = Vinv[[j, i], :]

    def add_row(i, j, q):  # row i -= q * row j
        A[i, :] -= q * A[j, :]
        U[i, :] -= q * U[j, :]
        Uinv[:, j] += q * Uinv[:, i]

    def add_col(i, j, q):  # col i -= q * col j
        A[:, i] -= q * A[:, j]
        V[:, i] -= q * V[:, j]
        Vinv[j, :] += q * Vinv[i, :]

    t = 0
    while t < min(r, c):
        sub = A[t:, t:]
        nz = [(abs(sub[i, j]), i, j) for i in range(sub.shape[0])
              for j in range(sub.shape[1]) if sub[i, j] != 0]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, t + pi)
        swap_cols(t, t + pj)
        while True:
            p = A[t, t]
            done = True
            for i in range(t + 1, r):
                if A[i, t]:
                    add_row(i, t, A[i, t] // p)
                    if A[i, t]:
                        done = False
            for j in range(t + 1, c):
                if A[t, j]:
                    add_col(j, t, A[t, j] // p)
                    if A[t, j]:
                        done = False
            if not done:
                # a remainder smaller than the pivot survived; move it in
                col = [(abs(A[i, t]), i) for i in range(t + 1, r) if A[i, t]]
                row = [(abs(A[t, j]), j) for j in range(t + 1, c) if A[t, j]]
                if col and (not row or min(col) <= min(row)):
                    swap_rows(t, min(col)[1])
                elif row:
                    swap_cols(t, min(row)[1])
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if A[i, j] % p), None)
            if bad is None:
                break
            # enforce divisibility: fold the offending row into the pivot row
            A[t, :] += A[bad[0], :]
            U[t, :] += U[bad[0], :]
            Uinv[:, bad[0]] -= Uinv[:, t]
        if A[t, t] < 0:
            A[t, :] = -A[t, :]
            U[t, :] = -U[t, :]
            Uinv[:, t] = -Uinv[:, t]
        t += 1
    return SNF(U, A, V, Uinv, Vinv)


# -- cokernels over the supported rings -------------------------------------

@dataclass(frozen=True)
class Invariants:
    """A cyclic decomposition: torsion factors (each > 1, dividing chain) and free rank."""

    torsion: tuple[int, ...]
    free: int
    ring: CoeffRing = ZZ

    def order(self) -> int | None:
        if self.free and not isinstance(self.ring, IntegersMod):
            return None
        m = self.ring.m if isinstance(self.ring, IntegersMod) else 1
        out = m ** self.free
        for d in self.torsion:
            out *= d
        return out

    def is_zero(self) -> bool:
        return not self.torsion and not self.free

    def __str__(self) -> str:
        return describe(self)


def _base_change(diag: list[int], rows: int, ring: CoeffRing) -> Invariants:
    nonzero = [d for d in diag if d]
    free = rows - len(nonzero)
    if isinstance(ring, Integers):
        return Invariants(tuple(d for d in nonzero if d != 1), free, ring)
    if isinstance(ring, Rationals):
        return Invariants((), free, ring)
    if isinstance(ring, LocalRationals):
        tors = []
        for d in nonzero:
            q = 1
            while d % ring.p == 0:
                d //= ring.p
                q *= ring.p
            if q > 1:
                tors.append(q)
        return Invariants(tuple(tors), free, ring)
    if isinstance(ring, IntegersMod):
        tors = []
        for d in nonzero:
            g = gcd(d, ring.m)
            if g == ring.m:
                free += 1
            elif g > 1:
                tors.append(g)
        return Invariants(tuple(sorted(tors)), free, ring)
    raise TypeError(f"unsupported ring {ring!r}")


def cokernel_invariants(m, rows: int | None = None, ring: CoeffRing = ZZ) -> Invariants:
    """Invariants of ``ring^rows / image(m)``; `m` has one column per relation."""
    A = as_matrix(m, rows=rows, cols=0 if rows is not None else None)
    if rows is None:
        rows = A.shape[0]
    if A.shape[1] == 0:
        return _base_change([], rows, ring)
    return _base_change(smith_normal_form(A).diagonal, rows, ring)


def describe(inv: Invariants) -> str:
    base = {"Z": "Z", "Q": "Q"}.get(inv.ring.tag)
    if base is None and isinstance(inv.ring, IntegersMod):
        base = f"Z/{inv.ring.m}"
    elif base is None:
        base = f"Z_({inv.ring.p})"
    parts = [f"Z/{d}" for d in inv.torsion]
    if inv.free == 1:
        parts.append(base)
    elif inv.free > 1:
        parts.append(f"({base})^{inv.free}" if "/" in base else f"{base}^{inv.free}")
    return " + ".join(parts) if parts else "0"


def parse_description(text: str) -> Invariants:
    """Inverse of :func:`describe` for integer modules ("Z/2 + Z^3", "0")."""
    text = text.strip()
    tors, free = [], 0
    if text == "0":
        return Invariants((), 0)
    for part in text.split("+"):
        part = part.strip()
        if part.startswith("Z/"):
            tors.append(int(part[2:]))
        elif part == "Z":
            free += 1
        elif part.startswith("Z^"):
            free += int(part[2:])
        else:
            raise ValueError(f"cannot parse module summand {part!r}")
    return Invariants(tuple(tors), free)


# -- finitely presented modules ---------------------------------------------

class FPModule:
    """``ring^rank / image(relations)``, presented by an integer matrix."""

    def __init__(self, rank: int, relations=None, ring: CoeffRing = ZZ):
        self.rank = int(rank)
        if relations is None:
            relations = zeros(self.rank, 0)
        self.relations = as_matrix(relations, rows=self.rank, cols=0)
        if self.relations.shape[0] != self.rank:
            raise ValueError("relations must have one row per generator")
        self.ring = ring

    @classmethod
    def free(cls, n: int, ring: CoeffRing = ZZ) -> FPModule:
        return cls(n, zeros(n, 0), ring)

    @classmethod
    def cyclic(cls, d: int, ring: CoeffRing = ZZ) -> FPModule:
        return cls(1, [[d]], ring)

    @classmethod
    def from_invariants(cls, torsion, free: int = 0, ring: CoeffRing = ZZ) -> FPModule:
        torsion = list(torsion)
        n = len(torsion) + free
        rel = zeros(n, len(torsion))
        for i, d in enumerate(torsion):
            rel[i, i] = d
        return cls(n, rel, ring)

    @cached_property
    def snf(self) -> SNF:
        return smith_normal_form(self.relations)

    @cached_property
    def invariants(self) -> Invariants:
        if self.relations.shape[1] == 0:
            return _base_change([], self.rank, self.ring)
        return _base_change(self.snf.diagonal, self.rank, self.ring)

    def describe(self) -> str:
        return describe(self.invariants)

    __str__ = describe

    def __repr__(self):
        return f"FPModule({self.describe()})"

    def order(self) -> int | None:
        return self.invariants.order()

    def is_zero(self) -> bool:
        return self.invariants.is_zero()

    def isomorphic(self, other: FPModule) -> bool:
        return self.ring == other.ring and self.invariants == other.invariants

    def change_ring(self, ring: CoeffRing) -> FPModule:
        return FPModule(self.rank, self.relations, ring)

    def direct_sum(self, other: FPModule) -> FPModule:
        return direct_sum([self, other])

    def tensor(self, other: FPModule) -> FPModule:
        """Relations ``A ⊗ 1`` and ``1 ⊗ B`` on generators ``e_i ⊗ f_j`` (row-major)."""
        a, b = self.relations, other.relations
        left = np.kron(a, identity_matrix(other.rank)) if a.shape[1] else zeros(self.rank * other.rank, 0)
        right = np.kron(identity_matrix(self.rank), b) if b.shape[1] else zeros(self.rank * other.rank, 0)
        rel = np.concatenate([left.astype(object), right.astype(object)], axis=1)
        return FPModule(self.rank * other.rank, rel, self.ring)

    def contains(self, vec) -> bool:
        """Whether the column `vec` (over the ring) lies in the relation submodule."""
        return in_image(self.relations, vec, self.ring, self.snf if self.relations.shape[1] else None)

    def to_json(self) -> dict:
        return {"rank": self.rank,
                "relations": [[str(v) for v in row] for row in self.relations.tolist()],
                "ring": self.ring.tag,
                "invariants": self.describe()}


def direct_sum(mods: list[FPModule]) -> FPModule:
    ring = mods[0].ring if mods else ZZ
    n = sum(m.rank for m in mods)
    k = sum(m.relations.shape[1] for m in mods)
    rel = zeros(n, k)
    r = c = 0
    for m in mods:
        if m.ring != ring:
            raise ValueError("direct sum of modules over different rings")
        a, b = m.relations.shape
        rel[r:r + a, c:c + b] = m.relations
        r, c = r + a, c + b
    return FPModule(n, rel, ring)


def _clear(vec, ring: CoeffRing) -> list[int]:
    """Integer representative of a ring vector, scaled by a unit if needed."""
    vals = list(vec)
    if isinstance(ring, IntegersMod):
        return [int(ring.coerce(v)) for v in vals]
    den = 1
    for v in vals:
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    if den > 1 and isinstance(ring, Integers):
        raise ValueError("non-integral vector over Z")
    return [int(Fraction(v) * den) for v in vals]


def in_image(rel, vec, ring: CoeffRing = ZZ, snf: SNF | None = None) -> bool:
    rel = as_matrix(rel)
    x = _clear(vec, ring)
    n = rel.shape[0]
    if rel.shape[1] == 0:
        return all(ring.is_zero(v) for v in x) if not isinstance(ring, IntegersMod) \
            else all(v % ring.m == 0 for v in x)
    if snf is None:
        snf = smith_normal_form(rel)
    y = snf.U.dot(np.array(x, dtype=object).reshape(n, 1))
    diag = snf.diagonal
    for i in range(n):
        yi = int(y[i, 0])
        d = diag[i] if i < len(diag) else 0
        if not _divides(d, yi, ring):
            return False
    return True


def _divides(d: int, y: int, ring: CoeffRing) -> bool:
    """Whether ``y`` lies in ``d * ring`` (images of integers)."""
    if isinstance(ring, Integers):
        return y == 0 if d == 0 else y % d == 0
    if isinstance(ring, Rationals):
        return y == 0 or d != 0
    if isinstance(ring, LocalRationals):
        if y == 0:
            return True
        if d == 0:
            return False
        return _val(d, ring.p) <= _val(y, ring.p)
    g = gcd(d, ring.m)
    return y % g == 0


def _val(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class ModuleMap:
    """A map of FP modules given by a lift ``codomain.rank x domain.rank``."""

    def __init__(self, domain: FPModule, codomain: FPModule, lift, check: bool = True):
        self.domain = domain
        self.codomain = codomain
        self.lift = as_matrix(lift, rows=codomain.rank, cols=domain.rank)
        if self.lift.shape != (codomain.rank, domain.rank):
            raise ValueError(f"lift must be {codomain.rank}x{domain.rank}")
        if check:
            img = self.lift.dot(domain.relations) if domain.relations.shape[1] else zeros(codomain.rank, 0)
            for j in range(img.shape[1]):
                if not codomain.contains(img[:, j]):
                    raise RelationViolation(f"relation {j} is not mapped into relations")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleMap):
            return NotImplemented
        if self.lift.shape != other.lift.shape:
            return False
        diff = self.lift - other.lift
        return all(self.codomain.contains(diff[:, j]) for j in range(diff.shape[1]))

    def compose(self, inner: ModuleMap) -> ModuleMap:
        """``self ∘ inner``."""
        return ModuleMap(inner.domain, self.codomain, self.lift.dot(inner.lift), check=False)

    def is_surjective(self) -> bool:
        return self.cokernel().is_zero()

    def cokernel(self) -> FPModule:
        rel = np.concatenate([self.lift, self.codomain.relations], axis=1)
        return FPModule(self.codomain.rank, rel, self.codomain.ring)

    def kernel(self) -> FPModule:
        """Kernel over the integers: ``{x : Lx in im B} / im A``."""
        if not isinstance(self.domain.ring, Integers):
            raise NotImplementedError("kernels are computed over Z only")
        a = self.domain.rank
        B = self.codomain.relations
        big = np.concatenate([self.lift, -B], axis=1) if B.shape[1] else self.lift
        if big.shape[0] == 0:
            null = identity_matrix(big.shape[1])
        else:
            s = smith_normal_form(big)
            null = s.V[:, s.rank:]
        P = null[:a, :]
        basis = lattice_basis(P)
        A = self.domain.relations
        if basis.shape[1] == 0:
            return FPModule(0)
        coords = solve_in_basis(basis, A) if A.shape[1] else zeros(basis.shape[1], 0)
        return FPModule(basis.shape[1], coords)


def lattice_basis(gens) -> np.ndarray:
    """A basis (as columns) of the lattice spanned by the columns of `gens`."""
    G = as_matrix(gens)
    if G.shape[1] == 0 or G.shape[0] == 0:
        return zeros(G.shape[0], 0)
    s = smith_normal_form(G)
    r = s.rank
    out = s.Uinv[:, :r].copy()
    for i, d in enumerate(s.diagonal[:r]):
        out[:, i] *= d
    return out


def solve_in_basis(basis, target) -> np.ndarray:
    """Integer ``C`` with ``basis @ C == target``; `basis` has independent columns."""
    Bm, T = as_matrix(basis), as_matrix(target)
    s = smith_normal_form(Bm)
    r = s.rank
    y = s.U.dot(T)
    if any(y[i, j] for i in range(r, y.shape[0]) for j in range(y.shape[1])):
        raise ValueError("target not in the span")
    z = zeros(Bm.shape[1], T.shape[1])
    diag = s.diagonal
    for i in range(r):
        for j in range(T.shape[1]):
            if y[i, j] % diag[i]:
                raise ValueError("target not in the lattice")
            z[i, j] = y[i, j] // diag[i]
    return s.V.dot(z)


# -- exact rank over Q ------------------------------------------------------

def rank_q(rows) -> int:
    """Rank over Q of sparse rows (dicts column -> value) or dense rows."""
    work: list[dict] = []
    for row in rows:
        if isinstance(row, dict):
            work.append({k: Fraction(v) for k, v in row.items() if v})
        else:
            work.append({k: Fraction(v) for k, v in enumerate(row) if v})
    pivots: dict[object, dict] = {}
    rank = 0
    for row in work:
        row = dict(row)
        while row:
            col = min(row, key=repr) if not all(isinstance(k, int) for k in row) else min(row)
            if col not in pivots:
                piv = row[col]
                pivots[col] = {k: v / piv for k, v in row.items()}
                rank += 1
                break
            factor = row[col]
            for k, v in pivots[col].items():
                nv = row.get(k, 0) - factor * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return rank


def determinant(a) -> int:
    """Exact determinant by fraction-free elimination (Bareiss)."""
    A = [list(map(int, r)) for r in as_matrix(a).tolist()]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


__all__ = [
    "FPModule",
    "Invariants",
    "ModuleMap",
    "RelationViolation",
    "SNF",
    "as_matrix",
    "cokernel_invariants",
    "describe",
    "determinant",
    "direct_sum",
    "identity_matrix",
    "in_image",
    "lattice_basis",
    "parse_description",
    "rank_q",
    "smith_normal_form",
    "solve_in_basis",
    "zeros",
]
