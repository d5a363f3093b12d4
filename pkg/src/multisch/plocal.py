"""p-local and rational reduction to multisets with p-power multiplicities.

Over a ring where ``deg f`` is invertible, a multijection ``f: α' -> α``
exhibits ``α`` as a retract of ``α'`` in the Schur category: the Hecke
relation gives ``f_* f^* = deg f``, so ``e = f^* f_* / deg f`` is an
idempotent on ``α'`` splitting off a copy of ``α``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from multisch.exactlin import rank_q
from multisch.multijection import Multijection, degree
from multisch.multiset import Multiset, cardinality, factorial as ms_factorial
from multisch.rings import QQ, CoeffRing, LocalRationals, is_prime
from multisch.schurcat import (
    SchMorphism,
    compose,
    endomorphism_permutations,
    identity,
    lowerstar,
    upperstar,
)


@dataclass(frozen=True)
class Valuation:
    p: int
    value: int


def _check_prime(p: int):
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def factorial_valuation(p: int, n: int) -> int:
    """Legendre: ``v_p(n!) = sum_k floor(n / p^k)``."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def multinomial_valuation(p: int, parts) -> Valuation:
    _check_prime(p)
    parts = [int(x) for x in parts]
    if any(x < 0 for x in parts):
        raise ValueError("parts must be nonnegative")
    v = factorial_valuation(p, sum(parts)) - sum(factorial_valuation(p, x) for x in parts)
    return Valuation(p, v)


def carries(p: int, parts) -> int:
    """Number of carries when adding `parts` in base `p` (Kummer's count)."""
    _check_prime(p)
    out, running = 0, 0
    # add the parts one at a time, counting carries digit by digit
    for x in (int(v) for v in parts):
        a, b, carry = running, x, 0
        while a or b or carry:
            carry = 1 if a % p + b % p + carry >= p else 0
            out += carry
            a, b = a // p, b // p
        running += x
    return out


def base_digits(m: int, p: int) -> list[int]:
    out = []
    while m:
        out.append(m % p)
        m //= p
    return out


@dataclass(frozen=True)
class Reduction:
    """``f: reduced -> original`` with ``d = deg f``."""

    original: Multiset
    reduced: Multiset
    f: Multijection
    d: int
    p: int | None = None

    def to_json(self) -> dict:
        return {"alpha": str(self.original), "alpha_prime": str(self.reduced),
                "map": {str(s): t for s, t in self.f.mapping}, "d": str(self.d),
                "p": self.p}


def _is_power(m: int, p: int) -> bool:
    while m % p == 0:
        m //= p
    return m == 1


def p_reduce(alpha: Multiset, p: int) -> Reduction:
    """Replace each multiplicity ``m = sum a_i p^i`` by ``a_i`` points of multiplicity ``p^i``.

    A point already of p-power multiplicity is kept as is.  Otherwise its
    smallest piece keeps the label and the other pieces take fresh labels
    above the current maximum, in increasing order of size.
    """
    _check_prime(p)
    fresh = max(alpha.support, default=0) + 1
    entries: dict[int, int] = {}
    mp: dict[int, int] = {}
    for lab, m in alpha.entries:
        if _is_power(m, p):
            entries[lab] = m
            mp[lab] = lab
            continue
        pieces = [p ** i for i, a in enumerate(base_digits(m, p)) for _ in range(a)]
        entries[lab] = pieces[0]
        mp[lab] = lab
        for size in pieces[1:]:
            entries[fresh] = size
            mp[fresh] = lab
            fresh += 1
    reduced = Multiset.from_dict(entries)
    f = Multijection.from_map(reduced, alpha, mp)
    return Reduction(alpha, reduced, f, degree(f), p)


def char0_reduce(alpha: Multiset) -> Reduction:
    """``[1^n] -> alpha`` sending consecutive blocks onto the points in label order."""
    n = cardinality(alpha)
    src = Multiset.ones(n)
    mp, k = {}, 1
    for lab, m in alpha.entries:
        for _ in range(m):
            mp[k] = lab
            k += 1
    f = Multijection.from_map(src, alpha, mp)
    return Reduction(alpha, src, f, degree(f), None)


def orbit_count(alpha: Multiset) -> int:
    """``n! / alpha!``, the number of multijections ``[1^n] -> alpha``."""
    return factorial(cardinality(alpha)) // ms_factorial(alpha)


def default_ring(red: Reduction) -> CoeffRing:
    return LocalRationals(red.p) if red.p is not None else QQ


def split_idempotent(red: Reduction, ring: CoeffRing | None = None) -> SchMorphism:
    """``e = d^-1 f^* f_*`` in ``End(reduced)``; needs `d` invertible in `ring`."""
    ring = ring or default_ring(red)
    dinv = ring.inv(red.d)
    return compose(upperstar(red.f, ring), lowerstar(red.f, ring)).scale(dinv)


def check_splitting(red: Reduction, ring: CoeffRing | None = None) -> dict[str, bool]:
    ring = ring or default_ring(red)
    e = split_idempotent(red, ring)
    low, up = lowerstar(red.f, ring), upperstar(red.f, ring)
    return {
        "idempotent": compose(e, e) == e,
        "absorbs": compose(low, e) == low,
        "hecke": compose(low, up) == identity(red.original, ring).scale(red.d),
        "p_powers": red.p is None or all(_is_power(m, red.p) for m in red.reduced.mults),
        "degree_unit": red.p is None or red.d % red.p != 0,
    }


def corner_rank(alpha: Multiset) -> int:
    """Rank over Q of ``e End([1^n]) e`` for the rational reduction of `alpha`."""
    red = char0_reduce(alpha)
    e = split_idempotent(red, QQ)
    n = cardinality(alpha)
    rows = []
    for g in endomorphism_permutations(n):
        x = compose(e, compose(SchMorphism.of(g, 1, QQ), e))
        rows.append({gr.flat: c for gr, c in x.terms.items()})
    return rank_q(rows)


__all__ = [
    "Reduction",
    "Valuation",
    "base_digits",
    "carries",
    "char0_reduce",
    "check_splitting",
    "corner_rank",
    "default_ring",
    "factorial_valuation",
    "multinomial_valuation",
    "orbit_count",
    "p_reduce",
    "split_idempotent",
]
