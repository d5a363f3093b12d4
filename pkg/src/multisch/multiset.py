"""Finite multisets over integer labels.

A :class:`Multiset` stores its entries sorted by label with strictly positive
multiplicities, so equal multisets compare and hash equal.  Everything that
enumerates downstream walks the support in this order.

Text syntax::

    {1:2, 2:1}     explicit label:multiplicity pairs
    [2,1]          shorthand for labels 1..k with the listed multiplicities
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product as _product
from math import factorial as _factorial, prod
from typing import Iterable, Mapping


class ParseError(ValueError):
    """Malformed multiset literal; ``pos`` is the offending character offset."""

    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True, order=True)
class Multiset:
    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = None
        for label, mult in self.entries:
            if not isinstance(label, int) or label < 0:
                raise ValueError(f"labels must be nonnegative integers, got {label!r}")
            if not isinstance(mult, int) or mult < 1:
                raise ValueError(f"multiplicities must be positive, got {mult!r}")
            if prev is not None and label <= prev:
                raise ValueError("entries must be strictly sorted by label")
            prev = label

    @classmethod
    def from_dict(cls, d: Mapping[int, int]) -> Multiset:
        return cls(tuple(sorted((int(k), int(v)) for k, v in d.items() if v)))

    @classmethod
    def partition(cls, mults: Iterable[int]) -> Multiset:
        """Labels ``1..k`` carrying `mults` in order (zeros are skipped)."""
        return cls(tuple((i, m) for i, m in enumerate(mults, start=1) if m))

    @classmethod
    def ones(cls, n: int, start: int = 1) -> Multiset:
        """The ordinary set ``[1^n]`` (all multiplicities one)."""
        return cls(tuple((start + i, 1) for i in range(n)))

    @classmethod
    def parse(cls, text: str) -> Multiset:
        return parse(text)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(label for label, _ in self.entries)

    @property
    def mults(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.entries)

    def mult(self, label: int) -> int:
        for lab, m in self.entries:
            if lab == label:
                return m
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, label) -> bool:
        return any(lab == label for lab, _ in self.entries)

    def __iter__(self):
        return iter(self.support)

    def __add__(self, other: Multiset) -> Multiset:
        return sum_(self, other)

    def __str__(self) -> str:
        return format_multiset(self)

    def __repr__(self) -> str:
        return f"Multiset({format_multiset(self)})"


def cardinality(s: Multiset) -> int:
    return sum(m for _, m in s.entries)


def factorial(s: Multiset) -> int:
    """``prod_x mult(x)!``; 1 for the empty multiset."""
    return prod(_factorial(m) for _, m in s.entries)


def sum_(s: Multiset, t: Multiset) -> Multiset:
    d = s.as_dict()
    for label, m in t.entries:
        d[label] = d.get(label, 0) + m
    return Multiset.from_dict(d)


def disjoint_union(s: Multiset, t: Multiset) -> tuple[Multiset, dict[int, int], dict[int, int]]:
    """Disjoint union with fresh labels ``1..len(s)+len(t)``.

    Returns the union together with the two injections (old label -> new
    label).  The points of `s` come first, so ``[2] ⊔ [1] == [2,1]``.
    """
    inj_s = {lab: i for i, lab in enumerate(s.support, start=1)}
    off = len(s)
    inj_t = {lab: off + i for i, lab in enumerate(t.support, start=1)}
    entries = tuple((inj_s[lab], m) for lab, m in s.entries)
    entries += tuple((inj_t[lab], m) for lab, m in t.entries)
    return Multiset(entries), inj_s, inj_t


def product(s: Multiset, t: Multiset) -> tuple[Multiset, dict[int, tuple[int, int]]]:
    """Cartesian product; new labels ``1..`` enumerate pairs lexicographically.

    The second return value maps each new label to its ``(x, y)`` pair.
    """
    pairs = {}
    entries = []
    for i, ((x, mx), (y, my)) in enumerate(_product(s.entries, t.entries), start=1):
        pairs[i] = (x, y)
        entries.append((i, mx * my))
    return Multiset(tuple(entries)), pairs


def canonical_shape(s: Multiset) -> tuple[int, ...]:
    """Weakly decreasing multiplicity list: the isomorphism class of `s`."""
    return tuple(sorted(s.mults, reverse=True))


def representative(shape: Iterable[int]) -> Multiset:
    """The canonical representative of a partition shape: labels ``1..k``."""
    return Multiset.partition(sorted(shape, reverse=True))


def canonical_iso(s: Multiset) -> dict[int, int]:
    """Relabeling of `s` onto its representative.

    Points are ordered by decreasing multiplicity, ties broken by label.
    """
    order = sorted(s.entries, key=lambda e: (-e[1], e[0]))
    return {lab: i for i, (lab, _) in enumerate(order, start=1)}


def is_isomorphic(s: Multiset, t: Multiset) -> bool:
    return canonical_shape(s) == canonical_shape(t)


def relabel(s: Multiset, mapping: Mapping[int, int]) -> Multiset:
    return Multiset.from_dict({mapping[lab]: m for lab, m in s.entries})


def splittings(g: Multiset) -> list[tuple[Multiset, Multiset]]:
    """All ``(a, b)`` with ``a + b == g``, empty parts allowed.

    Ordered lexicographically with the first part's multiplicities
    decreasing, so ``{c:2}`` gives ``(2,0), (1,1), (0,2)``.
    """
    out = []
    labels = g.support
    for split in _product(*(range(m, -1, -1) for m in g.mults)):
        a = Multiset(tuple((lab, k) for lab, k in zip(labels, split) if k))
        b = Multiset(tuple((lab, m - k) for lab, m, k in zip(labels, g.mults, split) if m - k))
        out.append((a, b))
    return out


def compositions(g: Multiset, parts: int) -> list[tuple[Multiset, ...]]:
    """Ordered `parts`-tuples of multisets summing to `g` (iterated splittings)."""
    if parts <= 0:
        return [()] if not g.entries else []
    if parts == 1:
        return [(g,)]
    out = []
    for a, rest in splittings(g):
        for tail in compositions(rest, parts - 1):
            out.append((a,) + tail)
    return out


def partitions(n: int, max_part: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of `n` as weakly decreasing tuples, in reverse lex order."""
    if max_part is None:
        max_part = n
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return out


def shapes_up_to(n: int) -> list[tuple[int, ...]]:
    return [lam for k in range(n + 1) for lam in partitions(k)]


def format_multiset(s: Multiset) -> str:
    """Shorthand ``[..]`` when the labels are exactly ``1..k``, else ``{..}``."""
    if s.support == tuple(range(1, len(s) + 1)):
        return "[" + ",".join(str(m) for m in s.mults) + "]"
    return "{" + ", ".join(f"{lab}:{m}" for lab, m in s.entries) + "}"


_TOKEN = re.compile(r"\s*(\d+|[\[\]{}:,])")


def parse(text: str) -> Multiset:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", text, pos)
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    if not toks:
        raise ParseError("empty input", text, 0)

    def expect(i, want):
        if i >= len(toks):
            raise ParseError(f"expected {want!r}", text, len(text))
        if toks[i][0] != want:
            raise ParseError(f"expected {want!r}", text, toks[i][1])
        return i + 1

    def number(i):
        if i >= len(toks) or not toks[i][0].isdigit():
            where = toks[i][1] if i < len(toks) else len(text)
            raise ParseError("expected a number", text, where)
        return int(toks[i][0]), i + 1

    opener = toks[0][0]
    i = 1
    if opener == "[":
        mults = []
        if i < len(toks) and toks[i][0] == "]":
            i += 1
        else:
            while True:
                v, i = number(i)
                if v == 0:
                    raise ParseError("multiplicity must be positive", text, toks[i - 1][1])
                mults.append(v)
                if i < len(toks) and toks[i][0] == ",":
                    i += 1
                    continue
                i = expect(i, "]")
                break
        result = Multiset.partition(mults)
    elif opener == "{":
        d: dict[int, int] = {}
        if i < len(toks) and toks[i][0] == "}":
            i += 1
        else:
            while True:
                lab, i = number(i)
                lab_pos = toks[i - 1][1]
                i = expect(i, ":")
                v, i = number(i)
                if v == 0:
                    raise ParseError("multiplicity must be positive", text, toks[i - 1][1])
                if lab in d:
                    raise ParseError("duplicate label", text, lab_pos)
                d[lab] = v
                if i < len(toks) and toks[i][0] == ",":
                    i += 1
                    continue
                i = expect(i, "}")
                break
        result = Multiset.from_dict(d)
    else:
        raise ParseError("expected '[' or '{'", text, toks[0][1])
    if i != len(toks):
        raise ParseError("trailing input", text, toks[i][1])
    return result
