"""Exact coefficient rings: Z, Q, Z/m and the p-local rationals Z_(p).

Elements are plain ``int`` or ``fractions.Fraction`` values; a ring object
normalizes them (reduction mod m, the denominator guard for Z_(p)) and knows
how to print and parse them.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


class RingError(ArithmeticError):
    """An element is not in the ring, or is not invertible there."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class CoeffRing:
    tag = "?"

    def coerce(self, x):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return self.coerce(x) == 0

    def inv(self, x):
        raise NotImplementedError

    def format(self, x) -> str:
        x = self.coerce(x)
        return str(x)

    def parse(self, s: str):
        s = s.strip()
        if "/" in s:
            a, b = s.split("/")
            return self.coerce(Fraction(int(a), int(b)))
        return self.coerce(int(s))

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))

    def __repr__(self):
        return self.tag


class Integers(CoeffRing):
    tag = "Z"

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise RingError(f"{x} is not an integer")
            return int(x)
        return int(x)

    def inv(self, x):
        x = self.coerce(x)
        if x in (1, -1):
            return x
        raise RingError(f"{x} is not a unit in Z")


class Rationals(CoeffRing):
    tag = "Q"

    def coerce(self, x):
        x = Fraction(x)
        return int(x) if x.denominator == 1 else x

    def inv(self, x):
        x = Fraction(x)
        if x == 0:
            raise RingError("division by zero")
        return self.coerce(1 / x)


class IntegersMod(CoeffRing):
    def __init__(self, m: int):
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = m

    @property
    def tag(self):
        return f"Zmod:{self.m}"

    def coerce(self, x):
        if isinstance(x, Fraction):
            return (x.numerator * self.inv(x.denominator)) % self.m
        return int(x) % self.m

    def inv(self, x):
        x = int(x) % self.m
        if gcd(x, self.m) != 1:
            raise RingError(f"{x} is not invertible mod {self.m}")
        return pow(x, -1, self.m)

    def format(self, x) -> str:
        return f"{self.coerce(x)} mod {self.m}"

    def parse(self, s: str):
        s = s.strip()
        if " mod " in s:
            a, m = s.split(" mod ")
            if int(m) != self.m:
                raise RingError(f"modulus mismatch: {m} vs {self.m}")
            s = a
        return super().parse(s)


class LocalRationals(CoeffRing):
    """Rationals whose denominators are prime to `p`."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def tag(self):
        return f"Zlocal:{self.p}"

    def coerce(self, x):
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise RingError(f"{x} is not {self.p}-local")
        return int(x) if x.denominator == 1 else x

    def inv(self, x):
        x = Fraction(x)
        if x.numerator % self.p == 0:
            raise RingError(f"{x} is not a unit in Z_({self.p})")
        return self.coerce(1 / x)


ZZ = Integers()
QQ = Rationals()


def ring_from_tag(tag: str) -> CoeffRing:
    tag = tag.strip()
    if tag == "Z":
        return ZZ
    if tag == "Q":
        return QQ
    if tag.startswith("Zmod:"):
        return IntegersMod(int(tag[5:]))
    if tag.startswith("Zlocal:"):
        return LocalRationals(int(tag[7:]))
    raise ValueError(f"unknown ring {tag!r}; expected Z, Q, Zmod:m or Zlocal:p")
