"""Exact dyadic rationals and bit-indexed prefixes of reals in [0, 1].

All values live in [0, 1] and all arithmetic is exact integer arithmetic;
no floating point is used anywhere in this module.  Bits of a real are
indexed from 1, so bit n carries weight 2^-n.  A dyadic value with two
binary expansions is always represented by the terminating one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class CarryOverflowError(ArithmeticError):
    """A carry propagated past bit 1, leaving [0, 1)."""


@dataclass(frozen=True, order=False)
class DyadicRational:
    """numerator / 2**scale, canonicalized so the numerator is odd or zero.

    Fixed-scale (non-canonical) views of the same value are the job of
    :class:`BitPrefix`; this class always keeps the minimal scale so that
    structural equality coincides with value equality.
    """

    numerator: int
    scale: int

    def __post_init__(self) -> None:
        num, sc = self.numerator, self.scale
        if num < 0 or sc < 0:
            raise ValueError("dyadic rationals here are nonnegative")
        if num == 0:
            sc = 0
        else:
            while num % 2 == 0 and sc > 0:
                num //= 2
                sc -= 1
        if num > (1 << sc):
            raise ValueError("value exceeds 1")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "scale", sc)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "DyadicRational":
        return cls(0, 0)

    @classmethod
    def one(cls) -> "DyadicRational":
        return cls(1, 0)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "DyadicRational":
        den = f.denominator
        if den & (den - 1):
            raise ValueError(f"{f} is not dyadic")
        return cls(f.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        """Parse the text form "num/2^scale" (or a bare integer)."""
        text = text.strip()
        if "/" not in text:
            return cls(int(text), 0)
        num, den = text.split("/", 1)
        if not den.startswith("2^"):
            raise ValueError(f"malformed dyadic literal: {text!r}")
        return cls(int(num), int(den[2:]))

    # -- accessors ---------------------------------------------------------

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.scale)

    def bit(self, n: int) -> int:
        """Bit n (n >= 1) of the terminating binary expansion."""
        if n < 1:
            raise ValueError("bit positions start at 1")
        return (self.numerator << n >> self.scale) & 1

    def text(self) -> str:
        return f"{self.numerator}/2^{self.scale}"

    def __str__(self) -> str:
        return self.text()

    # -- arithmetic (exact) ------------------------------------------------

    def __add__(self, other: "DyadicRational") -> "DyadicRational":
        sc = max(self.scale, other.scale)
        num = (self.numerator << (sc - self.scale)) + (
            other.numerator << (sc - other.scale)
        )
        if num > (1 << sc):
            raise CarryOverflowError("sum exceeds 1")
        return DyadicRational(num, sc)

    def __sub__(self, other: "DyadicRational") -> "DyadicRational":
        sc = max(self.scale, other.scale)
        num = (self.numerator << (sc - self.scale)) - (
            other.numerator << (sc - other.scale)
        )
        if num < 0:
            raise ValueError("difference is negative")
        return DyadicRational(num, sc)

    def _cmp_key(self, other: "DyadicRational") -> tuple[int, int]:
        sc = max(self.scale, other.scale)
        return (
            self.numerator << (sc - self.scale),
            other.numerator << (sc - other.scale),
        )

    def __lt__(self, other: "DyadicRational") -> bool:
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other: "DyadicRational") -> bool:
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other: "DyadicRational") -> bool:
        a, b = self._cmp_key(other)
        return a > b

    def __ge__(self, other: "DyadicRational") -> bool:
        a, b = self._cmp_key(other)
        return a >= b


def compare(x: DyadicRational, y: DyadicRational) -> int:
    """Exact trichotomy: -1 if x < y, 0 if equal, 1 if x > y."""
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


@dataclass(frozen=True)
class BitPrefix:
    """A finite initial segment of a binary expansion, bit 1 first."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @classmethod
    def from_string(cls, text: str) -> "BitPrefix":
        return cls(tuple(int(ch) for ch in text.strip()))

    @classmethod
    def zeros(cls, n: int) -> "BitPrefix":
        return cls((0,) * n)

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitPrefix":
        """Interpret ``value`` as ``length`` bits, bit 1 = most significant."""
        if value < 0 or value >> length:
            raise ValueError("value does not fit in the given length")
        return cls(tuple((value >> (length - i)) & 1 for i in range(1, length + 1)))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def bit_at(self, n: int) -> int:
        """Bit at 1-based position n."""
        if not 1 <= n <= len(self.bits):
            raise IndexError(f"bit position {n} out of range 1..{len(self.bits)}")
        return self.bits[n - 1]

    def as_int(self) -> int:
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v

    def take(self, k: int) -> "BitPrefix":
        if not 0 <= k <= len(self.bits):
            raise ValueError(f"cannot take {k} bits from {len(self.bits)}")
        return BitPrefix(self.bits[:k])

    def value(self) -> DyadicRational:
        return DyadicRational(self.as_int(), len(self.bits))


def prefix_of(x: DyadicRational, n: int) -> BitPrefix:
    """First n bits of the terminating binary expansion of x in [0, 1)."""
    if x >= DyadicRational.one():
        raise ValueError("prefix extraction requires x < 1")
    if n < 0:
        raise ValueError("prefix length must be nonnegative")
    return BitPrefix.from_int(x.numerator << n >> x.scale, n)


def add_pow2(p: BitPrefix, d: int) -> BitPrefix:
    """Add 2^-d to the value of p, at the same length, with exact carry.

    The carry must not leave the unit interval: a ripple past bit 1
    raises :class:`CarryOverflowError` ("carry out of range").
    """
    if not 1 <= d <= len(p):
        raise ValueError(f"position {d} out of range 1..{len(p)}")
    v = p.as_int() + (1 << (len(p) - d))
    if v >> len(p):
        raise CarryOverflowError("carry out of range")
    return BitPrefix.from_int(v, len(p))
