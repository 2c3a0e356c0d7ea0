"""Certified enclosures for logarithms and powers of two.

Built on MPFR directed rounding (via gmpy2): every bound returned here is
a true outer bound, so floors and comparisons derived from them are exact
whenever the enclosure excludes the relevant boundary.  Enclosures are
refined adaptively; an exact fast path handles the rational cases (powers
of two), which are precisely the cases where refinement could not
terminate.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional

import gmpy2
from gmpy2 import mpfr, mpq

DEFAULT_PREC = 96
MAX_PREC = 1 << 13

Interval = tuple[Fraction, Fraction]


class PrecisionExhaustedError(ArithmeticError):
    """The enclosure still straddles a boundary at the precision cap."""


def round_down(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown)


def round_up(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp)


def mpfr_to_fraction(x: mpfr) -> Fraction:
    m, e = x.as_mantissa_exp()
    m, e = int(m), int(e)
    if e >= 0:
        return Fraction(m << e)
    return Fraction(m, 1 << -e)


def fraction_to_mpq(f: Fraction) -> mpq:
    return mpq(f.numerator, f.denominator)


def log2_int_bounds(n: int, prec: int = DEFAULT_PREC) -> Interval:
    """Enclosure of log2(n) for an integer n >= 1; exact for powers of two."""
    if n < 1:
        raise ValueError("log2 bounds need n >= 1")
    if n & (n - 1) == 0:
        k = Fraction(n.bit_length() - 1)
        return (k, k)
    with round_down(prec):
        lo = gmpy2.log2(mpfr(n))
    with round_up(prec):
        hi = gmpy2.log2(mpfr(n))
    return (mpfr_to_fraction(lo), mpfr_to_fraction(hi))


def log2_fraction_bounds(q: Fraction, prec: int = DEFAULT_PREC) -> Interval:
    """Enclosure of log2(q) for a positive rational, via log2(num) - log2(den)."""
    if q <= 0:
        raise ValueError("log2 bounds need a positive argument")
    nlo, nhi = log2_int_bounds(q.numerator, prec)
    dlo, dhi = log2_int_bounds(q.denominator, prec)
    return (nlo - dhi, nhi - dlo)


def exp2_bounds(x: Fraction, prec: int = DEFAULT_PREC) -> Interval:
    """Enclosure of 2^x for rational x; exact when x is an integer."""
    if x.denominator == 1:
        e = x.numerator
        v = Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)
        return (v, v)
    q = fraction_to_mpq(x)
    with round_down(prec):
        lo = gmpy2.exp2(mpfr(q))
    with round_up(prec):
        hi = gmpy2.exp2(mpfr(q))
    return (mpfr_to_fraction(lo), mpfr_to_fraction(hi))


BoundsFn = Callable[[int], Interval]


def certified_floor(
    bounds_fn: BoundsFn,
    exact: Optional[Fraction] = None,
    start_prec: int = DEFAULT_PREC,
    max_prec: int = MAX_PREC,
) -> int:
    """Floor of a real given by enclosures, refined until unambiguous.

    ``exact`` short-circuits the refinement; it must be supplied whenever
    the underlying value can sit exactly on an integer, since no amount of
    refinement can separate an exact integer from its floor boundary.
    """
    if exact is not None:
        return math.floor(exact)
    prec = start_prec
    while prec <= max_prec:
        lo, hi = bounds_fn(prec)
        flo, fhi = math.floor(lo), math.floor(hi)
        if flo == fhi:
            return flo
        prec *= 2
    raise PrecisionExhaustedError(
        "floor remains ambiguous at maximum precision; "
        "the value may be an unrecognized exact integer"
    )


def certified_cmp(
    bounds_fn: BoundsFn,
    threshold: Fraction,
    exact: Optional[Fraction] = None,
    start_prec: int = DEFAULT_PREC,
    max_prec: int = MAX_PREC,
) -> int:
    """Certified sign of (value - threshold): -1, 0 or +1."""
    if exact is not None:
        return (exact > threshold) - (exact < threshold)
    prec = start_prec
    while prec <= max_prec:
        lo, hi = bounds_fn(prec)
        if hi < threshold:
            return -1
        if lo > threshold:
            return 1
        prec *= 2
    raise PrecisionExhaustedError(
        "comparison remains ambiguous at maximum precision; "
        "the value may equal the threshold exactly"
    )
