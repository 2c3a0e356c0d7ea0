"""Redundancy functions, series diagnostics, partitions and marker bounds.

Conventions used throughout: logs are base 2 and log(0) = 0, so every
redundancy function evaluates to 0 at n = 0 and n = 1.  Floors of the
form floor(n + g(n)) drive oracle-use accounting, so they are computed
either on an exact integer path or through certified enclosures that are
refined until the floor is unambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Union

import gmpy2
from gmpy2 import mpfr, mpq

from .certified import (
    DEFAULT_PREC,
    MAX_PREC,
    Interval,
    PrecisionExhaustedError,
    certified_cmp,
    certified_floor,
    exp2_bounds,
    fraction_to_mpq,
    log2_fraction_bounds,
    log2_int_bounds,
    mpfr_to_fraction,
    round_down,
    round_up,
)

RationalLike = Union[int, Fraction]


def format_rational(x: RationalLike) -> str:
    """Exact text form: integers plain, dyadic as "p/2^q", otherwise "p/q"."""
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    den = f.denominator
    if den & (den - 1) == 0:
        return f"{f.numerator}/2^{den.bit_length() - 1}"
    return f"{f.numerator}/{f.denominator}"


def format_interval(iv: Interval) -> list[str]:
    return [format_rational(iv[0]), format_rational(iv[1])]


# ---------------------------------------------------------------------------
# Redundancy functions
# ---------------------------------------------------------------------------


class RedundancyFunction:
    """A nondecreasing g evaluated with certified floors.

    Subclasses provide exact values where they exist and enclosures
    elsewhere; the exact path is mandatory whenever g(n) can be rational,
    because enclosure refinement cannot separate an exact integer from a
    floor boundary.
    """

    kind: str = "abstract"

    def exact_value(self, n: int) -> Optional[Fraction]:
        raise NotImplementedError

    def bounds(self, n: int, prec: int = DEFAULT_PREC) -> Interval:
        raise NotImplementedError

    def floor_g(self, n: int) -> int:
        """Certified floor(g(n))."""
        return certified_floor(lambda p: self.bounds(n, p), self.exact_value(n))

    def floor_eval(self, n: int) -> int:
        """Certified floor(n + g(n)) for integer n >= 0."""
        if n < 0:
            raise ValueError("argument must be nonnegative")
        return n + self.floor_g(n)

    def cmp_value(self, n: int, threshold: Fraction) -> int:
        """Certified sign of g(n) - threshold."""
        return certified_cmp(
            lambda p: self.bounds(n, p), threshold, self.exact_value(n)
        )

    def pow2_neg_exact(self, n: int) -> Optional[Fraction]:
        """Exact value of 2^-g(n) when representable, else None."""
        v = self.exact_value(n)
        if v is None or v.denominator != 1:
            return None
        e = v.numerator
        return Fraction(1, 1 << e) if e >= 0 else Fraction(1 << -e)

    def pow2_neg_bounds(self, n: int, prec: int = DEFAULT_PREC) -> Interval:
        ex = self.pow2_neg_exact(n)
        if ex is not None:
            return (ex, ex)
        glo, ghi = self.bounds(n, prec)
        lo = exp2_bounds(-ghi, prec)[0]
        hi = exp2_bounds(-glo, prec)[1]
        return (lo, hi)

    def directed_term(self, n: int):
        """2^-g(n) as one correctly-rounded value under the ambient context.

        Only meaningful when a single MPFR operation (or an exact rational)
        yields the term; returns None when the slow dual-enclosure path is
        required.
        """
        ex = self.pow2_neg_exact(n)
        if ex is not None:
            return fraction_to_mpq(ex)
        return None

    def describe(self) -> dict:
        return {"kind": self.kind}


def _floor_scaled_log2(n: int, p: int, q: int) -> int:
    """floor((p/q) * log2(n)) for integers n >= 2, p >= 0, q >= 1, exactly.

    Uses the equivalence m <= (p/q) log2 n < m+1  iff  2^(m q) <= n^p <
    2^((m+1) q); all comparisons are integer comparisons.
    """
    np_ = n**p
    m = (np_.bit_length() - 1) // q
    while np_ >> ((m + 1) * q):
        m += 1
    # np_ >= 2^(m q) holds by choice of the starting point
    while np_ < (1 << (m * q)):  # pragma: no cover - defensive
        m -= 1
    return m


class LogRedundancy(RedundancyFunction):
    """g(n) = eps * log2(n) for rational eps >= 1 ("h_eps")."""

    kind = "h_eps"

    def __init__(self, eps: RationalLike):
        eps = Fraction(eps)
        if eps < 1:
            raise ValueError("epsilon below 1 unsupported")
        self.eps = eps

    def exact_value(self, n: int) -> Optional[Fraction]:
        if n <= 1:
            return Fraction(0)
        if n & (n - 1) == 0:
            return self.eps * (n.bit_length() - 1)
        return None

    def bounds(self, n: int, prec: int = DEFAULT_PREC) -> Interval:
        ex = self.exact_value(n)
        if ex is not None:
            return (ex, ex)
        lo, hi = log2_int_bounds(n, prec)
        return (self.eps * lo, self.eps * hi)

    def floor_g(self, n: int) -> int:
        if n <= 1:
            return 0
        return _floor_scaled_log2(n, self.eps.numerator, self.eps.denominator)

    def cmp_value(self, n: int, threshold: Fraction) -> int:
        if n <= 1:
            return (0 > threshold) - (0 < threshold)
        # (p/q) log2 n  vs  a/b   <=>   n^(p b)  vs  2^(a q)
        p, q = self.eps.numerator, self.eps.denominator
        a, b = threshold.numerator, threshold.denominator
        if a < 0:
            return 1
        lhs = n ** (p * b)
        rhs = 1 << (a * q)
        return (lhs > rhs) - (lhs < rhs)

    def pow2_neg_exact(self, n: int) -> Optional[Fraction]:
        if n == 0:
            return Fraction(1)
        if self.eps.denominator == 1:
            return Fraction(1, n ** self.eps.numerator)
        return super().pow2_neg_exact(n)

    def directed_term(self, n: int):
        if n >= 1 and self.eps.denominator == 1:
            return mpfr(n) ** (-self.eps.numerator)
        return super().directed_term(n)

    def describe(self) -> dict:
        return {"kind": self.kind, "eps": format_rational(self.eps)}


class LogLogRedundancy(RedundancyFunction):
    """g(n) = log2(n) + eps * log2(log2(n)) for rational eps >= 1 ("h_star_eps")."""

    kind = "h_star_eps"

    def __init__(self, eps: RationalLike):
        eps = Fraction(eps)
        if eps < 1:
            raise ValueError("epsilon below 1 unsupported")
        self.eps = eps

    def exact_value(self, n: int) -> Optional[Fraction]:
        if n <= 1:
            return Fraction(0)
        if n & (n - 1):
            return None
        k = n.bit_length() - 1
        if k & (k - 1) == 0:  # k is a power of two, log2(k) is an integer
            return Fraction(k) + self.eps * (k.bit_length() - 1)
        return None

    def bounds(self, n: int, prec: int = DEFAULT_PREC) -> Interval:
        ex = self.exact_value(n)
        if ex is not None:
            return (ex, ex)
        xlo, xhi = log2_int_bounds(n, prec)
        if xlo == xhi:  # n is a power of two, inner log of an exact integer
            llo, lhi = log2_int_bounds(int(xlo), prec)
        else:
            llo = log2_fraction_bounds(xlo, prec)[0]
            lhi = log2_fraction_bounds(xhi, prec)[1]
        return (xlo + self.eps * llo, xhi + self.eps * lhi)

    def describe(self) -> dict:
        return {"kind": self.kind, "eps": format_rational(self.eps)}


# Adversary staircase: m_j = 2^(2^j + j) positions per block, g = 2^j + j on
# block j.  Block 5 would span 2^37 positions, far past desk scale, so the
# staircase is capped at four blocks.
ADVERSARY_BLOCK_CAP = 4

_BLOCK_SIZES = {j: 1 << ((1 << j) + j) for j in range(1, ADVERSARY_BLOCK_CAP + 1)}
_BLOCK_STARTS: dict[int, int] = {}
_start = 1
for _j in range(1, ADVERSARY_BLOCK_CAP + 1):
    _BLOCK_STARTS[_j] = _start
    _start += _BLOCK_SIZES[_j]
ADVERSARY_DOMAIN_END = _start - 1


def adversarial_block(j: int) -> range:
    """Positions forming block j (inclusive bounds, 1-based)."""
    if j < 1:
        raise ValueError("block index must be >= 1")
    if j > ADVERSARY_BLOCK_CAP:
        raise ValueError("block too large")
    s = _BLOCK_STARTS[j]
    return range(s, s + _BLOCK_SIZES[j])


def adversarial_g(n: int) -> int:
    """Staircase value log2(m_j) = 2^j + j on block j."""
    if n < 1:
        raise ValueError("positions start at 1")
    for j in range(1, ADVERSARY_BLOCK_CAP + 1):
        if n < _BLOCK_STARTS[j] + _BLOCK_SIZES[j]:
            return (1 << j) + j
    raise ValueError("block too large")


class BlockStairRedundancy(RedundancyFunction):
    """The adversary staircase as a redundancy function ("adversarial")."""

    kind = "adversarial"

    def exact_value(self, n: int) -> Optional[Fraction]:
        if n == 0:
            return Fraction(0)
        return Fraction(adversarial_g(n))

    def bounds(self, n: int, prec: int = DEFAULT_PREC) -> Interval:
        v = self.exact_value(n)
        return (v, v)

    def floor_g(self, n: int) -> int:
        return int(self.exact_value(n))


class TableRedundancy(RedundancyFunction):
    """g given by an explicit table of rational values on 1..len(table)."""

    kind = "table"

    def __init__(self, values: Sequence[RationalLike]):
        vals = tuple(Fraction(v) for v in values)
        if not vals:
            raise ValueError("table must be nonempty")
        if any(v < 0 for v in vals):
            raise ValueError("table values must be nonnegative")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("table is not nondecreasing")
        self.values = vals

    def exact_value(self, n: int) -> Optional[Fraction]:
        if n == 0:
            return Fraction(0)
        if not 1 <= n <= len(self.values):
            raise ValueError(f"table domain is 1..{len(self.values)}")
        return self.values[n - 1]

    def bounds(self, n: int, prec: int = DEFAULT_PREC) -> Interval:
        v = self.exact_value(n)
        return (v, v)

    def floor_g(self, n: int) -> int:
        return math.floor(self.exact_value(n))

    def describe(self) -> dict:
        return {"kind": self.kind, "length": len(self.values)}


def make_redundancy(
    kind: str,
    eps: Optional[RationalLike] = None,
    table: Optional[Sequence[RationalLike]] = None,
) -> RedundancyFunction:
    """Factory for the CLI kind tokens."""
    if kind == "log":
        return LogRedundancy(1)
    if kind == "h_eps":
        if eps is None:
            raise ValueError("h_eps requires --eps")
        return LogRedundancy(eps)
    if kind == "h_star_eps":
        if eps is None:
            raise ValueError("h_star_eps requires --eps")
        return LogLogRedundancy(eps)
    if kind == "adversarial":
        return BlockStairRedundancy()
    if kind == "table":
        if table is None:
            raise ValueError("table kind requires values")
        return TableRedundancy(table)
    raise ValueError(f"unknown redundancy kind {kind!r}")


def h_eval(g: RedundancyFunction, n: int, prec: int = DEFAULT_PREC) -> Interval:
    """Certified enclosure of g(n)."""
    return g.bounds(n, prec)


# ---------------------------------------------------------------------------
# Partial sums and the condensation test
# ---------------------------------------------------------------------------


def partial_sum(
    g: RedundancyFunction, upper: int, prec: int = DEFAULT_PREC
) -> Interval:
    """Certified enclosure of sum_{n=1}^{upper} 2^-g(n)."""
    if upper < 1:
        raise ValueError("upper limit must be >= 1")
    probes = {1, min(2, upper), upper}
    fast = all(g.directed_term(n) is not None for n in probes)
    if fast:
        with round_down(prec):
            lo = mpfr(0)
            for n in range(1, upper + 1):
                lo += g.directed_term(n)
        with round_up(prec):
            hi = mpfr(0)
            for n in range(1, upper + 1):
                hi += g.directed_term(n)
        return (mpfr_to_fraction(lo), mpfr_to_fraction(hi))
    lo = mpfr(0)
    hi = mpfr(0)
    for n in range(1, upper + 1):
        blo, bhi = g.pow2_neg_bounds(n, prec)
        with round_down(prec):
            lo += fraction_to_mpq(blo)
        with round_up(prec):
            hi += fraction_to_mpq(bhi)
    return (mpfr_to_fraction(lo), mpfr_to_fraction(hi))


def partial_sum_exact(g: RedundancyFunction, upper: int) -> Fraction:
    """Exact sum_{n=1}^{upper} 2^-g(n); raises if any term is irrational."""
    total = Fraction(0)
    for n in range(1, upper + 1):
        term = g.pow2_neg_exact(n)
        if term is None:
            raise ValueError(f"2^-g({n}) is not exactly representable")
        total += term
    return total


def basel_upper_bound(terms: int = 1000) -> Fraction:
    """Exact rational upper bound on sum_{n>=1} n^-2 (partial sum + tail integral)."""
    partial = sum(Fraction(1, n * n) for n in range(1, terms + 1))
    return partial + Fraction(1, terms)


class DecayTable:
    """A nonincreasing term table f(n) with exact rational values."""

    name = "abstract"
    provably_nonincreasing = False

    def value(self, n: int) -> Fraction:
        raise NotImplementedError

    def directed_term(self, n: int):
        """f(n) under the ambient rounding; override for cheap exact forms."""
        return fraction_to_mpq(self.value(n))

    def domain_size(self) -> Optional[int]:
        return None


class InverseTable(DecayTable):
    """f(n) = 1/n."""

    name = "inverse"
    provably_nonincreasing = True

    def value(self, n: int) -> Fraction:
        return Fraction(1, n)

    def directed_term(self, n: int):
        return 1 / mpfr(n)


class GeometricTable(DecayTable):
    """f(n) = 2^-n."""

    name = "geometric"
    provably_nonincreasing = True

    def value(self, n: int) -> Fraction:
        return Fraction(1, 1 << n)

    def directed_term(self, n: int):
        return gmpy2.exp2(-n)


class ConstantTable(DecayTable):
    """f(n) = c."""

    name = "constant"
    provably_nonincreasing = True

    def __init__(self, c: RationalLike = 1):
        self.c = Fraction(c)
        if self.c < 0:
            raise ValueError("constant must be nonnegative")

    def value(self, n: int) -> Fraction:
        return self.c

    def directed_term(self, n: int):
        return fraction_to_mpq(self.c)


class ExplicitTable(DecayTable):
    """f given by an explicit finite list, validated nonincreasing."""

    name = "explicit"

    def __init__(self, values: Sequence[RationalLike]):
        vals = tuple(Fraction(v) for v in values)
        if any(v < 0 for v in vals):
            raise ValueError("table values must be nonnegative")
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ValueError("table is not nonincreasing")
        self.values = vals

    def value(self, n: int) -> Fraction:
        if not 1 <= n <= len(self.values):
            raise ValueError(f"table domain is 1..{len(self.values)}")
        return self.values[n - 1]

    def domain_size(self) -> Optional[int]:
        return len(self.values)


def make_decay_table(name: str) -> DecayTable:
    tables = {
        "inverse": InverseTable,
        "geometric": GeometricTable,
        "one": ConstantTable,
    }
    if name not in tables:
        raise ValueError(f"unknown table {name!r}")
    return tables[name]()


@dataclass(frozen=True)
class CondensationReport:
    """Direct and condensed partial sums for the condensation criterion."""

    upper: int
    direct_checkpoints: tuple[tuple[int, Interval], ...]
    direct_sum: Interval
    condensed_partials: tuple[Fraction, ...]

    @property
    def condensed_sum(self) -> Fraction:
        return self.condensed_partials[-1]

    def to_json_dict(self) -> dict:
        return {
            "upper": self.upper,
            "direct_checkpoints": [
                [n, format_interval(iv)] for n, iv in self.direct_checkpoints
            ],
            "direct_sum": format_interval(self.direct_sum),
            "condensed_partials": [
                format_rational(v) for v in self.condensed_partials
            ],
        }


def condensation_compare(
    f: DecayTable, upper: int, prec: int = DEFAULT_PREC
) -> CondensationReport:
    """Partial sums of sum f(n) next to the condensed sum 2^k f(2^k).

    The table must be nonincreasing on [1, upper]; explicit tables are
    scanned, the built-in tables are nonincreasing by construction.
    """
    if upper < 1:
        raise ValueError("upper limit must be >= 1")
    size = f.domain_size()
    if size is not None and size < upper:
        raise ValueError(f"table covers only 1..{size}")
    if not f.provably_nonincreasing:
        prev = f.value(1)
        for n in range(2, upper + 1):
            cur = f.value(n)
            if cur > prev:
                raise ValueError(f"table increases at n={n}")
            prev = cur

    marks = []
    p = 1
    while p <= upper:
        marks.append(p)
        p *= 2
    if marks[-1] != upper:
        marks.append(upper)

    def run(ctx) -> list[Fraction]:
        out = []
        with ctx:
            acc = mpfr(0)
            mark_iter = iter(marks)
            mark = next(mark_iter)
            for n in range(1, upper + 1):
                acc += f.directed_term(n)
                if n == mark:
                    out.append(mpfr_to_fraction(acc))
                    mark = next(mark_iter, None)
        return out

    lows = run(round_down(prec))
    highs = run(round_up(prec))
    checkpoints = tuple(
        (n, (lo, hi)) for n, lo, hi in zip(marks, lows, highs)
    )

    condensed: list[Fraction] = []
    acc = Fraction(0)
    k = 0
    while (1 << k) <= upper:
        acc += (1 << k) * f.value(1 << k)
        condensed.append(acc)
        k += 1
    return CondensationReport(
        upper=upper,
        direct_checkpoints=checkpoints,
        direct_sum=checkpoints[-1][1],
        condensed_partials=tuple(condensed),
    )


# ---------------------------------------------------------------------------
# Partition sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionSequence:
    """A strictly increasing sequence of marker positions, indexed from 1."""

    values: tuple[int, ...]
    provenance: str = "user"

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("partition must be nonempty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("partition must be strictly increasing")
        if self.values[0] < 0:
            raise ValueError("positions must be nonnegative")

    def __len__(self) -> int:
        return len(self.values)

    def t(self, i: int) -> int:
        """Marker position t_i, 1-based."""
        if not 1 <= i <= len(self.values):
            raise IndexError(f"index {i} out of range 1..{len(self.values)}")
        return self.values[i - 1]

    def first_positive_index(self) -> int:
        """Least i with t_i >= 1; entries below position 1 are scaffolding."""
        for i, v in enumerate(self.values, start=1):
            if v >= 1:
                return i
        raise ValueError("partition has no positive positions")


def loglog_partition(kmax: int, start_prec: int = DEFAULT_PREC) -> PartitionSequence:
    """Markers t_k = floor(sum_{i<=k} (log i + 2 log log i)).

    The partial sums are accumulated as certified enclosures and floored
    only when the enclosure excludes an integer boundary; the whole build
    retries at doubled precision otherwise.  The first two partial sums
    (0 and 1) are exact, and every later one carries irrational log terms,
    so the refinement terminates.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    prec = start_prec
    while prec <= MAX_PREC:
        vals = _loglog_attempt(kmax, prec)
        if vals is not None:
            return PartitionSequence(vals, provenance="loglog")
        prec *= 2
    raise PrecisionExhaustedError("partition floors stay ambiguous at the cap")


def _loglog_attempt(kmax: int, prec: int) -> Optional[tuple[int, ...]]:
    ctx_lo, ctx_hi = round_down(prec), round_up(prec)
    acc_lo = mpfr(0)
    acc_hi = mpfr(0)
    out = []
    for i in range(1, kmax + 1):
        if i == 1:
            t_lo = t_hi = mpfr(0)
        elif i == 2:
            t_lo = t_hi = mpfr(1)
        else:
            with ctx_lo:
                x = gmpy2.log2(mpfr(i))
                t_lo = x + 2 * gmpy2.log2(x)
            with ctx_hi:
                x = gmpy2.log2(mpfr(i))
                t_hi = x + 2 * gmpy2.log2(x)
        with ctx_lo:
            acc_lo += t_lo
        with ctx_hi:
            acc_hi += t_hi
        f_lo = int(gmpy2.floor(acc_lo))
        f_hi = int(gmpy2.floor(acc_hi))
        if f_lo != f_hi:
            return None
        out.append(f_lo)
    return tuple(out)


@dataclass(frozen=True)
class PartitionReport:
    """Spacing-condition and series diagnostics for a partition."""

    upper_index: int
    start_index: int
    k0: Optional[int]
    condition_violations: tuple[int, ...]
    conv_partial: Fraction
    div_partial: Interval

    def to_json_dict(self) -> dict:
        return {
            "upper_index": self.upper_index,
            "start_index": self.start_index,
            "k0": self.k0,
            "violation_count": len(self.condition_violations),
            "first_violations": list(self.condition_violations[:16]),
            "conv_partial": format_rational(self.conv_partial),
            "div_partial": format_interval(self.div_partial),
        }


def verify_partition(
    t: PartitionSequence,
    g: RedundancyFunction,
    upper_index: int,
    prec: int = DEFAULT_PREC,
) -> PartitionReport:
    """Check t_i + g(t_i) < t_{i+1} and report both series' partial sums.

    Sums run over start..upper_index where start is the first index with
    t_i >= 1; upper_index+1 entries of t are required since both the gap
    condition and the convergent series look one marker ahead.
    """
    if len(t) < upper_index + 1:
        raise ValueError("partition too short for the requested range")
    start = t.first_positive_index()
    if upper_index < start:
        raise ValueError("upper index precedes the first positive marker")

    violations = []
    for i in range(start, upper_index + 1):
        gap = t.t(i + 1) - t.t(i)
        if g.cmp_value(t.t(i), Fraction(gap)) >= 0:
            violations.append(i)
    if violations:
        k0: Optional[int] = violations[-1] + 1
        if k0 > upper_index:
            k0 = None
    else:
        k0 = start

    conv = Fraction(0)
    for i in range(start, upper_index + 1):
        conv += Fraction(1, 1 << (t.t(i + 1) - t.t(i)))

    fast = all(
        g.directed_term(t.t(i)) is not None
        for i in range(start, min(start + 3, upper_index + 1))
    )
    if fast:
        with round_down(prec):
            lo = mpfr(0)
            for i in range(start, upper_index + 1):
                lo += g.directed_term(t.t(i))
        with round_up(prec):
            hi = mpfr(0)
            for i in range(start, upper_index + 1):
                hi += g.directed_term(t.t(i))
        div = (mpfr_to_fraction(lo), mpfr_to_fraction(hi))
    else:
        lo = mpfr(0)
        hi = mpfr(0)
        for i in range(start, upper_index + 1):
            blo, bhi = g.pow2_neg_bounds(t.t(i), prec)
            with round_down(prec):
                lo += fraction_to_mpq(blo)
            with round_up(prec):
                hi += fraction_to_mpq(bhi)
        div = (mpfr_to_fraction(lo), mpfr_to_fraction(hi))

    return PartitionReport(
        upper_index=upper_index,
        start_index=start,
        k0=k0,
        condition_violations=tuple(violations),
        conv_partial=conv,
        div_partial=div,
    )


# ---------------------------------------------------------------------------
# Adversary analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdversaryBlockRow:
    block: int
    marker_count: int
    density_threshold: Fraction
    in_dense_set: bool
    block_sum: Fraction
    closed: bool  # every counted marker has a successor in the partition
    counterexample: bool

    def to_json_dict(self) -> dict:
        return {
            "block": self.block,
            "marker_count": self.marker_count,
            "density_threshold": format_rational(self.density_threshold),
            "in_dense_set": self.in_dense_set,
            "block_sum": format_rational(self.block_sum),
            "closed": self.closed,
            "counterexample": self.counterexample,
        }


@dataclass(frozen=True)
class AdversaryReport:
    rows: tuple[AdversaryBlockRow, ...]

    @property
    def counterexamples(self) -> tuple[int, ...]:
        return tuple(r.block for r in self.rows if r.counterexample)

    def to_json_dict(self) -> dict:
        return {
            "rows": [r.to_json_dict() for r in self.rows],
            "counterexamples": list(self.counterexamples),
        }


def adversary_analyze(t: PartitionSequence, jmax: int) -> AdversaryReport:
    """Marker density and gap sums of t against the staircase blocks.

    A block j with more than |I_j| * 2^-j markers belongs to the dense
    set; for those blocks the exact sum of 2^(t_i - t_{i+1}) over markers
    inside the block must reach 1/4, and any dense block below that bound
    is flagged as a counterexample (which must never occur).
    """
    if not 1 <= jmax <= ADVERSARY_BLOCK_CAP:
        raise ValueError(f"jmax must be in 1..{ADVERSARY_BLOCK_CAP}")
    rows = []
    for j in range(1, jmax + 1):
        block = adversarial_block(j)
        idx = [
            i
            for i in range(1, len(t) + 1)
            if block.start <= t.t(i) < block.stop
        ]
        threshold = Fraction(_BLOCK_SIZES[j], 1 << j)
        in_dense = len(idx) > threshold
        total = Fraction(0)
        closed = True
        for i in idx:
            if i + 1 > len(t):
                closed = False
                continue
            total += Fraction(1, 1 << (t.t(i + 1) - t.t(i)))
        rows.append(
            AdversaryBlockRow(
                block=j,
                marker_count=len(idx),
                density_threshold=threshold,
                in_dense_set=in_dense,
                block_sum=total,
                closed=closed,
                counterexample=in_dense and total < Fraction(1, 4),
            )
        )
    return AdversaryReport(rows=tuple(rows))


def adversary_unit_partition(jmax: int) -> PartitionSequence:
    """Markers on every staircase position through block jmax, plus one
    closing marker so each in-block marker has a successor."""
    end = adversarial_block(jmax).stop - 1
    return PartitionSequence(tuple(range(1, end + 2)), provenance="unit-gaps")


def adversary_even_partition(jmax: int) -> PartitionSequence:
    """Per block, one more marker than the density threshold, evenly spaced.

    This is the adversary's cheapest layout that still lands in the dense
    set, which is where the per-block gap sums are tightest.
    """
    values: list[int] = []
    for j in range(1, jmax + 1):
        block = adversarial_block(j)
        count = _BLOCK_SIZES[j] // (1 << j) + 1
        span = _BLOCK_SIZES[j] - 1
        marks = sorted({block.start + (i * span) // (count - 1) for i in range(count)})
        values.extend(marks)
    values.append(adversarial_block(jmax).stop)
    return PartitionSequence(tuple(values), provenance="even")


def adversary_random_partition(
    seed: int, jmax: int, density_scale: int = 2
) -> PartitionSequence:
    """Seed-deterministic markers, block j sampled at about density_scale * 2^-j."""
    import random as _random

    rng = _random.Random(seed)
    values: list[int] = []
    for j in range(1, jmax + 1):
        p = min(1.0, density_scale / (1 << j))
        values.extend(n for n in adversarial_block(j) if rng.random() < p)
    values.append(adversarial_block(jmax).stop)
    return PartitionSequence(tuple(values), provenance="random")


def make_adversary_partition(
    kind: str, jmax: int, seed: int = 0
) -> PartitionSequence:
    if kind == "unit-gaps":
        return adversary_unit_partition(jmax)
    if kind == "even":
        return adversary_even_partition(jmax)
    if kind == "random":
        return adversary_random_partition(seed, jmax)
    raise ValueError(f"unknown adversary partition kind {kind!r}")


# ---------------------------------------------------------------------------
# Marker minimization
# ---------------------------------------------------------------------------

BRUTE_FORCE_SPAN_CAP = 24


def min_marker_sum(m: int, k: int) -> Fraction:
    """Minimum of sum 2^-a_i over compositions of m into k positive parts.

    Closed form: with r = m mod k, the minimum uses r parts of size
    ceil(m/k) and k - r parts of size floor(m/k).
    """
    if not m >= k >= 1:
        raise ValueError("need m >= k >= 1: no composition exists otherwise")
    q, r = divmod(m, k)
    total = r * Fraction(1, 1 << (q + 1)) + (k - r) * Fraction(1, 1 << q)
    return total


def brute_force_min(m: int, k: int) -> Fraction:
    """The same minimum by literal enumeration of all compositions."""
    if not m >= k >= 1:
        raise ValueError("need m >= k >= 1: no composition exists otherwise")
    if m > BRUTE_FORCE_SPAN_CAP:
        raise ValueError(f"brute force is capped at m <= {BRUTE_FORCE_SPAN_CAP}")
    if k == 1:
        return Fraction(1, 1 << m)
    # weights as integer numerators over 2^m; pw[a] = 2^(m-a)
    pw = [1 << (m - a) for a in range(m + 1)]
    best = None
    for cuts in combinations(range(1, m), k - 1):
        prev = 0
        w = 0
        for c in cuts:
            w += pw[c - prev]
            prev = c
        w += pw[m - prev]
        if best is None or w < best:
            best = w
    return Fraction(best, 1 << m)


def marker_lower_bounds(
    m: int, k: int, prec: int = DEFAULT_PREC
) -> tuple[Fraction, Interval]:
    """The chain bounds k * 2^-ceil(m/k) and k * 2^(-m/k - 1).

    The first is exact; the second is certified (it is irrational unless
    k divides m).
    """
    if not m >= k >= 1:
        raise ValueError("need m >= k >= 1")
    first = Fraction(k, 1 << -(-m // k))
    exponent = -Fraction(m + k, k)
    lo, hi = exp2_bounds(exponent, prec)
    return first, (k * lo, k * hi)


def marker_chain_holds(m: int, k: int, prec: int = DEFAULT_PREC) -> bool:
    """Certified check of min >= k 2^-ceil(m/k) >= k 2^(-m/k - 1)."""
    mv = min_marker_sum(m, k)
    first, second = marker_lower_bounds(m, k, prec)
    if mv < first:
        return False
    while prec <= MAX_PREC:
        lo, hi = second
        if first >= hi:
            return True
        if first < lo:
            return False
        prec *= 2
        _, second = marker_lower_bounds(m, k, prec)
    raise PrecisionExhaustedError("bound comparison stays ambiguous")
