"""The diagonal construction: perturb a real by marker-aligned increments.

Given marker positions t_k, a redundancy function g and a cutoff c, the
perturbed real adds 2^-d_k for every k > c, where d_k = t_k + floor(g(t_k)) + 1.
Around each marker live two intervals of positions:

  ones interval  I_k = [t_k, t_k + floor(g(t_k))]
  zero window    J_k = [t_k + floor(g(t_k)) + 2, t_{k+1} + floor(g(t_k)) + 1]

Whenever k is valid (k > c and the base real is all ones on I_k) and the
zero windows J_{k-1} through the last in-range window each contain a zero
of the base real, the carry arithmetic forces the equivalence

  base(d_k) = 1  iff  perturbed(t_k) = 0,

which is exactly what lets an oracle computation of the perturbed real
with redundancy g predict a fresh bit of the base real.  The exhaustive
checker verifies this over every base prefix of a given length.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .dyadic import BitPrefix, CarryOverflowError, DyadicRational
from .machines import LeftCEApproximation
from .randomness import PredictionRule
from .series import PartitionSequence, RedundancyFunction


@dataclass(frozen=True)
class DiagonalInstance:
    """A built perturbation with its interval layout and resolution mask."""

    omega: BitPrefix
    markers: PartitionSequence
    g: RedundancyFunction
    cutoff: int
    perturbed: BitPrefix
    resolved: tuple[bool, ...]
    increment_positions: tuple[tuple[int, int], ...]  # (k, d_k), in-range only

    def __len__(self) -> int:
        return len(self.omega)

    def floor_g_at(self, k: int) -> int:
        return self.g.floor_g(self.markers.t(k))

    def increment_position(self, k: int) -> int:
        """d_k = t_k + floor(g(t_k)) + 1."""
        return self.markers.t(k) + self.floor_g_at(k) + 1

    def ones_interval(self, k: int) -> tuple[int, int]:
        t = self.markers.t(k)
        return (t, t + self.floor_g_at(k))

    def zero_window(self, k: int) -> tuple[int, int]:
        t, fg = self.markers.t(k), self.floor_g_at(k)
        return (t + fg + 2, self.markers.t(k + 1) + fg + 1)

    def to_json_dict(self) -> dict:
        ks = sorted(
            k
            for k in range(1, len(self.markers) + 1)
            if self.markers.t(k) >= 1 and self.increment_position(k) <= len(self)
        )
        intervals = {}
        for k in ks:
            row = {"ones": list(self.ones_interval(k))}
            if k + 1 <= len(self.markers):
                row["window"] = list(self.zero_window(k))
            intervals[str(k)] = row
        return {
            "t": list(self.markers.values),
            "g": self.g.describe(),
            "c": self.cutoff,
            "d": {str(k): d for k, d in self.increment_positions},
            "intervals": intervals,
            "omega": str(self.omega),
            "perturbed": str(self.perturbed),
            "resolved": "".join("1" if r else "0" for r in self.resolved),
        }


def build_diagonal(
    omega: BitPrefix,
    markers: PartitionSequence,
    g: RedundancyFunction,
    cutoff: int,
) -> DiagonalInstance:
    """Add 2^-d_k for every k > cutoff with d_k inside the prefix.

    If the marker table extends past the prefix, the omitted tail is
    bounded by twice its first term and every bit a worst-case tail carry
    could flip is marked unresolved instead of guessed.  A table that ends
    inside the prefix is taken as complete (the sum is finite), so all
    bits resolve.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    length = len(omega)
    in_range: list[tuple[int, int]] = []
    first_out: Optional[int] = None
    prev_d = None
    for k in range(1, len(markers) + 1):
        d = markers.t(k) + g.floor_g(markers.t(k)) + 1
        if prev_d is not None and d <= prev_d:
            raise ValueError("increment positions must be strictly increasing")
        prev_d = d
        if k <= cutoff:
            continue
        if d <= length:
            in_range.append((k, d))
        elif first_out is None:
            first_out = d
    if not in_range:
        raise ValueError("no increment position falls inside the prefix")

    value = omega.as_int()
    for _, d in in_range:
        value += 1 << (length - d)
    if value >> length:
        raise CarryOverflowError("carry out of range")
    perturbed = BitPrefix.from_int(value, length)

    if first_out is None:
        resolved = (True,) * length
    else:
        # Any tail completion adds delta in [0, 2^-(first_out - 1)); bits
        # strictly above the deepest zero at or above position first_out - 1
        # cannot change.  Positions past the prefix scale are zeros.
        reach = first_out - 1
        if reach > length:
            q = reach  # a zero beyond the prefix absorbs the carry
        else:
            q = 0
            for p in range(reach, 0, -1):
                if perturbed.bit_at(p) == 0:
                    q = p
                    break
            if q == 0:
                raise ValueError("prefix too short: every bit is unresolved")
        resolved = tuple(p < q for p in range(1, length + 1))

    return DiagonalInstance(
        omega=omega,
        markers=markers,
        g=g,
        cutoff=cutoff,
        perturbed=perturbed,
        resolved=resolved,
        increment_positions=tuple(in_range),
    )


def interval_all_ones(
    x: BitPrefix, k: int, markers: PartitionSequence, g: RedundancyFunction
) -> bool:
    """True iff every bit of x inside the ones interval of marker k is 1."""
    t = markers.t(k)
    if t < 1:
        raise ValueError(f"marker {k} sits below position 1")
    lo, hi = t, t + g.floor_g(t)
    if hi > len(x):
        raise ValueError("ones interval out of range")
    return all(x.bit_at(p) == 1 for p in range(lo, hi + 1))


def window_has_zero(
    x: BitPrefix, k: int, markers: PartitionSequence, g: RedundancyFunction
) -> bool:
    """True iff some bit of x inside the zero window of marker k is 0."""
    t, fg = markers.t(k), g.floor_g(markers.t(k))
    lo, hi = t + fg + 2, markers.t(k + 1) + fg + 1
    if lo < 1 or hi > len(x):
        raise ValueError("zero window out of range")
    return any(x.bit_at(p) == 0 for p in range(lo, hi + 1))


@dataclass(frozen=True)
class EquivalenceVerdict:
    valid: bool
    conditions_met: bool
    equivalence_holds: Optional[bool]


def _condition_indices(
    markers: PartitionSequence, k: int, last_in_sum: int
) -> range:
    """Zero windows whose carries must be absorbed for the k-equivalence:
    J_{k-1} through J_{last_in_sum - 1}.  There is no window below the
    first marker, so the range is clipped at 1."""
    return range(max(k - 1, 1), last_in_sum)


def check_equivalence(inst: DiagonalInstance, k: int) -> EquivalenceVerdict:
    """Test base(d_k) = 1 iff perturbed(t_k) = 0 for one marker.

    valid means k > cutoff and the base real is all ones on the ones
    interval; the biconditional is only evaluated when additionally every
    required zero window contains a zero.  Layout problems (intervals
    outside the prefix, an increment landing on the next marker) and
    unresolved bits raise instead of mislabeling.
    """
    if k <= inst.cutoff:
        raise ValueError("k must exceed the cutoff")
    t_k = inst.markers.t(k)
    if t_k < 1:
        raise ValueError(f"marker {k} sits below position 1")
    d_k = inst.increment_position(k)
    if d_k > len(inst):
        raise ValueError("increment position out of range")
    last_in_sum = inst.increment_positions[-1][0]
    if k - 1 > inst.cutoff and inst.increment_position(k - 1) >= t_k:
        raise ValueError(
            "unsafe layout: previous increment reaches the marker position"
        )
    valid = interval_all_ones(inst.omega, k, inst.markers, inst.g)
    if not valid:
        return EquivalenceVerdict(False, False, None)
    conditions = all(
        window_has_zero(inst.omega, kp, inst.markers, inst.g)
        for kp in _condition_indices(inst.markers, k, last_in_sum)
    )
    if not conditions:
        return EquivalenceVerdict(True, False, None)
    if not inst.resolved[t_k - 1]:
        raise ValueError(f"bit {t_k} of the perturbed real is unresolved")
    equal = (inst.omega.bit_at(d_k) == 1) == (inst.perturbed.bit_at(t_k) == 0)
    return EquivalenceVerdict(True, True, equal)


@dataclass(frozen=True)
class ExhaustiveReport:
    length: int
    checkable_ks: tuple[int, ...]
    total: int
    overflow_skipped: int
    condition_skipped: int  # prefixes with a valid marker but a failed window
    qualifying: int
    evaluations: int
    counterexample: Optional[tuple[str, int]]

    def to_json_dict(self) -> dict:
        return {
            "length": self.length,
            "checkable_ks": list(self.checkable_ks),
            "total": self.total,
            "overflow_skipped": self.overflow_skipped,
            "condition_skipped": self.condition_skipped,
            "qualifying": self.qualifying,
            "evaluations": self.evaluations,
            "counterexample": (
                None
                if self.counterexample is None
                else {"omega": self.counterexample[0], "k": self.counterexample[1]}
            ),
        }


def exhaustive_equivalence(
    markers: PartitionSequence,
    g: RedundancyFunction,
    cutoff: int,
    length: int,
) -> ExhaustiveReport:
    """Run the equivalence check over every base prefix of the given length.

    Prefixes whose perturbation overflows the unit interval are skipped
    and counted, as are markers whose validity or zero-window conditions
    fail; the first counterexample (lowest prefix, then lowest k) is
    returned if one exists.
    """
    if not 1 <= length <= 24:
        raise ValueError("exhaustive search is capped at length 24")
    fg = {}
    d = {}
    for k in range(1, len(markers) + 1):
        fg[k] = g.floor_g(markers.t(k))
        d[k] = markers.t(k) + fg[k] + 1
    in_sum = [k for k in sorted(d) if k > cutoff and d[k] <= length]
    if not in_sum:
        raise ValueError("no increment position falls inside the prefix")
    last_in_sum = in_sum[-1]
    shift = sum(1 << (length - d[k]) for k in in_sum)

    outs = [d[k] for k in sorted(d) if k > cutoff and d[k] > length]
    tail_reach = (outs[0] - 1) if outs else 0
    # With the tail starting beyond length + 1, position length + 1 (a zero
    # past the prefix scale) absorbs any tail carry and all bits resolve.
    tail_blocks = bool(outs) and tail_reach <= length

    def window_mask(kp: int) -> Optional[int]:
        lo = markers.t(kp) + fg[kp] + 2
        if kp + 1 > len(markers):
            return None
        hi = markers.t(kp + 1) + fg[kp] + 1
        if lo < 1 or hi > length:
            return None
        m = 0
        for p in range(lo, hi + 1):
            m |= 1 << (length - p)
        return m

    checkable: list[tuple[int, int, list[int]]] = []  # (k, ones mask, window masks)
    for k in in_sum:
        t_k = markers.t(k)
        if t_k < 1:
            continue
        lo, hi = t_k, t_k + fg[k]
        if hi > length:
            continue
        if k - 1 > cutoff and d[k - 1] >= t_k:
            continue
        masks = []
        ok = True
        for kp in _condition_indices(markers, k, last_in_sum):
            m = window_mask(kp)
            if m is None:
                ok = False
                break
            masks.append(m)
        if not ok:
            continue
        ones = 0
        for p in range(lo, hi + 1):
            ones |= 1 << (length - p)
        checkable.append((k, ones, masks))
    if not checkable:
        raise ValueError("intervals overflow the prefix: nothing to check")

    overflow = 0
    condition_skipped = 0
    qualifying = 0
    evaluations = 0
    counterexample: Optional[tuple[str, int]] = None
    for base in range(1 << length):
        shifted = base + shift
        if shifted >> length:
            overflow += 1
            continue
        hit = False
        blocked = False
        for k, ones, masks in checkable:
            if base & ones != ones:
                continue
            if any(base & m == m for m in masks):  # some window is all ones
                blocked = True
                continue
            t_k = markers.t(k)
            if tail_blocks:
                # deepest zero at or above tail_reach must lie below t_k
                q = 0
                probe = shifted
                for p in range(tail_reach, 0, -1):
                    if not (probe >> (length - p)) & 1:
                        q = p
                        break
                if q == 0 or t_k >= q:
                    continue
            evaluations += 1
            hit = True
            base_bit = (base >> (length - d[k])) & 1
            pert_bit = (shifted >> (length - t_k)) & 1
            if (base_bit == 1) != (pert_bit == 0):
                if counterexample is None:
                    counterexample = (
                        str(BitPrefix.from_int(base, length)),
                        k,
                    )
        if hit:
            qualifying += 1
        elif blocked:
            condition_skipped += 1
    return ExhaustiveReport(
        length=length,
        checkable_ks=tuple(k for k, _, _ in checkable),
        total=1 << length,
        overflow_skipped=overflow,
        condition_skipped=condition_skipped,
        qualifying=qualifying,
        evaluations=evaluations,
        counterexample=counterexample,
    )


Reducer = Callable[[BitPrefix, int], int]


def derived_predictor(inst: DiagonalInstance, reducer: Reducer, k: int) -> int:
    """Predict base bit d_k from the first d_k - 1 base bits.

    The reducer computes bit t_k of the perturbed real from an oracle
    prefix of the base real; it is handed exactly floor(t_k + g(t_k)) =
    d_k - 1 bits, so reading further is structurally impossible.  The
    prediction is the negation dictated by the equivalence.
    """
    if k <= inst.cutoff:
        raise ValueError("k must exceed the cutoff")
    if not interval_all_ones(inst.omega, k, inst.markers, inst.g):
        raise ValueError(f"marker {k} is not valid for this base real")
    t_k = inst.markers.t(k)
    use = inst.g.floor_eval(t_k)
    if use != inst.increment_position(k) - 1:  # pragma: no cover - arithmetic identity
        raise AssertionError("use bound must equal d_k - 1")
    bit = reducer(inst.omega.take(use), t_k)
    if bit not in (0, 1):
        raise ValueError(f"reducer must return a bit, got {bit!r}")
    return 1 if bit == 0 else 0


def prediction_rule_for(inst: DiagonalInstance, reducer: Reducer) -> PredictionRule:
    """The partial rule that bets on base bit d_k at every valid marker.

    Defined on prefixes of length d_k - 1 whose ones interval is all ones
    (validity is checkable from those bits alone); undefined elsewhere.
    """
    by_next_pos: dict[int, int] = {}
    for k in range(1, len(inst.markers) + 1):
        if k <= inst.cutoff or inst.markers.t(k) < 1:
            continue
        d_k = inst.markers.t(k) + inst.g.floor_g(inst.markers.t(k)) + 1
        if d_k <= len(inst):
            by_next_pos[d_k] = k

    def fn(prefix: str) -> Optional[int]:
        k = by_next_pos.get(len(prefix) + 1)
        if k is None:
            return None
        x = BitPrefix.from_string(prefix) if prefix else BitPrefix(())
        t_k = inst.markers.t(k)
        hi = t_k + inst.g.floor_g(t_k)
        if any(x.bit_at(p) == 0 for p in range(t_k, hi + 1)):
            return None
        bit = reducer(x, t_k)
        return 1 if bit == 0 else 0

    return PredictionRule(fn)


def true_bit_reducer(inst: DiagonalInstance) -> Reducer:
    """A reducer answering with the instance's true perturbed bits.

    It honors the use bound by construction: it only consults the marker
    position, never the oracle argument beyond its length.
    """

    def fn(oracle: BitPrefix, n: int) -> int:
        if not inst.resolved[n - 1]:
            raise ValueError(f"bit {n} of the perturbed real is unresolved")
        return inst.perturbed.bit_at(n)

    return fn


def scan_cutoff(
    omega: BitPrefix, markers: PartitionSequence, g: RedundancyFunction
) -> int:
    """Least c such that every later in-range marker keeps the spacing
    condition and has a zero in its window, scanning the given prefix."""
    last_ok = 0
    ks = []
    for k in range(1, len(markers)):
        t, fg = markers.t(k), g.floor_g(markers.t(k))
        if t + fg + 2 < 1 or markers.t(k + 1) + fg + 1 > len(omega):
            break
        ks.append(k)
    for k in ks:
        gap = markers.t(k + 1) - markers.t(k)
        spacing = g.cmp_value(markers.t(k), Fraction(gap)) < 0
        if not (spacing and window_has_zero(omega, k, markers, g)):
            last_ok = k
    return last_ok + 1


def left_ce_terms(
    markers: PartitionSequence,
    g: RedundancyFunction,
    cutoff: int,
    max_scale: int,
) -> LeftCEApproximation:
    """The increment series as its own monotone approximation.

    Stage s carries the first s in-range increments; summed with a
    halting-mass approximation this exhibits the perturbed real as the
    limit of a nondecreasing dyadic sequence.
    """
    ds = []
    for k in range(1, len(markers) + 1):
        if k <= cutoff:
            continue
        d = markers.t(k) + g.floor_g(markers.t(k)) + 1
        if d <= max_scale:
            ds.append(d)
    values = [DyadicRational.zero()]
    acc = DyadicRational.zero()
    for d in ds:
        acc = acc + DyadicRational(1, d)
        values.append(acc)
    return LeftCEApproximation.from_stage_list(values)
