"""Oracle computation of one monotone-approximable real from another.

The operational form: to obtain bit n of the target, wait for the first
stage at which the oracle real's approximation agrees with the supplied
oracle prefix on its first floor(n + g(n)) bits, then read bit n of the
target's approximation at that stage.  The procedure reads exactly
floor(n + g(n)) oracle bits on every path; correctness can fail for
finitely many small n, which the threshold scan surfaces.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dyadic import BitPrefix, DyadicRational, prefix_of
from .machines import LeftCEApproximation
from .randomness import SolovayTest
from .series import RedundancyFunction


@dataclass(frozen=True)
class ReductionTrace:
    """Outcome and exact accounting of one oracle computation."""

    target_index: int
    oracle_bits_used: int
    stages_run: int
    answer: Optional[int]
    settled: bool


def build_solovay_test(
    alpha: LeftCEApproximation,
    omega: LeftCEApproximation,
    g: RedundancyFunction,
    max_stage: int,
) -> SolovayTest:
    """Strings recording the oracle prefix at target-approximation changes.

    At each stage s+1 <= max_stage, if some least n <= s has bit n of the
    target approximation changing between stages s and s+1, the first
    floor(n + g(n)) bits of the oracle approximation at stage s+1 are
    enumerated, indexed by s.
    """
    if max_stage < 1:
        raise ValueError("max_stage must be >= 1")
    entries = []
    prev = alpha.value_at(0)
    for s in range(0, max_stage):
        cur = alpha.value_at(s + 1)
        if cur != prev:
            n = _least_changed_bit(prev, cur, s)
            if n is not None:
                u = g.floor_eval(n)
                sigma = prefix_of(omega.value_at(s + 1), u)
                entries.append((s, str(sigma)))
        prev = cur
    return SolovayTest(tuple(entries))


def _least_changed_bit(
    a: DyadicRational, b: DyadicRational, max_index: int
) -> Optional[int]:
    for n in range(1, max_index + 1):
        if a.bit(n) != b.bit(n):
            return n
    return None


def solovay_weight(test: SolovayTest) -> Fraction:
    """Exact total weight sum of 2^-|sigma| over the test's members."""
    return test.weight()


def reduce(
    oracle: BitPrefix,
    alpha: LeftCEApproximation,
    omega: LeftCEApproximation,
    g: RedundancyFunction,
    n: int,
    max_stage: int,
) -> ReductionTrace:
    """Compute bit n of the target from an oracle prefix, never reading
    past floor(n + g(n)) oracle bits.

    Stages 0..max_stage are scanned for the first whose oracle
    approximation matches the permitted oracle bits; the answer is the
    target approximation's bit n at that stage.  An unmatched budget
    returns settled=False with no answer.
    """
    if n < 1:
        raise ValueError("target indices start at 1")
    use = g.floor_eval(n)
    if len(oracle) < use:
        raise ValueError(
            f"oracle too short: need {use} bits, have {len(oracle)}"
        )
    permitted = oracle.take(use)
    for s in range(0, max_stage + 1):
        if prefix_of(omega.value_at(s), use) == permitted:
            return ReductionTrace(
                target_index=n,
                oracle_bits_used=use,
                stages_run=s + 1,
                answer=alpha.value_at(s).bit(n),
                settled=True,
            )
    return ReductionTrace(
        target_index=n,
        oracle_bits_used=use,
        stages_run=max_stage + 1,
        answer=None,
        settled=False,
    )


def eventual_correctness_threshold(
    alpha: LeftCEApproximation,
    omega: LeftCEApproximation,
    g: RedundancyFunction,
    max_index: int,
    max_stage: int,
) -> int:
    """Least n0 such that the reduction agrees with the target's true bits
    on [n0, max_index], using the true oracle prefix; max_index + 1 when
    even the last index disagrees.
    """
    oracle = prefix_of(omega.limit, g.floor_eval(max_index))
    truth = alpha.limit
    last_bad = 0
    for n in range(1, max_index + 1):
        tr = reduce(oracle, alpha, omega, g, n, max_stage)
        if not tr.settled or tr.answer != truth.bit(n):
            last_bad = n
    return last_bad + 1


def trace_rows(
    traces: list[ReductionTrace], truth: Optional[DyadicRational] = None
) -> list[dict]:
    rows = []
    for tr in traces:
        row = {
            "n": tr.target_index,
            "use": tr.oracle_bits_used,
            "stages": tr.stages_run,
            "answer": "" if tr.answer is None else tr.answer,
            "settled": int(tr.settled),
            "correct": "",
        }
        if truth is not None and tr.answer is not None:
            row["correct"] = int(tr.answer == truth.bit(tr.target_index))
        rows.append(row)
    return rows


def traces_to_csv(
    traces: list[ReductionTrace], truth: Optional[DyadicRational] = None
) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf,
        fieldnames=["n", "use", "stages", "answer", "settled", "correct"],
        lineterminator="\n",
    )
    writer.writeheader()
    for row in trace_rows(traces, truth):
        writer.writerow(row)
    return buf.getvalue()
