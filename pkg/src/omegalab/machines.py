"""Finite prefix-free machine tables and their halting-mass approximations.

A machine is a finite set of (program, halt time) pairs whose programs
form a prefix-free code.  Its halting mass at stage s is the exact dyadic
sum of 2^-|p| over programs that have halted by s, which makes every
table a stage-indexed nondecreasing approximation with a known limit.
The known limit is test scaffolding: genuine monotone approximations do
not reveal it, and nothing in the construction code reads it.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .dyadic import DyadicRational


def check_prefix_free(programs: Iterable[str]) -> bool:
    """True iff no program is a proper prefix of another."""
    words = sorted(programs)
    for a, b in zip(words, words[1:]):
        if b.startswith(a):
            return False
    return True


@dataclass(frozen=True)
class MachineTable:
    """Entries (program bits, halt time), prefix-free with Kraft sum <= 1."""

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        seen = set()
        for prog, halt in self.entries:
            if not prog or any(ch not in "01" for ch in prog):
                raise ValueError(f"bad program {prog!r}")
            if halt < 1:
                raise ValueError("halt times start at 1")
            if prog in seen:
                raise ValueError(f"duplicate program {prog!r}")
            seen.add(prog)
        if not check_prefix_free(seen):
            raise ValueError("programs are not prefix-free")
        scale = max((len(p) for p in seen), default=0)
        if sum(1 << (scale - len(p)) for p in seen) > (1 << scale):
            raise ValueError("Kraft sum exceeds 1")

    @classmethod
    def parse(cls, text: str) -> "MachineTable":
        """One entry per line: "program-bits halt-time"; '#' starts a comment."""
        entries = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'program halt-time'")
            entries.append((parts[0], int(parts[1])))
        return cls(tuple(entries))

    @classmethod
    def load(cls, path) -> "MachineTable":
        with open(path, "r", encoding="ascii") as fh:
            return cls.parse(fh.read())

    def dump(self) -> str:
        return "".join(f"{p} {h}\n" for p, h in self.entries)

    def programs(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.entries)


def kraft_sum(m: MachineTable) -> DyadicRational:
    """Exact sum of 2^-|p| over all programs."""
    scale = max((len(p) for p, _ in m.entries), default=0)
    num = sum(1 << (scale - len(p)) for p, _ in m.entries)
    return DyadicRational(num, scale)


def omega_approx(m: MachineTable, s: int) -> DyadicRational:
    """Halting mass at stage s: sum of 2^-|p| over entries with halt time <= s."""
    scale = max((len(p) for p, _ in m.entries), default=0)
    num = sum(1 << (scale - len(p)) for p, h in m.entries if h <= s)
    return DyadicRational(num, scale)


@dataclass(frozen=True)
class LeftCEApproximation:
    """A stage-indexed nondecreasing dyadic sequence with its exact limit.

    The limit and stabilization stage exist because desk-scale machines
    are finite; they are harness-only fields for judging eventual
    correctness and never drive the constructions themselves.
    """

    stage_value: Callable[[int], DyadicRational]
    limit: DyadicRational
    stabilization_stage: int

    def value_at(self, s: int) -> DyadicRational:
        if s < 0:
            raise ValueError("stages start at 0")
        return self.stage_value(min(s, self.stabilization_stage))

    def is_monotone_up_to(self, max_stage: int) -> bool:
        prev = self.value_at(0)
        for s in range(1, max_stage + 1):
            cur = self.value_at(s)
            if cur < prev:
                return False
            prev = cur
        return True

    @classmethod
    def constant(cls, value: DyadicRational) -> "LeftCEApproximation":
        return cls(lambda s: value, value, 0)

    @classmethod
    def from_stage_list(
        cls, values: Sequence[DyadicRational]
    ) -> "LeftCEApproximation":
        vals = tuple(values)
        if not vals:
            raise ValueError("need at least the stage-0 value")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("stage values must be nondecreasing")
        return cls(lambda s: vals[min(s, len(vals) - 1)], vals[-1], len(vals) - 1)


def as_left_ce(m: MachineTable) -> LeftCEApproximation:
    """The halting-mass approximation of a machine table."""
    halts = sorted({h for _, h in m.entries})
    cum = [omega_approx(m, h) for h in halts]
    zero = DyadicRational.zero()

    def stage_value(s: int) -> DyadicRational:
        i = bisect.bisect_right(halts, s)
        return cum[i - 1] if i else zero

    stabilization = halts[-1] if halts else 0
    return LeftCEApproximation(stage_value, kraft_sum(m), stabilization)


def sum_left_ce(
    a: LeftCEApproximation, b: LeftCEApproximation
) -> LeftCEApproximation:
    """Pointwise sum; the limits must stay inside the unit interval."""
    if a.limit.as_fraction() + b.limit.as_fraction() >= 1:
        raise ValueError("sum of limits reaches 1")
    stab = max(a.stabilization_stage, b.stabilization_stage)
    return LeftCEApproximation(
        lambda s: a.value_at(s) + b.value_at(s), a.limit + b.limit, stab
    )


def random_machine_table(
    seed: int,
    *,
    max_depth: int = 12,
    split_prob: float = 0.62,
    keep_prob: float = 0.85,
    halt_min: int = 1,
    halt_max: int = 48,
) -> MachineTable:
    """Seed-deterministic random table.

    Programs are the kept leaves of a random binary tree (hence prefix-free
    with Kraft sum at most 1); at least one leaf is always dropped so the
    halting mass stays strictly below 1, and at least one is always kept.
    Halt times are uniform on [halt_min, halt_max].
    """
    if halt_min < 1 or halt_max < halt_min:
        raise ValueError("need 1 <= halt_min <= halt_max")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    rng = random.Random(seed)
    leaves: list[str] = []

    def grow(word: str) -> None:
        if len(word) < max_depth and (not word or rng.random() < split_prob):
            grow(word + "0")
            grow(word + "1")
        else:
            leaves.append(word)

    grow("")
    kept = [w for w in leaves if rng.random() < keep_prob]
    if len(kept) == len(leaves):
        kept.pop()
    if not kept:
        kept.append(leaves[0])
    entries = tuple((w, rng.randint(halt_min, halt_max)) for w in kept)
    return MachineTable(entries)
