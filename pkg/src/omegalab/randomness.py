"""Solovay tests, block-pattern measures, martingales and zero-block scans.

Positions are 1-based everywhere, matching the bit indexing of the rest
of the package.  All measures and capitals are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .dyadic import BitPrefix
from .series import RedundancyFunction

BRUTE_FORCE_POSITION_CAP = 24


@dataclass(frozen=True)
class SolovayTest:
    """An indexed finite list of strings with exactly computable weight."""

    entries: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        for _, sigma in self.entries:
            if any(ch not in "01" for ch in sigma):
                raise ValueError(f"bad member {sigma!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def members(self) -> tuple[str, ...]:
        return tuple(sigma for _, sigma in self.entries)

    def weight(self) -> Fraction:
        return sum(
            (Fraction(1, 1 << len(sigma)) for _, sigma in self.entries),
            Fraction(0),
        )


def meets(x: Union[BitPrefix, str], sigma: str, positions: Sequence[int]) -> bool:
    """True iff x agrees with sigma along the sorted positions.

    Requires |sigma| = |positions| and every position within x.
    """
    bits = str(x)
    pos = sorted(positions)
    if len(sigma) != len(pos):
        raise ValueError("pattern length must equal the number of positions")
    if pos and (pos[0] < 1 or pos[-1] > len(bits)):
        raise ValueError("positions out of range")
    return all(bits[p - 1] == ch for p, ch in zip(pos, sigma))


@dataclass(frozen=True)
class BlockFamily:
    """Pairwise disjoint position sets, each with a pattern of equal length."""

    blocks: tuple[tuple[tuple[int, ...], str], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for positions, sigma in self.blocks:
            if not positions:
                raise ValueError("blocks must be nonempty")
            if list(positions) != sorted(set(positions)):
                raise ValueError("positions must be sorted and distinct")
            if positions[0] < 1:
                raise ValueError("positions start at 1")
            if len(sigma) != len(positions):
                raise ValueError("pattern length must match block size")
            if any(ch not in "01" for ch in sigma):
                raise ValueError(f"bad pattern {sigma!r}")
            if seen & set(positions):
                raise ValueError("blocks must be pairwise disjoint")
            seen.update(positions)

    def max_position(self) -> int:
        return max(p for positions, _ in self.blocks for p in positions)

    @classmethod
    def parse(cls, text: str) -> "BlockFamily":
        """Lines of the form "positions-comma-list ; sigma-bits"."""
        blocks = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                left, right = line.split(";")
                positions = tuple(int(p) for p in left.split(","))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
            blocks.append((positions, right.strip()))
        return cls(tuple(blocks))

    def dump(self) -> str:
        return "".join(
            f"{','.join(str(p) for p in positions)} ; {sigma}\n"
            for positions, sigma in self.blocks
        )


def exact_miss_measure(fam: BlockFamily) -> Fraction:
    """Measure of reals meeting none of the patterns: product of (1 - 2^-|B|).

    Disjointness makes the per-block events independent, so the measure
    does not depend on the patterns themselves.
    """
    result = Fraction(1)
    for positions, _ in fam.blocks:
        b = len(positions)
        result *= Fraction((1 << b) - 1, 1 << b)
    return result


def brute_force_miss_measure(fam: BlockFamily) -> Fraction:
    """The same measure by exhaustive count over all strings up to max position."""
    width = fam.max_position()
    if width > BRUTE_FORCE_POSITION_CAP:
        raise ValueError(
            f"brute force is capped at max position {BRUTE_FORCE_POSITION_CAP}"
        )
    strings = np.arange(1 << width, dtype=np.uint32)
    missing = np.ones(1 << width, dtype=bool)
    for positions, sigma in fam.blocks:
        mask = 0
        pattern = 0
        for p, ch in zip(positions, sigma):
            bit = 1 << (p - 1)
            mask |= bit
            if ch == "1":
                pattern |= bit
        missing &= (strings & np.uint32(mask)) != np.uint32(pattern)
    return Fraction(int(missing.sum()), 1 << width)


@dataclass(frozen=True)
class ProductSumRow:
    index: int
    exponent: int
    partial_product: Fraction
    partial_sum: Fraction


def product_sum_report(exponents: Sequence[int]) -> tuple[ProductSumRow, ...]:
    """Running product of (1 - 2^-b_i) next to the running sum of 2^-b_i.

    The product stays away from zero exactly when the sum stays bounded;
    the report exposes both so the dichotomy is visible at desk scale.
    """
    rows = []
    prod = Fraction(1)
    total = Fraction(0)
    for i, b in enumerate(exponents, start=1):
        if b < 1:
            raise ValueError("exponents must be positive")
        prod *= Fraction((1 << b) - 1, 1 << b)
        total += Fraction(1, 1 << b)
        rows.append(ProductSumRow(i, b, prod, total))
    return tuple(rows)


def random_block_family(
    seed: int,
    max_position: int = 20,
    max_blocks: int = 4,
    max_block_size: int = 4,
) -> BlockFamily:
    """A seed-deterministic family of disjoint blocks within [1, max_position]."""
    import random as _random

    rng = _random.Random(seed)
    width = rng.randint(2, max_position)
    pool = list(range(1, width + 1))
    rng.shuffle(pool)
    blocks = []
    idx = 0
    for _ in range(rng.randint(1, max_blocks)):
        if idx >= len(pool):
            break
        size = rng.randint(1, min(max_block_size, len(pool) - idx))
        positions = tuple(sorted(pool[idx : idx + size]))
        idx += size
        sigma = "".join(str(rng.randint(0, 1)) for _ in positions)
        blocks.append((positions, sigma))
    return BlockFamily(tuple(blocks))


# ---------------------------------------------------------------------------
# Prediction rules and martingales
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictionRule:
    """A partial map from prefixes to a predicted next bit."""

    fn: Callable[[str], Optional[int]]

    def predict(self, prefix: Union[BitPrefix, str]) -> Optional[int]:
        out = self.fn(str(prefix))
        if out not in (None, 0, 1):
            raise ValueError(f"prediction must be a bit or None, got {out!r}")
        return out

    @classmethod
    def never(cls) -> "PredictionRule":
        return cls(lambda _: None)

    @classmethod
    def always(cls, bit: int) -> "PredictionRule":
        return cls(lambda _: bit)

    @classmethod
    def from_map(cls, table: dict[str, int]) -> "PredictionRule":
        return cls(lambda prefix: table.get(prefix))


@dataclass(frozen=True)
class Martingale:
    """A betting capital on strings, stored extensionally to a depth bound."""

    values: dict[str, Fraction]
    depth: int

    def at(self, prefix: Union[BitPrefix, str]) -> Fraction:
        key = str(prefix)
        if len(key) > self.depth:
            raise ValueError(f"martingale depth {self.depth} exceeded")
        return self.values[key]

    def fairness_violations(self) -> tuple[str, ...]:
        """Internal nodes where values(s0) + values(s1) != 2 * values(s)."""
        bad = []
        for key, v in self.values.items():
            if len(key) >= self.depth:
                continue
            left, right = self.values[key + "0"], self.values[key + "1"]
            if left + right != 2 * v:
                bad.append(key)
        return tuple(sorted(bad))

    def expected_capital(self, n: int) -> Fraction:
        """Average capital over all strings of length n (fairness telescopes)."""
        if not 0 <= n <= self.depth:
            raise ValueError("length out of depth range")
        total = sum(
            (v for k, v in self.values.items() if len(k) == n), Fraction(0)
        )
        return total / (1 << n)


def from_prediction_rule(rule: PredictionRule, depth: int) -> Martingale:
    """The bet-everything strategy driven by a prediction rule.

    Where the rule predicts a bit, all capital moves to that extension;
    where it is undefined, capital splits evenly.  Fairness holds by
    construction, and a single wrong prediction zeroes the path.
    """
    values: dict[str, Fraction] = {"": Fraction(1)}
    frontier = [""]
    for _ in range(depth):
        nxt = []
        for key in frontier:
            capital = values[key]
            guess = rule.predict(key)
            if guess is None:
                values[key + "0"] = capital
                values[key + "1"] = capital
            else:
                values[key + str(guess)] = 2 * capital
                values[key + str(1 - guess)] = Fraction(0)
            nxt.extend((key + "0", key + "1"))
        frontier = nxt
    return Martingale(values=values, depth=depth)


def capital_along(f: Martingale, x: Union[BitPrefix, str]) -> list[Fraction]:
    """The capital sequence f(x|1), ..., f(x|n) along a prefix."""
    bits = str(x)
    if len(bits) > f.depth:
        raise ValueError(f"martingale depth {f.depth} exceeded")
    return [f.at(bits[:i]) for i in range(1, len(bits) + 1)]


# ---------------------------------------------------------------------------
# Zero-block scan
# ---------------------------------------------------------------------------


def zero_block_scan(x: BitPrefix, g: RedundancyFunction) -> list[int]:
    """Indices n with a run of floor(n + g(n)) zeros strictly between
    positions 2^n and 2^(n+1).

    Only n with 2^(n+1) <= len(x) are scanned, so every window lies inside
    the prefix.
    """
    out = []
    n = 1
    while (1 << (n + 1)) <= len(x):
        needed = g.floor_eval(n)
        run = 0
        best = 0
        for pos in range((1 << n) + 1, (1 << (n + 1))):
            if x.bit_at(pos) == 0:
                run += 1
                best = max(best, run)
            else:
                run = 0
        if best >= needed:
            out.append(n)
        n += 1
    return out
