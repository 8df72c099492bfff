"""Shared and private randomness as explicit values.

Shared draws are either an explicit ``l``-bit integer ``h`` or a continuous
unit-interval value (the unbounded limit).  Seed streams are numpy
``Generator`` objects built from a 64-bit seed through ``SeedSequence``
(PCG64), which is deterministic and splittable; shards derive their own
streams with :func:`spawn_rng`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BITS = 62


@dataclass(frozen=True)
class SharedDraw:
    """A shared random value: ``bits`` explicit bits or a continuous draw.

    ``bits is None`` marks the continuous case, where ``value`` is a float in
    [0, 1).  Otherwise ``value`` is an integer in [0, 2**bits).
    """

    bits: int | None
    value: int | float

    def __post_init__(self):
        if self.bits is None:
            if not 0.0 <= self.value < 1.0:
                raise ValueError(f"continuous draw must be in [0, 1): {self.value}")
        else:
            if not 0 <= self.bits <= MAX_BITS:
                raise ValueError(f"bit count out of range [0, {MAX_BITS}]: {self.bits}")
            if not 0 <= int(self.value) < (1 << self.bits):
                raise ValueError(
                    f"value {self.value} does not fit in {self.bits} bits"
                )

    @classmethod
    def from_bits(cls, bits: int, value: int) -> "SharedDraw":
        return cls(bits=bits, value=int(value))

    @classmethod
    def continuous(cls, value: float) -> "SharedDraw":
        return cls(bits=None, value=float(value))

    @property
    def is_continuous(self) -> bool:
        return self.bits is None


@dataclass(frozen=True)
class PrivateDraw:
    """Sender-only uniform value in [0, 1)."""

    r: float

    def __post_init__(self):
        if not 0.0 <= self.r < 1.0:
            raise ValueError(f"private draw must be in [0, 1): {self.r}")


@dataclass(frozen=True)
class BudgetSplit:
    """A shared draw split into a selector and the remaining low bits."""

    selector_bits: int
    selector_value: int
    remainder: SharedDraw


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic seed stream from a 64-bit integer seed."""
    return np.random.default_rng(np.random.SeedSequence(seed))


def spawn_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for shard ``index`` of master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence((seed, index)))


def draw_shared(bits: int, rng: np.random.Generator) -> SharedDraw:
    """Uniform draw of ``bits`` shared bits from the seed stream."""
    if not 0 <= bits <= MAX_BITS:
        raise ValueError(f"bit count out of range [0, {MAX_BITS}]: {bits}")
    if bits == 0:
        return SharedDraw.from_bits(0, 0)
    return SharedDraw.from_bits(bits, int(rng.integers(0, 1 << bits)))


def draw_continuous(rng: np.random.Generator) -> SharedDraw:
    return SharedDraw.continuous(float(rng.random()))


def draw_private(rng: np.random.Generator) -> PrivateDraw:
    return PrivateDraw(float(rng.random()))


def split_budget(d: SharedDraw, selector_bits: int) -> BudgetSplit:
    """Split a bit draw into its top ``selector_bits`` and the low remainder.

    Selector bits come from the most-significant end; enumerating all values
    of ``h`` yields each (selector, remainder) pair exactly once, so the two
    parts are independent uniform values.
    """
    if d.is_continuous:
        raise ValueError("cannot split a continuous draw into bits")
    if selector_bits < 0 or selector_bits > d.bits:
        raise ValueError(
            f"selector needs {selector_bits} bits but draw has {d.bits}"
        )
    rem_bits = d.bits - selector_bits
    h = int(d.value)
    selector = h >> rem_bits
    remainder = h & ((1 << rem_bits) - 1)
    return BudgetSplit(
        selector_bits=selector_bits,
        selector_value=selector,
        remainder=SharedDraw.from_bits(rem_bits, remainder),
    )


def dyadic_bernoulli(selector_value: int, selector_bits: int, threshold_numerator: int) -> bool:
    """Exact coin with probability ``threshold_numerator / 2**selector_bits``.

    True iff the uniform selector value falls below the numerator; no floating
    point is involved, so the frequency over a full enumeration is exact.
    """
    if not 0 <= threshold_numerator <= (1 << selector_bits):
        raise ValueError(
            f"numerator {threshold_numerator} out of range for {selector_bits} bits"
        )
    return selector_value < threshold_numerator
