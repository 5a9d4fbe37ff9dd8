from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

from errors import InvalidInstance
from models.distribution import (
    Exponential,
    FiniteDiscrete,
    SizeDistribution,
    build_distribution,
    to_rational,
)


@dataclass(frozen=True)
class Instance:
    items: tuple[SizeDistribution, ...]
    penalty: Fraction
    capacity: Fraction | int = 1
    # free-form provenance (generator name + params); not used by solvers
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise InvalidInstance("instance needs at least one item")
        for d in items:
            if not isinstance(d, (FiniteDiscrete, Exponential)):
                raise InvalidInstance(f"item {d!r} is not a size distribution")

        penalty = to_rational(self.penalty)
        if penalty < 1:
            raise InvalidInstance(f"penalty C must be >= 1, got {penalty}")

        capacity = self.capacity
        if not isinstance(capacity, int) or isinstance(capacity, bool):
            capacity = to_rational(capacity)
        if capacity <= 0:
            raise InvalidInstance(f"capacity must be > 0, got {capacity}")

        object.__setattr__(self, "items", items)
        object.__setattr__(self, "penalty", penalty)
        object.__setattr__(self, "capacity", capacity)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def is_discrete(self) -> bool:
        return all(isinstance(d, FiniteDiscrete) for d in self.items)

    @property
    def is_iid(self) -> bool:
        first = self.items[0]
        return all(d == first for d in self.items)

    def prefix(self, k: int) -> "Instance":
        if not 1 <= k <= self.n:
            raise InvalidInstance(f"prefix length {k} outside 1..{self.n}")
        return replace(self, items=self.items[:k])

    def with_capacity(self, capacity) -> "Instance":
        return replace(self, capacity=capacity)


def make_instance(
    items: Iterable[object],
    penalty,
    capacity=1,
    meta: dict | None = None,
) -> Instance:
    """Instance from distribution specs (dicts, text specs, or distributions)."""
    return Instance(
        items=tuple(build_distribution(s) for s in items),
        penalty=penalty,
        capacity=capacity,
        meta=dict(meta or {}),
    )


def iid(d: SizeDistribution, n: int, penalty, capacity=1, meta: dict | None = None) -> Instance:
    if n < 1:
        raise InvalidInstance(f"n must be >= 1, got {n}")
    return Instance(items=(d,) * n, penalty=penalty, capacity=capacity, meta=dict(meta or {}))
