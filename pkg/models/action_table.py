from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Optional

from errors import InvalidParams
from models.packing import OPEN

# DP state keys
#   usage tables: (t, sorted tuple of live usages)
#   level tables: (t, sorted tuple of (level, count)), usage = level * grid
StateKey = tuple[int, tuple]

# ((level, count), ...) sorted by level, zero counts omitted
LevelVector = tuple[tuple[int, int], ...]


def level_vector(usages, grid) -> LevelVector:
    counts: dict[int, int] = {}
    for u in usages:
        lvl = u / grid
        if lvl.denominator != 1:
            raise InvalidParams(f"usage {u} is not on the grid {grid}")
        counts[int(lvl)] = counts.get(int(lvl), 0) + 1
    return tuple(sorted(counts.items()))


@dataclass(frozen=True)
class DiscretizationParams:
    eps: Fraction
    small_cut: Fraction
    grid: Fraction

    def as_dict(self) -> dict:
        return {"eps": str(self.eps), "small_cut": str(self.small_cut), "grid": str(self.grid)}


@dataclass
class ActionTable:
    """Optimal action per DP state: OPEN, or the usage (level) of a live bin to use."""

    kind: str  # "usage" | "level"
    actions: dict[Hashable, object] = field(default_factory=dict)
    params: Optional[DiscretizationParams] = None
    value: Optional[Fraction] = None

    def key(self, t: int, usages) -> StateKey:
        if self.kind == "usage":
            return (t, tuple(sorted(usages)))
        return (t, level_vector(usages, self.params.grid))

    def usage_action(self, t: int, usages):
        """OPEN, or the usage value whose bin should receive item t."""
        a = self.actions[self.key(t, usages)]
        if a == OPEN or self.kind == "usage":
            return a
        return a * self.params.grid

    def __len__(self) -> int:
        return len(self.actions)
