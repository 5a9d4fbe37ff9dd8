from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

# policy choice: OPEN, or the index of an existing bin
OPEN = -1
Choice = int

Number = Union[Fraction, int, float]


@dataclass(slots=True)
class BinState:
    index: int
    usage: Number = 0
    # accumulated risk: overflow probabilities charged at packing time
    risk: Number = 0
    broken: bool = False
    items: list[int] = field(default_factory=list)
    # sum of min(X, cap) over the bin's items
    trunc: Number = 0

    @property
    def live(self) -> bool:
        return not self.broken


@dataclass(slots=True)
class PackingState:
    """Mutable state of one episode. pack_step updates it in place."""

    capacity: Number
    bins: list[BinState] = field(default_factory=list)
    # number of items already packed (next item index)
    t: int = 0
    opened: int = 0
    broken: int = 0
    total_risk: Number = 0
    total_trunc: Number = 0


@dataclass(frozen=True)
class EpisodeRecord:
    opened: int
    broken: int
    cost: Number
    bin_items: tuple[tuple[int, ...], ...]
    bin_risks: tuple[Number, ...]
    bin_trunc: tuple[Number, ...]
    bin_broken: tuple[bool, ...]
    total_risk: Number
    # sum over all items of min(X, cap)
    total_trunc: Number
    # copy bins opened per source bin (tracking executor only)
    copies: tuple[int, ...] = ()


@dataclass(frozen=True)
class MonteCarloStats:
    trials: int
    mean_cost: float
    stderr: float
    mean_opened: float
    opened_stderr: float
    mean_broken: float
    broken_stderr: float
    mean_total_risk: float
    # broken - total_risk, per trial
    risk_gap_mean: float
    risk_gap_stderr: float
    # sum_i min(X_i, cap) - cost, per trial
    size_gap_mean: float
    size_gap_stderr: float
    mean_first_bin_items: float
    first_bin_items_stderr: float
    # per bin index j (padded to the largest bin count seen)
    bin_open_freq: tuple[float, ...] = ()
    bin_open_stderr: tuple[float, ...] = ()
    bin_break_freq: tuple[float, ...] = ()
    bin_break_stderr: tuple[float, ...] = ()
    bin_mean_trunc: tuple[float, ...] = ()
    # trunc_j - 2 * open_j, per trial
    bin_size_gap_stderr: tuple[float, ...] = ()
    # tracking executor only: P(source bin j opened), E[real bins for source j]
    source_open_freq: tuple[float, ...] = ()
    source_copy_mean: tuple[float, ...] = ()

    def as_row(self) -> dict:
        return {
            "trials": self.trials,
            "mean_cost": self.mean_cost,
            "stderr": self.stderr,
            "mean_opened": self.mean_opened,
            "mean_broken": self.mean_broken,
            "mean_total_risk": self.mean_total_risk,
        }
