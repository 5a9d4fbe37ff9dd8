from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable, Sequence

from errors import InvalidPolicySpec, PackLabError
from models.action_table import ActionTable
from models.distribution import SizeDistribution, to_rational
from models.instance import Instance
from models.packing import OPEN, BinState, Choice, PackingState

logger = logging.getLogger(f"packlab.{__name__}")


# --- pure deciders ---
# bins: the visible bins in index order (broken ones included, flagged)


def budgeted_greedy_decide(
    bins: Sequence[BinState], d: SizeDistribution, gamma, penalty, cap
) -> Choice:
    """Lowest-index live bin whose risk stays within gamma/C after this item."""
    budget = gamma / penalty
    for b in bins:
        if b.broken or b.usage > cap:
            continue
        if b.risk + d.overflow_prob(b.usage, cap) <= budget:
            return b.index
    return OPEN


def full_greedy_decide(bins: Sequence[BinState], d: SizeDistribution, penalty, cap) -> Choice:
    """Cheapest live bin by C * P(overflow); Use on a tie with opening (cost 1)."""
    return _greedy(bins, d, penalty, cap, limit=None)


def threshold_greedy_decide(
    bins: Sequence[BinState], d: SizeDistribution, alpha, penalty, cap
) -> Choice:
    """Full Greedy over the bins with usage <= alpha."""
    return _greedy(bins, d, penalty, cap, limit=alpha)


def fixed_threshold_decide(bins: Sequence[BinState], alpha, cap) -> Choice:
    # one active bin: the last opened
    if not bins:
        return OPEN
    active = bins[-1]
    if not active.broken and active.usage <= alpha and active.usage <= cap:
        return active.index
    return OPEN


def _greedy(bins, d, penalty, cap, *, limit) -> Choice:
    best = OPEN
    best_cost = None
    for b in bins:
        if b.broken or b.usage > cap:
            continue
        if limit is not None and b.usage > limit:
            continue
        c = penalty * d.overflow_prob(b.usage, cap)
        if best_cost is None or c < best_cost:
            best, best_cost = b.index, c
            if c == 0:
                break
    if best_cost is not None and best_cost <= 1:
        return best
    return OPEN


# --- policy objects used by the engine ---
#
# reset() runs once per episode. The caches below only ever drop bins that
# can never be chosen again (broken bins, bins over budget or threshold), so
# decisions are identical to the pure deciders above.


def _check_gamma(gamma) -> Fraction | float:
    g = gamma if isinstance(gamma, float) else to_rational(gamma)
    if not g > 0:
        raise InvalidPolicySpec(f"gamma must be > 0, got {gamma}")
    return g


def _check_alpha(alpha) -> Fraction:
    a = to_rational(alpha)
    if not 0 <= a <= 1:
        raise InvalidPolicySpec(f"alpha must be in [0, 1], got {alpha}")
    return a


def _budget(gamma, instance: Instance):
    if instance.is_discrete and not isinstance(gamma, float):
        return gamma / instance.penalty
    return float(gamma) / float(instance.penalty)


class _CachedBins:
    """Indices of bins still eligible, refreshed lazily from the state."""

    def __init__(self):
        self.idx: list[int] = []
        self.seen = 0

    def sync(self, state: PackingState, keep) -> list[int]:
        bins = state.bins
        while self.seen < len(bins):
            self.idx.append(self.seen)
            self.seen += 1
        if any(not keep(bins[j]) for j in self.idx):
            self.idx = [j for j in self.idx if keep(bins[j])]
        return self.idx


class BudgetedGreedy:
    def __init__(self, gamma):
        self.gamma = _check_gamma(gamma)
        self.name = f"bg:{_fmt(gamma)}"

    def reset(self, instance: Instance) -> None:
        self._cap = instance.capacity
        self._budget = _budget(self.gamma, instance)
        self._cache = _CachedBins()

    def _keep(self, b: BinState) -> bool:
        return not b.broken and b.risk <= self._budget

    def decide(self, state: PackingState, index: int, dist: SizeDistribution) -> Choice:
        cap = self._cap
        budget = self._budget
        for j in self._cache.sync(state, self._keep):
            b = state.bins[j]
            if b.risk + dist.overflow_prob(b.usage, cap) <= budget:
                return j
        return OPEN


class FullGreedy:
    name = "fg"

    def __init__(self):
        self.alpha = None

    def reset(self, instance: Instance) -> None:
        self._cap = instance.capacity
        self._penalty = instance.penalty if instance.is_discrete else float(instance.penalty)
        self._cache = _CachedBins()

    def _keep(self, b: BinState) -> bool:
        if b.broken:
            return False
        return self.alpha is None or b.usage <= self.alpha

    def decide(self, state: PackingState, index: int, dist: SizeDistribution) -> Choice:
        live = self._cache.sync(state, self._keep)
        return _greedy([state.bins[j] for j in live], dist, self._penalty, self._cap, limit=None)


class ThresholdGreedy(FullGreedy):
    def __init__(self, alpha):
        self.alpha = _check_alpha(alpha)
        self.name = f"tg:{_fmt(alpha)}"


class FixedThreshold:
    def __init__(self, alpha):
        self.alpha = _check_alpha(alpha)
        self.name = f"ft:{_fmt(alpha)}"

    def reset(self, instance: Instance) -> None:
        self._cap = instance.capacity

    def decide(self, state: PackingState, index: int, dist: SizeDistribution) -> Choice:
        return fixed_threshold_decide(state.bins, self.alpha, self._cap)


class MdpThreshold:
    """Fixed Threshold with alpha from the discounted single-bin MDP."""

    name = "mdp"

    def __init__(self, discount: float | None = None, tol: float | None = None):
        self.discount = discount
        self.tol = tol
        self.alpha = None
        self._solved: dict = {}

    def reset(self, instance: Instance) -> None:
        from services.mdp import threshold_for

        if not (instance.is_discrete and instance.is_iid):
            raise InvalidPolicySpec("mdp policy needs an i.i.d. discrete instance")
        d = instance.items[0]
        key = (d, instance.penalty, instance.capacity)
        if key not in self._solved:
            self._solved[key] = threshold_for(
                d, instance.penalty, capacity=instance.capacity, discount=self.discount, tol=self.tol
            ).alpha
            logger.debug("mdp threshold alpha=%s", self._solved[key])
        self.alpha = self._solved[key]
        self._cap = instance.capacity

    def decide(self, state: PackingState, index: int, dist: SizeDistribution) -> Choice:
        return fixed_threshold_decide(state.bins, self.alpha, self._cap)


class StreamBudgetedGreedy:
    """Budgeted Greedy run separately per stream.

    A stream is the set of items sharing one distribution; a bin belongs to
    the stream of its first item and only takes items of that stream.
    """

    def __init__(self, gamma):
        self.gamma = _check_gamma(gamma)
        self.name = f"sbg:{_fmt(gamma)}"

    def reset(self, instance: Instance) -> None:
        self._items = instance.items
        self._cap = instance.capacity
        self._budget = _budget(self.gamma, instance)
        self._streams: dict[SizeDistribution, list[int]] = {}
        self._seen = 0

    def decide(self, state: PackingState, index: int, dist: SizeDistribution) -> Choice:
        bins = state.bins
        while self._seen < len(bins):
            stream = self._items[bins[self._seen].items[0]]
            self._streams.setdefault(stream, []).append(self._seen)
            self._seen += 1

        mine = self._streams.get(dist)
        if not mine:
            return OPEN
        cap, budget = self._cap, self._budget
        keep = [j for j in mine if not bins[j].broken and bins[j].risk <= budget]
        self._streams[dist] = keep
        for j in keep:
            b = bins[j]
            if b.risk + dist.overflow_prob(b.usage, cap) <= budget:
                return j
        return OPEN


class DpPolicy:
    """Replays a DP action table: lowest-index live bin with the chosen usage."""

    name = "dp"

    def __init__(self, table: ActionTable):
        self.table = table

    def reset(self, instance: Instance) -> None:
        self._cap = instance.capacity

    def decide(self, state: PackingState, index: int, dist: SizeDistribution) -> Choice:
        live = [b for b in state.bins if not b.broken]
        a = self.table.usage_action(index, [b.usage for b in live])
        if a == OPEN:
            return OPEN
        for b in live:
            if b.usage == a:
                return b.index
        raise PackLabError(f"action table names usage {a} but no live bin has it")


# --- spec strings ---


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return format(float(x), "g") if _is_decimal(x) else str(x)
    return str(x)


def _is_decimal(x: Fraction) -> bool:
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def parse_policy(spec: str):
    """Policy from `bg:<g>`, `sbg:<g>`, `fg`, `ft:<a>`, `tg:<a>`, `mdp`."""
    raw = spec.strip()
    kind, sep, arg = raw.partition(":")
    kind = kind.strip().lower()
    arg = arg.strip()

    try:
        if kind == "fg" and not sep:
            return FullGreedy()
        if kind == "mdp" and not sep:
            return MdpThreshold()
        if kind in ("bg", "sbg", "ft", "tg") and arg:
            # decimals read as exact rationals ("1.4142" -> 7071/5000)
            value = Fraction(arg)
            if kind == "bg":
                p = BudgetedGreedy(value)
            elif kind == "sbg":
                p = StreamBudgetedGreedy(value)
            elif kind == "ft":
                p = FixedThreshold(value)
            else:
                p = ThresholdGreedy(value)
            p.name = f"{kind}:{arg}"
            return p
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidPolicySpec(f"bad policy spec {spec!r}: {e}") from e

    raise InvalidPolicySpec(f"unknown policy spec {spec!r}")


def parse_policies(specs: str | Iterable[str]) -> list:
    if isinstance(specs, str):
        specs = [s for s in specs.split(",") if s.strip()]
    policies = [parse_policy(s) for s in specs]
    seen = set()
    for p in policies:
        if p.name in seen:
            raise InvalidPolicySpec(f"policy {p.name!r} is listed twice")
        seen.add(p.name)
    return policies
