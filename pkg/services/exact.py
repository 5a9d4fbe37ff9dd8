from __future__ import annotations

import logging
import sys
from bisect import insort
from fractions import Fraction
from typing import Sequence

import numpy as np

from config import Config
from errors import NonDiscreteItem, StateSpaceTooLarge, UsageSetTooLarge
from models.action_table import ActionTable
from models.distribution import FiniteDiscrete, to_rational
from models.instance import Instance
from models.packing import OPEN

logger = logging.getLogger(f"packlab.{__name__}")

# recursion depth grows with n
sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))


def require_discrete(instance: Instance) -> None:
    for i, d in enumerate(instance.items):
        if not isinstance(d, FiniteDiscrete):
            raise NonDiscreteItem(f"item {i} is {d.kind}; exact solvers need discrete items")


def _without(usages: tuple, k: int) -> tuple:
    return usages[:k] + usages[k + 1 :]


def _replace(usages: tuple, k: int, new) -> tuple:
    rest = list(usages[:k] + usages[k + 1 :])
    insort(rest, new)
    return tuple(rest)


def _insert(usages: tuple, new) -> tuple:
    rest = list(usages)
    insort(rest, new)
    return tuple(rest)


class _UsageDP:
    """Sequential optimum over (t, sorted live usages).

    Broken bins are dropped as soon as they break; their penalty is charged on
    the overflowing branch.
    """

    def __init__(self, items: Sequence[FiniteDiscrete], penalty: Fraction, cap, state_cap: int):
        self.items = items
        self.C = penalty
        self.cap = cap
        self.state_cap = state_cap
        self.memo: dict[tuple, Fraction] = {}
        self.actions: dict[tuple, object] = {}

    def value(self, t: int, usages: tuple) -> Fraction:
        if t == len(self.items):
            return Fraction(0)
        key = (t, usages)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if len(self.memo) >= self.state_cap:
            raise StateSpaceTooLarge(f"DP passed {self.state_cap} states at item {t}")

        d = self.items[t]
        C, cap = self.C, self.cap
        best = None
        best_a = OPEN

        # Use(u) for each distinct live usage, ascending; first minimum wins
        prev = None
        for k, u in enumerate(usages):
            if u == prev:
                continue
            prev = u
            v = Fraction(0)
            for x, p in d.atoms:
                s = u + x
                if s > cap:
                    v += p * (C + self.value(t + 1, _without(usages, k)))
                else:
                    v += p * self.value(t + 1, _replace(usages, k, s))
            if best is None or v < best:
                best, best_a = v, u

        v = Fraction(1)
        for x, p in d.atoms:
            if x > cap:
                v += p * (C + self.value(t + 1, usages))
            else:
                v += p * self.value(t + 1, _insert(usages, x))
        if best is None or v < best:
            best, best_a = v, OPEN

        self.memo[key] = best
        self.actions[key] = best_a
        return best


def optimal_cost_dp(
    instance: Instance,
    *,
    state_cap: int | None = None,
) -> tuple[Fraction, ActionTable]:
    """Exact minimum expected cost over all sequential policies."""
    require_discrete(instance)
    state_cap = Config.DP_STATE_CAP if state_cap is None else state_cap

    dp = _UsageDP(instance.items, instance.penalty, instance.capacity, state_cap)
    value = dp.value(0, ())
    logger.info("optimal_cost_dp n=%d: value=%s (%d states)", instance.n, value, len(dp.memo))
    return value, ActionTable(kind="usage", actions=dict(dp.actions), value=value)


def bruteforce_optimal_cost(instance: Instance) -> Fraction:
    """Minimum over all policy trees by plain enumeration.

    Bins keep their labels, nothing is memoized, and cost is read off the
    leaves as (#bins) + C * (#broken). Only for tiny instances.
    """
    require_discrete(instance)
    items = instance.items
    C, cap = instance.penalty, instance.capacity
    n = len(items)

    def go(t: int, bins: tuple) -> Fraction:
        if t == n:
            return len(bins) + C * sum(1 for u in bins if u > cap)
        d = items[t]
        best = None
        for j in range(len(bins) + 1):
            if j < len(bins) and bins[j] > cap:
                continue
            v = Fraction(0)
            for x, p in d.atoms:
                if j == len(bins):
                    nxt = bins + (x,)
                else:
                    nxt = bins[:j] + (bins[j] + x,) + bins[j + 1 :]
                v += p * go(t + 1, nxt)
            if best is None or v < best:
                best = v
        return best

    return go(0, ())


# --- single active bin ---


def _usage_closure(d: FiniteDiscrete, cap, usage_cap: int) -> list:
    seen = {Fraction(0)} if isinstance(cap, Fraction) else {0}
    frontier = list(seen)
    while frontier:
        nxt = []
        for u in frontier:
            for x in d.values:
                s = u + x
                if s <= cap and s not in seen:
                    seen.add(s)
                    nxt.append(s)
                    if len(seen) > usage_cap:
                        raise UsageSetTooLarge(f"more than {usage_cap} reachable usages")
        frontier = nxt
    return sorted(seen)


def single_bin_optimal_curve(
    d: FiniteDiscrete,
    n: int,
    penalty,
    capacity=1,
    *,
    exact: bool = True,
    usage_cap: int | None = None,
) -> list:
    """Optimal cost of one-bin-at-a-time policies for every horizon 0..n.

    W(r, u): r items left, active bin at usage u. O(r): r items left, the next
    one must open. W(r, u) = min(continue, O(r)); the answer for horizon r is O(r).
    """
    if not isinstance(d, FiniteDiscrete):
        raise NonDiscreteItem("single-bin reference needs a discrete law")
    usage_cap = Config.USAGE_SET_CAP if usage_cap is None else usage_cap
    C = to_rational(penalty)
    cap = capacity

    U = _usage_closure(d, cap, usage_cap)
    index = {u: k for k, u in enumerate(U)}
    # nxt[k][a] = index of U[k] + x_a, or -1 on overflow
    nxt = [[index.get(u + x, -1) if u + x <= cap else -1 for x in d.values] for u in U]
    first = [index[x] if x <= cap else -1 for x in d.values]

    if exact:
        probs = list(d.probs)
        W = [Fraction(0)] * len(U)
        O = [Fraction(0)]
        for _ in range(1, n + 1):
            o_prev = O[-1]
            o = Fraction(1)
            for a, p in enumerate(probs):
                j = first[a]
                o += p * (C + o_prev if j < 0 else W[j])
            W = [
                min(
                    sum(
                        (p * (C + o_prev if row[a] < 0 else W[row[a]]) for a, p in enumerate(probs)),
                        Fraction(0),
                    ),
                    o,
                )
                for row in nxt
            ]
            O.append(o)
        return O

    # binary floating point, vectorized over usages
    probs = np.array([float(p) for p in d.probs])
    idx = np.array(nxt, dtype=np.int64)
    over = idx < 0
    safe = np.where(over, 0, idx)
    first_arr = np.array(first, dtype=np.int64)
    Cf = float(C)
    W = np.zeros(len(U))
    O = [0.0]
    for _ in range(1, n + 1):
        o_prev = O[-1]
        tail = np.where(first_arr < 0, Cf + o_prev, W[np.where(first_arr < 0, 0, first_arr)])
        o = 1.0 + float(probs @ tail)
        cont = np.where(over, Cf + o_prev, W[safe]) @ probs
        W = np.minimum(cont, o)
        O.append(o)
    return O


def single_bin_optimal_iid(
    d: FiniteDiscrete,
    n: int,
    penalty,
    capacity=1,
    *,
    exact: bool = True,
    usage_cap: int | None = None,
):
    return single_bin_optimal_curve(d, n, penalty, capacity, exact=exact, usage_cap=usage_cap)[n]


# --- budgeted policies, opened bins only ---


def min_opened_budgeted(
    instance: Instance,
    gamma,
    *,
    max_items: int | None = None,
    state_cap: int | None = None,
) -> Fraction:
    """Minimum expected number of opened bins over risk-budgeted policies.

    State: multiset of (usage, risk) for live bins still within budget. Use is
    allowed iff risk + p <= gamma/C; opening is always allowed.
    """
    require_discrete(instance)
    max_items = Config.BUDGETED_MAX_ITEMS if max_items is None else max_items
    state_cap = Config.DP_STATE_CAP if state_cap is None else state_cap
    if instance.n > max_items:
        raise StateSpaceTooLarge(f"n={instance.n} above the budgeted-search bound {max_items}")

    budget = to_rational(gamma) / instance.penalty
    items = instance.items
    cap = instance.capacity
    n = len(items)
    memo: dict[tuple, Fraction] = {}

    def keep(bins: list) -> tuple:
        return tuple(sorted((u, r) for u, r in bins if u <= cap and r <= budget))

    def go(t: int, bins: tuple) -> Fraction:
        if t == n:
            return Fraction(0)
        key = (t, bins)
        if key in memo:
            return memo[key]
        if len(memo) >= state_cap:
            raise StateSpaceTooLarge(f"budgeted DP passed {state_cap} states")

        d = items[t]
        # open
        p0 = d.overflow_prob(0, cap)
        best = Fraction(1)
        for x, p in d.atoms:
            best += p * go(t + 1, keep(list(bins) + [(x, p0)]))

        seen = set()
        for k, (u, r) in enumerate(bins):
            if (u, r) in seen:
                continue
            seen.add((u, r))
            pk = d.overflow_prob(u, cap)
            if r + pk > budget:
                continue
            rest = list(bins[:k] + bins[k + 1 :])
            v = Fraction(0)
            for x, p in d.atoms:
                v += p * go(t + 1, keep(rest + [(u + x, r + pk)]))
            if v < best:
                best = v

        memo[key] = best
        return best

    return go(0, ())
