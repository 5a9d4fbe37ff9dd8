from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Protocol, Sequence

import numpy as np

from config import Config
from errors import InvalidParams, UseOfBrokenBin, UseOfNonexistentBin
from models.distribution import SizeDistribution
from models.instance import Instance
from models.packing import OPEN, BinState, Choice, EpisodeRecord, MonteCarloStats, PackingState
from utils.rng import make_rng

logger = logging.getLogger(f"packlab.{__name__}")


class Policy(Protocol):
    name: str

    def reset(self, instance: Instance) -> None: ...

    def decide(self, state: PackingState, index: int, dist: SizeDistribution) -> Choice: ...


def new_state(instance: Instance) -> PackingState:
    return PackingState(capacity=instance.capacity)


def pack_step(state: PackingState, choice: Choice, size, instance: Instance) -> PackingState:
    """Pack item state.t with outcome `size` according to `choice`.

    Risk is charged before the add. The bin breaks iff usage > capacity.
    """
    i = state.t
    d = instance.items[i]
    cap = instance.capacity

    if choice == OPEN:
        b = BinState(index=len(state.bins))
        state.bins.append(b)
        state.opened += 1
    else:
        if not 0 <= choice < len(state.bins):
            raise UseOfNonexistentBin(f"item {i}: bin {choice} does not exist")
        b = state.bins[choice]
        if b.broken:
            raise UseOfBrokenBin(f"item {i}: bin {choice} is broken")

    p = d.overflow_prob(b.usage, cap)
    b.risk += p
    state.total_risk += p

    b.usage += size
    b.items.append(i)
    tr = size if size < cap else cap
    b.trunc += tr
    state.total_trunc += tr

    if b.usage > cap:
        b.broken = True
        state.broken += 1

    state.t += 1
    return state


def record_of(state: PackingState, instance: Instance, copies: tuple[int, ...] = ()) -> EpisodeRecord:
    return EpisodeRecord(
        opened=state.opened,
        broken=state.broken,
        cost=state.opened + instance.penalty * state.broken,
        bin_items=tuple(tuple(b.items) for b in state.bins),
        bin_risks=tuple(b.risk for b in state.bins),
        bin_trunc=tuple(b.trunc for b in state.bins),
        bin_broken=tuple(b.broken for b in state.bins),
        total_risk=state.total_risk,
        total_trunc=state.total_trunc,
        copies=copies,
    )


def run_episode_on(instance: Instance, policy: Policy, sizes: Sequence) -> EpisodeRecord:
    """One episode with the item outcomes fixed in advance."""
    policy.reset(instance)
    state = new_state(instance)
    for i, d in enumerate(instance.items):
        choice = policy.decide(state, i, d)
        pack_step(state, choice, sizes[i], instance)
    return record_of(state, instance)


def run_episode(instance: Instance, policy: Policy, rng: np.random.Generator) -> EpisodeRecord:
    # the policy never sees an outcome before choosing, so all draws can
    # happen up front: one uniform per item through the inverse CDF
    us = rng.random(instance.n)
    sizes = [d.quantile(float(u)) for d, u in zip(instance.items, us)]
    return run_episode_on(instance, policy, sizes)


# --- Monte Carlo ---


@dataclass(frozen=True)
class TrialSummary:
    trial: int
    cost: float
    opened: int
    broken: int
    total_risk: float
    total_trunc: float
    first_bin_items: int
    bin_broken: tuple[bool, ...]
    bin_trunc: tuple[float, ...]
    # tracking executor: real bins per source bin
    copies: tuple[int, ...] = ()


def summarize(trial: int, rec: EpisodeRecord) -> TrialSummary:
    return TrialSummary(
        trial=trial,
        cost=float(rec.cost),
        opened=rec.opened,
        broken=rec.broken,
        total_risk=float(rec.total_risk),
        total_trunc=float(rec.total_trunc),
        first_bin_items=len(rec.bin_items[0]) if rec.bin_items else 0,
        bin_broken=rec.bin_broken,
        bin_trunc=tuple(float(x) for x in rec.bin_trunc),
        copies=rec.copies,
    )


EpisodeRunner = Callable[[np.random.Generator], EpisodeRecord]


def _run_range(runner: EpisodeRunner, seed: int, start: int, stop: int) -> list[TrialSummary]:
    return [summarize(t, runner(make_rng(seed, t))) for t in range(start, stop)]


def _mean_se(a: np.ndarray) -> tuple[float, float]:
    m = float(a.mean())
    if a.size < 2:
        return m, 0.0
    return m, float(a.std(ddof=1) / math.sqrt(a.size))


def _moment_se(s: np.ndarray, ss: np.ndarray, n: int) -> np.ndarray:
    if n < 2:
        return np.zeros_like(s)
    mean = s / n
    var = np.clip((ss - n * mean * mean) / (n - 1), 0.0, None)
    return np.sqrt(var / n)


def aggregate(rows: Sequence[TrialSummary]) -> MonteCarloStats:
    """Stats from per-trial summaries. Rows are reduced in trial order."""
    if not rows:
        raise InvalidParams("cannot aggregate zero trials")
    rows = sorted(rows, key=lambda r: r.trial)
    n = len(rows)

    cost = np.array([r.cost for r in rows], dtype=float)
    opened = np.array([r.opened for r in rows], dtype=float)
    broken = np.array([r.broken for r in rows], dtype=float)
    risk = np.array([r.total_risk for r in rows], dtype=float)
    trunc = np.array([r.total_trunc for r in rows], dtype=float)
    first = np.array([r.first_bin_items for r in rows], dtype=float)

    mean_cost, se_cost = _mean_se(cost)
    mean_opened, se_opened = _mean_se(opened)
    mean_broken, se_broken = _mean_se(broken)
    gap_mean, gap_se = _mean_se(broken - risk)
    size_mean, size_se = _mean_se(trunc - cost)
    first_mean, first_se = _mean_se(first)

    # per-bin moments, accumulated row by row so the result never depends on
    # how trials were split across workers
    width = int(opened.max())
    open_s = np.zeros(width)
    brk_s = np.zeros(width)
    tr_s = np.zeros(width)
    gap_s = np.zeros(width)
    gap_ss = np.zeros(width)
    for r in rows:
        k = r.opened
        o = np.zeros(width)
        o[:k] = 1.0
        b = np.zeros(width)
        b[:k] = np.asarray(r.bin_broken, dtype=float)
        tr = np.zeros(width)
        tr[:k] = np.asarray(r.bin_trunc, dtype=float)
        g = tr - 2.0 * o
        open_s += o
        brk_s += b
        tr_s += tr
        gap_s += g
        gap_ss += g * g

    # tracking runs: per source bin, open frequency and mean number of copies
    src = max((len(r.copies) for r in rows), default=0)
    src_open = np.zeros(src)
    src_copies = np.zeros(src)
    for r in rows:
        k = len(r.copies)
        src_open[:k] += 1.0
        src_copies[:k] += np.asarray(r.copies, dtype=float)

    # indicators: sum of squares equals the sum
    open_se = _moment_se(open_s, open_s, n)
    brk_se = _moment_se(brk_s, brk_s, n)

    return MonteCarloStats(
        trials=n,
        mean_cost=mean_cost,
        stderr=se_cost,
        mean_opened=mean_opened,
        opened_stderr=se_opened,
        mean_broken=mean_broken,
        broken_stderr=se_broken,
        mean_total_risk=float(risk.mean()),
        risk_gap_mean=gap_mean,
        risk_gap_stderr=gap_se,
        size_gap_mean=size_mean,
        size_gap_stderr=size_se,
        mean_first_bin_items=first_mean,
        first_bin_items_stderr=first_se,
        bin_open_freq=tuple((open_s / n).tolist()),
        bin_open_stderr=tuple(open_se.tolist()),
        bin_break_freq=tuple((brk_s / n).tolist()),
        bin_break_stderr=tuple(brk_se.tolist()),
        bin_mean_trunc=tuple((tr_s / n).tolist()),
        bin_size_gap_stderr=tuple(_moment_se(gap_s, gap_ss, n).tolist()),
        source_open_freq=tuple((src_open / n).tolist()),
        source_copy_mean=tuple((src_copies / n).tolist()),
    )


def monte_carlo_runs(
    runner: EpisodeRunner,
    trials: int,
    seed: int,
    *,
    workers: int | None = None,
) -> MonteCarloStats:
    """Run `trials` episodes of `runner`, trial t on stream (seed, t)."""
    if trials < 1:
        raise InvalidParams(f"trials must be >= 1, got {trials}")

    workers = Config.WORKERS if workers is None else workers
    workers = max(1, min(int(workers), trials))

    if workers == 1:
        rows = _run_range(runner, seed, 0, trials)
    else:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        rows = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_range, runner, seed, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for f in futures:
                rows.extend(f.result())

    return aggregate(rows)


def monte_carlo(
    instance: Instance,
    policy: Policy,
    trials: int,
    seed: int,
    *,
    workers: int | None = None,
) -> MonteCarloStats:
    stats = monte_carlo_runs(partial(run_episode, instance, policy), trials, seed, workers=workers)
    logger.info(
        "monte_carlo %s n=%d trials=%d: cost %.4f +- %.4f (opened %.3f, broken %.3f)",
        getattr(policy, "name", type(policy).__name__),
        instance.n,
        trials,
        stats.mean_cost,
        stats.stderr,
        stats.mean_opened,
        stats.mean_broken,
    )
    return stats
