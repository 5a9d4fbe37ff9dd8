from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import partial

import numpy as np

from config import Config
from errors import DeviationLogicBreach, InvalidParams, ParamsMismatch, UseOfNonexistentBin
from models.action_table import ActionTable, DiscretizationParams, level_vector
from models.distribution import FiniteDiscrete, discrete, to_rational
from models.instance import Instance
from models.packing import OPEN, EpisodeRecord, MonteCarloStats, PackingState
from services.engine import monte_carlo_runs, pack_step, record_of
from services.exact import _UsageDP, require_discrete

logger = logging.getLogger(f"packlab.{__name__}")


def make_params(eps, grid=None) -> DiscretizationParams:
    """Validated (eps, eps^4, grid). grid defaults to eps^5.

    eps must satisfy 0 < eps <= sqrt(6) (sqrt(15) - 3), checked exactly:
    eps^2 <= 144 - 36 sqrt(15)  <=>  (144 - eps^2)^2 >= 19440 with 144 - eps^2 >= 0.
    """
    e = to_rational(eps)
    if e <= 0:
        raise InvalidParams(f"eps must be > 0, got {eps}")
    rest = 144 - e * e
    if rest < 0 or rest * rest < 19440:
        raise InvalidParams(f"eps={eps} is above sqrt(6)(sqrt(15) - 3)")

    small = e**4
    g = e**5 if grid is None else to_rational(grid)
    if not 0 < g <= small:
        raise InvalidParams(f"grid must be in (0, eps^4 = {small}], got {g}")
    return DiscretizationParams(eps=e, small_cut=small, grid=g)


def check_params(table: ActionTable, params: DiscretizationParams) -> None:
    if table.params != params:
        raise ParamsMismatch(f"action table was built with {table.params}, not {params}")


# --- discretization ---


def discretize_step1(d: FiniteDiscrete, params: DiscretizationParams) -> FiniteDiscrete:
    """Small mass (values <= eps^4) collapses onto {0, eps^4} keeping the mean."""
    cut = params.small_cut
    small = [(v, p) for v, p in d.atoms if v <= cut]
    large = [(v, p) for v, p in d.atoms if v > cut]
    if not small:
        return d

    mass = sum((p for _, p in small), Fraction(0))
    q = sum((v * p for v, p in small), Fraction(0)) / mass
    up = mass * q / cut
    atoms = list(large)
    # zero-probability atoms are dropped
    if mass - up > 0:
        atoms.append((Fraction(0), mass - up))
    if up > 0:
        atoms.append((cut, up))
    return discrete(atoms)


def round_up(v, grid):
    if v <= 0:
        return v
    return math.ceil(Fraction(v) / grid) * grid


def discretize_step2(d: FiniteDiscrete, params: DiscretizationParams) -> FiniteDiscrete:
    # every positive atom goes up to the next multiple of the grid
    return discrete((round_up(v, params.grid), p) for v, p in d.atoms)


def discretize(d: FiniteDiscrete, params: DiscretizationParams) -> FiniteDiscrete:
    return discretize_step2(discretize_step1(d, params), params)


def discretize_instance(instance: Instance, params: DiscretizationParams) -> Instance:
    require_discrete(instance)
    items = tuple(discretize(d, params) for d in instance.items)
    meta = dict(instance.meta, discretized=params.as_dict())
    return Instance(items=items, penalty=instance.penalty, capacity=instance.capacity, meta=meta)


# --- DP over level vectors ---


def dp_capacity(params: DiscretizationParams) -> Fraction:
    return 1 + 4 * params.eps


def real_capacity(params: DiscretizationParams) -> Fraction:
    return 1 + 6 * params.eps


def ptas_dp(
    instance_hat: Instance,
    params: DiscretizationParams,
    *,
    state_cap: int | None = None,
) -> tuple[Fraction, ActionTable]:
    """Optimal policy for discretized items in bins of size 1 + 4 eps.

    States are (t, level vector): counts of live bins per usage level
    j * grid. Bins past 1 + 4 eps are broken and dropped with C charged.
    """
    require_discrete(instance_hat)
    if instance_hat.capacity != 1:
        raise InvalidParams("the approximation scheme works with unit bins")
    state_cap = Config.DP_STATE_CAP if state_cap is None else state_cap
    grid = params.grid
    for d in instance_hat.items:
        for v in d.values:
            if (v / grid).denominator != 1:
                raise InvalidParams(f"size {v} is not on the grid {grid}; discretize first")

    dp = _UsageDP(instance_hat.items, instance_hat.penalty, dp_capacity(params), state_cap)
    value = dp.value(0, ())

    actions = {}
    for (t, usages), a in dp.actions.items():
        lv = level_vector(usages, grid)
        actions[(t, lv)] = a if a == OPEN else int(a / grid)

    logger.info(
        "ptas_dp n=%d eps=%s grid=%s: value=%s (%d states)",
        instance_hat.n,
        params.eps,
        grid,
        float(value),
        len(actions),
    )
    return value, ActionTable(kind="level", actions=actions, params=params, value=value)


# --- tracking executor ---


class _Source:
    __slots__ = ("usage", "broken", "copy", "x", "x1", "copies")

    def __init__(self):
        self.usage = Fraction(0)  # discretized usage
        self.broken = False
        self.copy = -1  # index of the real bin currently following this one
        self.x = Fraction(0)  # real usage of the copy
        self.x1 = Fraction(0)  # step-1 usage of the copy
        self.copies = 0


def track_execute_on(
    table: ActionTable,
    instance: Instance,
    params: DiscretizationParams,
    uniforms,
) -> EpisodeRecord:
    """One episode on the original items, bins of size 1 + 6 eps.

    Each item's uniform drives X (original), X' (step 1) and X-hat (step 2)
    together. Bin choices follow the discretized policy on X-hat usages. A
    source bin's real copy is replaced by a fresh one whenever its real and
    step-1 usages drift more than eps apart.
    """
    check_params(table, params)
    if params.eps > 1:
        raise InvalidParams("tracking needs eps <= 1")
    require_discrete(instance)

    step1 = [discretize_step1(d, params) for d in instance.items]
    real = instance.with_capacity(real_capacity(params))
    hat_cap = dp_capacity(params)
    eps = params.eps

    state = PackingState(capacity=real.capacity)
    sources: list[_Source] = []

    for t, d in enumerate(instance.items):
        u = float(uniforms[t])
        x = d.quantile(u)
        x1 = step1[t].quantile(u)
        xh = round_up(x1, params.grid)

        live = [s for s in sources if not s.broken]
        a = table.usage_action(t, [s.usage for s in live])
        if a == OPEN:
            src = _Source()
            sources.append(src)
        else:
            src = next((s for s in live if s.usage == a), None)
            if src is None:
                raise UseOfNonexistentBin(f"item {t}: no live source bin at usage {a}")

        if src.copy < 0 or abs(src.x - src.x1) > eps:
            src.copy = len(state.bins)
            src.x = Fraction(0)
            src.x1 = Fraction(0)
            src.copies += 1
            choice = OPEN
        else:
            choice = src.copy

        pack_step(state, choice, x, real)
        src.usage += xh
        src.x += x
        src.x1 += x1
        if src.usage > hat_cap:
            src.broken = True

        if state.bins[src.copy].broken and not src.broken:
            raise DeviationLogicBreach(
                f"item {t}: real bin {src.copy} broke at {src.x} while its source is at {src.usage}"
            )

    return record_of(state, real, copies=tuple(s.copies for s in sources))


def track_execute(
    table: ActionTable,
    instance: Instance,
    params: DiscretizationParams,
    rng: np.random.Generator,
) -> EpisodeRecord:
    return track_execute_on(table, instance, params, rng.random(instance.n))


def track_monte_carlo(
    table: ActionTable,
    instance: Instance,
    params: DiscretizationParams,
    trials: int,
    seed: int,
    *,
    workers: int | None = None,
) -> MonteCarloStats:
    stats = monte_carlo_runs(partial(track_execute, table, instance, params), trials, seed, workers=workers)
    logger.info(
        "track_monte_carlo n=%d eps=%s trials=%d: cost %.4f +- %.4f",
        instance.n,
        params.eps,
        trials,
        stats.mean_cost,
        stats.stderr,
    )
    return stats
