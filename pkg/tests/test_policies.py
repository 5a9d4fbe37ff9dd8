import math
import random
from fractions import Fraction as F

import pytest

from errors import InvalidPolicySpec
from models.distribution import discrete
from models.packing import OPEN, BinState
from services.engine import monte_carlo, new_state, pack_step, run_episode
from services.generators import bernoulli, exp_decreasing, exp_lower_bound, three_point
from services.policies import (
    BudgetedGreedy,
    FixedThreshold,
    FullGreedy,
    StreamBudgetedGreedy,
    budgeted_greedy_decide,
    fixed_threshold_decide,
    full_greedy_decide,
    parse_policies,
    parse_policy,
    threshold_greedy_decide,
)
from utils.rng import make_rng
from tests.conftest import random_discrete


def bin_at(j, usage, risk=0, broken=False):
    return BinState(index=j, usage=usage, risk=risk, broken=broken)


def law_with_overflow(p_at_half):
    # P(X > 0.5) = p_at_half, nothing above 1
    return discrete([(F(1, 10), 1 - p_at_half), (F(3, 5), p_at_half)])


def test_budgeted_greedy_within_budget():
    b = bin_at(0, F(1, 2), risk=F(15, 1000))
    assert budgeted_greedy_decide([b], law_with_overflow(F(4, 1000)), 1, 50, 1) == 0


def test_budgeted_greedy_over_budget():
    b = bin_at(0, F(1, 2), risk=F(15, 1000))
    assert budgeted_greedy_decide([b], law_with_overflow(F(6, 1000)), 1, 50, 1) == OPEN


def test_budgeted_greedy_lowest_index_and_skips_broken():
    bins = [bin_at(0, F(9, 10), broken=True), bin_at(1, 0), bin_at(2, 0)]
    assert budgeted_greedy_decide(bins, law_with_overflow(F(1, 100)), 1, 50, 1) == 1


def test_full_greedy_no_bins_opens():
    assert full_greedy_decide([], law_with_overflow(F(1, 2)), 50, 1) == OPEN


def test_full_greedy_strict_overflow():
    bern = discrete([(0, F(49, 50)), (1, F(1, 50))])
    # 0 + 1 is not > 1
    assert full_greedy_decide([bin_at(0, 0)], bern, 50, 1) == 0


def test_full_greedy_tie_prefers_use():
    bern = discrete([(0, F(49, 50)), (1, F(1, 50))])
    assert full_greedy_decide([bin_at(0, F(1, 2))], bern, 50, 1) == 0


@pytest.mark.parametrize("usage, expected", [(F(1, 2), 0), (F(51, 100), OPEN)])
def test_fixed_threshold(usage, expected):
    assert fixed_threshold_decide([bin_at(0, usage)], F(1, 2), 1) == expected


def test_fixed_threshold_first_item_opens():
    assert fixed_threshold_decide([], F(1, 2), 1) == OPEN


def test_fixed_threshold_uses_last_bin_only():
    bins = [bin_at(0, F(1, 10)), bin_at(1, F(9, 10))]
    assert fixed_threshold_decide(bins, F(1, 2), 1) == OPEN


def test_threshold_greedy_filters():
    bern = discrete([(0, F(49, 50)), (1, F(1, 50))])
    assert threshold_greedy_decide([bin_at(0, F(41, 100))], bern, F(2, 5), 50, 1) == OPEN
    bins = [bin_at(0, F(1, 2)), bin_at(1, F(3, 10))]
    assert threshold_greedy_decide(bins, bern, F(2, 5), 50, 1) == 1


def test_threshold_greedy_at_one_is_full_greedy():
    rng = random.Random(3)
    for _ in range(2000):
        d = random_discrete(rng, 3)
        bins = [
            bin_at(j, F(rng.randint(0, 12), 10), risk=0, broken=rng.random() < 0.2)
            for j in range(rng.randint(0, 4))
        ]
        bins = [b if b.usage <= 1 else bin_at(b.index, b.usage, broken=True) for b in bins]
        C = rng.choice([2, 10, 50])
        assert threshold_greedy_decide(bins, d, 1, C, 1) == full_greedy_decide(bins, d, C, 1)


def test_engine_policies_match_pure_deciders():
    inst = three_point(60, 50)
    pol = BudgetedGreedy(F(7071, 5000))
    rec = run_episode(inst, pol, make_rng(1))
    # replay the episode decision by decision with the pure decider
    state = new_state(inst)
    where = {i: j for j, items in enumerate(rec.bin_items) for i in items}
    us = make_rng(1).random(inst.n)
    for i, d in enumerate(inst.items):
        c = budgeted_greedy_decide(state.bins, d, pol.gamma, inst.penalty, inst.capacity)
        assert (len(state.bins) if c == OPEN else c) == where[i]
        pack_step(state, c, d.quantile(float(us[i])), inst)


def test_budget_invariant_after_episode():
    inst = three_point(300, 50)
    gamma = F(7071, 5000)
    budget = gamma / inst.penalty
    for t in range(20):
        rec = run_episode(inst, BudgetedGreedy(gamma), make_rng(8, t))
        for items, risk in zip(rec.bin_items, rec.bin_risks):
            first = inst.items[items[0]].overflow_prob(0, 1)
            if first <= budget:
                assert risk <= budget
            else:
                assert len(items) == 1


def test_budgeted_greedy_one_bin_at_a_time():
    inst = bernoulli(60, 10)
    for t in range(30):
        rec = run_episode(inst, BudgetedGreedy(2), make_rng(4, t))
        last = {j: max(items) for j, items in enumerate(rec.bin_items)}
        first = {j: min(items) for j, items in enumerate(rec.bin_items)}
        # bin j is finished before bin j + 1 starts
        for j in range(len(rec.bin_items) - 1):
            assert last[j] < first[j + 1]


def test_stream_policy_keeps_streams_apart():
    inst = exp_lower_bound(2, 1, 100)
    rec = run_episode(inst, StreamBudgetedGreedy(2), make_rng(0))
    for items in rec.bin_items:
        assert len({inst.items[i] for i in items}) == 1


def test_budget_checks_hold_on_exponentials():
    inst = exp_decreasing(200, 50)
    gamma = 2
    stats = monte_carlo(inst, BudgetedGreedy(gamma), 400, seed=5)
    assert stats.mean_cost <= (1 + gamma) * stats.mean_opened + 4 * (stats.stderr + 3 * stats.opened_stderr)


@pytest.mark.parametrize(
    "spec, name",
    [("bg:1.4142", "bg:1.4142"), ("fg", "fg"), ("ft:0.5", "ft:0.5"), ("tg:0.4", "tg:0.4"), ("sbg:2", "sbg:2")],
)
def test_parse_policy(spec, name):
    assert parse_policy(spec).name == name


def test_parse_policies_list():
    assert [p.name for p in parse_policies("bg:1.4142,fg,tg:0.4")] == ["bg:1.4142", "fg", "tg:0.4"]


@pytest.mark.parametrize("specs", ["fg,fg", "tg:0.4,bg:1,tg:0.4", ["bg:2", "bg:2"]])
def test_parse_policies_rejects_repeats(specs):
    with pytest.raises(InvalidPolicySpec, match="twice"):
        parse_policies(specs)


@pytest.mark.parametrize("spec", ["bg", "bg:x", "bg:0", "ft:2", "zz", "fg:1"])
def test_parse_policy_errors(spec):
    with pytest.raises(InvalidPolicySpec):
        parse_policy(spec)


def test_fixed_threshold_exposes_alpha():
    assert FixedThreshold(F(1, 2)).alpha == F(1, 2)
    assert FullGreedy().alpha is None


@pytest.mark.slow
def test_lower_bound_family_separates_budgeted_greedy():
    n1, eps, C = 6, 1, 100
    inst = exp_lower_bound(n1, eps, C)
    bg = monte_carlo(inst, BudgetedGreedy(1), 300, seed=17, workers=4)
    assert bg.mean_cost >= n1 / 2 - 4 * bg.stderr

    # one budgeted greedy per rate stays within a constant of the optimum
    streams = monte_carlo(inst, StreamBudgetedGreedy(2), 300, seed=17, workers=4)
    bound = 48 * n1 * (3 * eps + 1 / (eps * math.log(C)))
    assert streams.mean_cost <= bound + 4 * streams.stderr
