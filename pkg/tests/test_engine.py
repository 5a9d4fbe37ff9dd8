from fractions import Fraction as F

import pytest

from errors import UseOfBrokenBin, UseOfNonexistentBin
from models.distribution import point_mass
from models.instance import iid
from models.packing import OPEN
from services.engine import monte_carlo, new_state, pack_step, run_episode, run_episode_on
from services.generators import bernoulli, example1, three_point
from services.policies import BudgetedGreedy, FixedThreshold, FullGreedy, ThresholdGreedy
from utils.rng import make_rng


def _state(sizes, cap=1, C=50):
    inst = iid(point_mass(F(3, 10)), len(sizes) + 3, C, capacity=cap)
    s = new_state(inst)
    for x in sizes:
        pack_step(s, OPEN if not s.bins else 0, x, inst)
    return s, inst


def test_open_creates_bin():
    s, _ = _state([F(3, 10)])
    assert s.opened == 1 and s.broken == 0
    assert s.bins[0].usage == F(3, 10)


def test_overflow_breaks_bin():
    s, inst = _state([F(4, 5)])
    pack_step(s, 0, F(3, 10), inst)
    assert s.bins[0].usage == F(11, 10)
    assert s.broken == 1 and s.bins[0].broken


def test_exact_fit_does_not_break():
    s, inst = _state([F(7, 10)])
    pack_step(s, 0, F(3, 10), inst)
    assert s.bins[0].usage == 1
    assert not s.bins[0].broken


def test_risk_charged_before_add():
    s, inst = _state([F(4, 5)])
    # point mass 0.3 onto 0.8: overflow probability 1
    pack_step(s, 0, F(3, 10), inst)
    assert s.bins[0].risk == 1
    assert s.total_risk == 1


def test_invalid_moves():
    s, inst = _state([F(4, 5)])
    with pytest.raises(UseOfNonexistentBin):
        pack_step(s, 3, F(1, 10), inst)
    pack_step(s, 0, F(3, 10), inst)
    with pytest.raises(UseOfBrokenBin):
        pack_step(s, 0, F(1, 10), inst)


def test_single_item_episode():
    inst = iid(point_mass(F(3, 2)), 1, 50)
    rec = run_episode(inst, FullGreedy(), make_rng(0))
    assert rec.opened == 1
    assert rec.cost == 1 + 50


def test_cost_identity_per_episode():
    inst = three_point(200, 50)
    for t in range(20):
        rec = run_episode(inst, FullGreedy(), make_rng(5, t))
        assert rec.cost == rec.opened + inst.penalty * rec.broken


def test_run_episode_on_fixed_sizes():
    inst = iid(point_mass(F(1, 2)), 3, 50)
    rec = run_episode_on(inst, FullGreedy(), [F(1, 2)] * 3)
    # two items fill the first bin exactly, the third one opens
    assert rec.bin_items == ((0, 1), (2,))


def test_zero_items_cost_one():
    stats = monte_carlo(iid(point_mass(0), 10, 50), FullGreedy(), 1000, seed=1)
    assert stats.mean_cost == 1.0
    assert stats.stderr == 0.0


def test_same_seed_same_stats():
    inst = three_point(50, 50)
    a = monte_carlo(inst, BudgetedGreedy(F(7071, 5000)), 200, seed=3)
    b = monte_carlo(inst, BudgetedGreedy(F(7071, 5000)), 200, seed=3)
    assert a == b


def test_worker_count_does_not_change_output():
    inst = three_point(60, 50)
    one = monte_carlo(inst, ThresholdGreedy(F(2, 5)), 64, seed=9, workers=1)
    many = monte_carlo(inst, ThresholdGreedy(F(2, 5)), 64, seed=9, workers=4)
    assert one == many


def test_stop_after_positive_on_bernoulli():
    # ft:0 abandons a bin as soon as it holds a 1
    n, C = 100, 50
    stats = monte_carlo(bernoulli(n, C), FixedThreshold(0), 2000, seed=2)
    assert stats.mean_cost <= n / C + 1 + 4 * stats.stderr


def test_full_greedy_bad_on_bernoulli():
    # greedy keeps adding to a bin holding a 1 (C * 1/C = 1 ties with opening)
    n, C = 1000, 10
    stats = monte_carlo(bernoulli(n, C), FullGreedy(), 300, seed=2)
    assert stats.mean_cost >= n / 2 - 4 * stats.stderr


def test_example1_costs_at_least_n():
    n, C = 40, 50
    stats = monte_carlo(example1(n, C), BudgetedGreedy(1), 2000, seed=4)
    assert stats.mean_cost >= n - 4 * stats.stderr


RISK_POLICIES = [BudgetedGreedy(F(7071, 5000)), FullGreedy(), ThresholdGreedy(F(2, 5))]


@pytest.mark.parametrize("policy", RISK_POLICIES, ids=["bg", "fg", "tg"])
def test_risk_identity_short(policy):
    # both sides come from the same episodes
    stats = monte_carlo(three_point(200, 50), policy, 2000, seed=11)
    assert abs(stats.risk_gap_mean) <= 4 * stats.risk_gap_stderr + 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("policy", RISK_POLICIES, ids=["bg", "fg", "tg"])
def test_risk_identity(policy):
    stats = monte_carlo(three_point(200, 50), policy, 100_000, seed=11, workers=4)
    assert stats.trials == 100_000
    assert abs(stats.risk_gap_mean) <= 4 * stats.risk_gap_stderr + 1e-12
