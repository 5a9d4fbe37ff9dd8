from dataclasses import replace
from fractions import Fraction as F

import pytest

from services.checks import (
    aggregate_size_check,
    break_bound_check,
    cost_opened_check,
    risk_identity_check,
    self_check,
    size_bound_check,
    wald_bound_check,
)
from services.engine import monte_carlo
from services.generators import exp_blocks, three_point
from services.policies import BudgetedGreedy, FullGreedy


@pytest.fixture(scope="module")
def bg_stats():
    return monte_carlo(three_point(200, 50), BudgetedGreedy(F(7071, 5000)), 1500, seed=21, workers=1)


def test_budgeted_greedy_passes_all_checks(bg_stats):
    results = self_check(bg_stats, gamma=F(7071, 5000), penalty=50, n=200)
    assert results
    failed = [r.name for r in results if not r.passed]
    assert failed == []
    names = {r.name for r in results}
    assert {"risk_identity", "aggregate_size", "cost_opened", "wald_bound", "break_bound[0]"} <= names


def test_policy_free_checks_only_without_gamma(bg_stats):
    names = {r.name for r in self_check(bg_stats)}
    assert "cost_opened" not in names
    assert not any(n.startswith("break_bound") for n in names)


def test_full_greedy_passes_identities():
    stats = monte_carlo(three_point(200, 50), FullGreedy(), 1000, seed=22, workers=1)
    assert risk_identity_check(stats).passed
    assert aggregate_size_check(stats).passed
    assert all(r.passed for r in size_bound_check(stats))


@pytest.mark.parametrize("gamma", [1, 2])
def test_budget_bounds_on_exponential_blocks(gamma):
    inst = exp_blocks(60, 50)
    stats = monte_carlo(inst, BudgetedGreedy(gamma), 1500, seed=23, workers=1)
    assert all(r.passed for r in break_bound_check(stats, gamma / 50))
    assert cost_opened_check(stats, gamma).passed


def test_failed_check_reports(bg_stats):
    bad = replace(bg_stats, risk_gap_mean=1.0, risk_gap_stderr=0.01)
    res = risk_identity_check(bad)
    assert not res.passed
    assert res.as_dict() == {"name": "risk_identity", "lhs": 1.0, "rhs": 0.0, "slack": 0.04, "passed": False}


def test_cost_opened_detects_overspend(bg_stats):
    bad = replace(bg_stats, mean_cost=10 * bg_stats.mean_opened + 1)
    assert not cost_opened_check(bad, 2).passed


def test_break_bound_per_bin(bg_stats):
    results = break_bound_check(bg_stats, F(7071, 5000) / 50)
    assert len(results) == len(bg_stats.bin_open_freq)
    assert [r.name for r in results[:2]] == ["break_bound[0]", "break_bound[1]"]


def test_wald_bound_uses_first_bin(bg_stats):
    res = wald_bound_check(bg_stats, 200)
    assert res.rhs == pytest.approx(399 / bg_stats.mean_first_bin_items)
    assert res.passed
