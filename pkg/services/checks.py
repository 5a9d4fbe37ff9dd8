"""Statistical bound checks on Monte Carlo output.

Each check compares a simulated quantity (lhs) with the bound it should
respect (rhs), allowing `sigmas` standard errors of slack.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

from models.packing import MonteCarloStats

logger = logging.getLogger(f"packlab.{__name__}")

SIGMAS = 4.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _result(name: str, lhs: float, rhs: float, slack: float) -> CheckResult:
    res = CheckResult(name=name, lhs=float(lhs), rhs=float(rhs), slack=float(slack), passed=lhs <= rhs + slack)
    if not res.passed:
        logger.warning("check %s failed: %.6g > %.6g + %.6g", name, lhs, rhs, slack)
    return res


def risk_identity_check(stats: MonteCarloStats, sigmas: float = SIGMAS) -> CheckResult:
    # expected broken bins == expected summed risk; both from the same episodes
    return _result("risk_identity", abs(stats.risk_gap_mean), 0.0, sigmas * stats.risk_gap_stderr)


def size_bound_check(stats: MonteCarloStats, sigmas: float = SIGMAS) -> list[CheckResult]:
    """Per bin j: E[sum of min(X, cap) over bin j] <= 2 P(bin j opened)."""
    out = []
    for j, (tr, op, se) in enumerate(zip(stats.bin_mean_trunc, stats.bin_open_freq, stats.bin_size_gap_stderr)):
        out.append(_result(f"size_bound[{j}]", tr, 2 * op, sigmas * se))
    return out


def aggregate_size_check(stats: MonteCarloStats, sigmas: float = SIGMAS) -> CheckResult:
    # E[sum_i min(X_i, cap)] <= cost
    return _result("aggregate_size", stats.size_gap_mean, 0.0, sigmas * stats.size_gap_stderr)


def break_bound_check(stats: MonteCarloStats, budget: float, sigmas: float = SIGMAS) -> list[CheckResult]:
    """Per bin j: P(bin j breaks) <= budget * P(bin j opened), budget = gamma / C.

    Only meaningful when every item has P(X > cap) <= budget.
    """
    budget = float(budget)
    out = []
    for j, (bf, of, bse, ose) in enumerate(
        zip(stats.bin_break_freq, stats.bin_open_freq, stats.bin_break_stderr, stats.bin_open_stderr)
    ):
        out.append(_result(f"break_bound[{j}]", bf, budget * of, sigmas * (bse + budget * ose)))
    return out


def cost_opened_check(stats: MonteCarloStats, gamma: float, sigmas: float = SIGMAS) -> CheckResult:
    gamma = float(gamma)
    slack = sigmas * (stats.stderr + (1 + gamma) * stats.opened_stderr)
    return _result("cost_opened", stats.mean_cost, (1 + gamma) * stats.mean_opened, slack)


def wald_bound_check(stats: MonteCarloStats, n: int, sigmas: float = SIGMAS) -> CheckResult:
    """E[bins opened] <= (2n - 1) / E[items in the first bin] (i.i.d. items)."""
    m = stats.mean_first_bin_items
    lo = max(m - sigmas * stats.first_bin_items_stderr, 1.0)
    # the bound is decreasing in E|B_1|, so its slack comes from the lower end
    rhs = (2 * n - 1) / m
    slack = (2 * n - 1) / lo - rhs + sigmas * stats.opened_stderr
    return _result("wald_bound", stats.mean_opened, rhs, slack)


def self_check(stats: MonteCarloStats, *, gamma=None, penalty=None, n: int | None = None) -> list[CheckResult]:
    """The checks that apply to a run: always the policy-free identities,
    and the budget checks when the run was a Budgeted Greedy with gamma."""
    out = [risk_identity_check(stats), aggregate_size_check(stats)]
    out += size_bound_check(stats)
    if gamma is not None and penalty is not None:
        out += break_bound_check(stats, float(gamma) / float(penalty))
        out.append(cost_opened_check(stats, gamma))
        if n is not None:
            out.append(wald_bound_check(stats, n))
    return out
