from __future__ import annotations

import logging
import os

import click

from commands import register
from commands.common import finish_report, input_option, load, new_report, out_dir_option
from config import Config
from errors import BoundCheckFailed, InvalidParams
from models.distribution import FiniteDiscrete
from models.instance import Instance
from services.checks import self_check
from services.engine import monte_carlo
from services.exact import single_bin_optimal_curve
from services.policies import BudgetedGreedy, parse_policies, parse_policy
from utils.formatting import fmt_mean
from utils.reports import write_csv

logger = logging.getLogger(f"packlab.{__name__}")

REF_EXACT = "exact_single_bin"
REF_FLOAT = "single_bin_float"
REF_PROXY = "proxy_n_over_C_plus_1"


def parse_prefixes(raw: str | None, n: int) -> list[int]:
    if not raw:
        return [n]
    try:
        ks = sorted({int(k) for k in raw.split(",") if k.strip()})
    except ValueError as e:
        raise click.BadParameter(f"prefix list {raw!r} is not a list of integers") from e
    bad = [k for k in ks if not 1 <= k <= n]
    if bad:
        raise InvalidParams(f"prefix lengths {bad} outside 1..{n}")
    return ks


def auto_reference(instance: Instance, prefixes: list[int]) -> tuple[str, dict[int, float]]:
    """Single-bin optimum for i.i.d. discrete items, else n/C + 1."""
    d = instance.items[0]
    n = max(prefixes)
    if instance.is_iid and isinstance(d, FiniteDiscrete):
        exact = n <= Config.EXACT_SINGLE_BIN_MAX_N
        if not exact:
            logger.warning("single-bin reference for n=%d computed in floating point", n)
        curve = single_bin_optimal_curve(d, n, instance.penalty, instance.capacity, exact=exact)
        return (REF_EXACT if exact else REF_FLOAT), {k: float(curve[k]) for k in prefixes}

    logger.warning("no exact reference for this instance; using n/C + 1")
    return REF_PROXY, {k: k / float(instance.penalty) + 1.0 for k in prefixes}


def _gamma_applies(policy, instance: Instance):
    # the budget checks need every item's own overflow risk within gamma / C
    if not isinstance(policy, BudgetedGreedy):
        return None
    budget = float(policy.gamma) / float(instance.penalty)
    if all(float(d.overflow_prob(0, instance.capacity)) <= budget for d in instance.items):
        return policy.gamma
    return None


@register
@click.command("simulate")
@input_option
@click.option("-p", "--policies", "policy_specs", metavar="<spec,...>", required=True, help="e.g. bg:1.4142,fg,tg:0.4")
@click.option("--trials", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--prefix-sweep", "prefix_sweep", metavar="<k1,k2,...>", default=None)
@click.option("--ref", "ref", default="auto", show_default=True, help="auto, or a policy spec simulated as the reference")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes (default: PACKLAB_WORKERS).")
@click.option("--self-check", "self_check_flag", is_flag=True, help="Run the bound checks; exit 4 on failure.")
@out_dir_option
@click.pass_context
def simulate_cmd(
    ctx: click.Context,
    input_path: str,
    policy_specs: str,
    trials: int,
    seed: int,
    prefix_sweep: str | None,
    ref: str,
    workers: int | None,
    self_check_flag: bool,
    out_dir: str | None,
) -> None:
    """Monte Carlo evaluation of policies on instance prefixes."""
    instance = load(input_path)
    policies = parse_policies(policy_specs)
    prefixes = parse_prefixes(prefix_sweep, instance.n)

    report = new_report(
        ctx,
        {"input": input_path, "policies": policy_specs, "trials": trials, "prefixes": prefixes, "ref": ref},
        seed=seed,
    )

    if ref == "auto":
        ref_name, ref_cost = auto_reference(instance, prefixes)
    else:
        ref_policy = parse_policy(ref)
        ref_name = ref_policy.name
        ref_cost = {
            k: monte_carlo(instance.prefix(k), ref_policy, trials, seed, workers=workers).mean_cost for k in prefixes
        }
    report.reference = ref_name

    rows = []
    final = {}
    for k in prefixes:
        inst = instance.prefix(k)
        for pol in policies:
            stats = monte_carlo(inst, pol, trials, seed, workers=workers)
            rc = ref_cost[k]
            rows.append(
                {
                    "prefix": k,
                    "policy": pol.name,
                    "mean_cost": stats.mean_cost,
                    "stderr": stats.stderr,
                    "mean_opened": stats.mean_opened,
                    "mean_broken": stats.mean_broken,
                    "ref_cost": rc,
                    "ratio": stats.mean_cost / rc if rc else float("nan"),
                }
            )
            click.echo(f"n={k:<8} {pol.name:<12} cost {fmt_mean(stats.mean_cost, stats.stderr)}  ratio {rows[-1]['ratio']:.4g}")
            if k == prefixes[-1]:
                final[pol.name] = stats

    report.rows = rows
    report.results = {name: s.as_row() for name, s in final.items()}

    csv_path = os.path.join(out_dir or Config.OUTPUT_DIR, "simulate.csv")
    write_csv(rows, csv_path)
    click.echo(f"csv: {csv_path}")

    failed = []
    if self_check_flag:
        inst = instance.prefix(prefixes[-1])
        for pol in policies:
            gamma = _gamma_applies(pol, inst)
            results = self_check(
                final[pol.name],
                gamma=gamma,
                penalty=inst.penalty,
                n=inst.n if inst.is_iid else None,
            )
            for r in results:
                report.checks.append({"policy": pol.name, **r.as_dict()})
                if not r.passed:
                    failed.append(f"{pol.name}: {r.name} ({r.lhs:.6g} > {r.rhs:.6g} + {r.slack:.3g})")
        click.echo(f"self-check: {len(report.checks) - len(failed)}/{len(report.checks)} passed")

    finish_report(report, out_dir, "simulate")
    if failed:
        raise BoundCheckFailed("; ".join(failed))
