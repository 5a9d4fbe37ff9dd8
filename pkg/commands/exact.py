from __future__ import annotations

import click

from commands import register
from commands.common import finish_report, input_option, load, new_report, out_dir_option, precheck
from config import Config
from models.distribution import to_rational
from services.exact import min_opened_budgeted, optimal_cost_dp, single_bin_optimal_iid
from services.policies import DpPolicy
from services.policy_tree import build_policy_tree, eval_policy_tree
from services.validation import validate_instance_before_solve
from utils.formatting import fmt_exact, json_number
from utils.instance_io import save_action_table


@register
@click.command("exact")
@input_option
@click.option("--single-bin", "single_bin", is_flag=True, help="Best one-bin-at-a-time policy (i.i.d. items).")
@click.option("--budgeted", "gamma", metavar="<gamma>", default=None, help="Min expected opened bins under budget gamma/C.")
@click.option("--save-table", metavar="<path>", type=click.Path(dir_okay=False), default=None)
@out_dir_option
@click.pass_context
def exact_cmd(
    ctx: click.Context,
    input_path: str,
    single_bin: bool,
    gamma: str | None,
    save_table: str | None,
    out_dir: str | None,
) -> None:
    """Exact offline optimum of a small discrete instance."""
    if single_bin and gamma is not None:
        raise click.UsageError("--single-bin and --budgeted are exclusive")

    instance = load(input_path)
    report = new_report(ctx, {"input": input_path, "single_bin": single_bin, "budgeted": gamma})

    if single_bin:
        precheck(ctx, instance, "single_bin")
        exact = instance.n <= Config.EXACT_SINGLE_BIN_MAX_N
        value = single_bin_optimal_iid(instance.items[0], instance.n, instance.penalty, instance.capacity, exact=exact)
        click.echo(f"single-bin optimum: {fmt_exact(value)}")
        report.results = {"single_bin": json_number(value), "exact": exact}

    elif gamma is not None:
        precheck(ctx, instance, "budgeted")
        value = min_opened_budgeted(instance, to_rational(gamma))
        click.echo(f"min opened bins (gamma={gamma}): {fmt_exact(value)}")
        report.results = {"min_opened_budgeted": json_number(value)}

    else:
        precheck(ctx, instance, "exact")
        value, table = optimal_cost_dp(instance)
        click.echo(f"optimal cost: {fmt_exact(value)}")
        report.results = {"optimal_cost": json_number(value), "states": len(table)}

        # replay the optimal actions as an explicit tree when it is small enough
        if not validate_instance_before_solve(instance, "tree"):
            tree = build_policy_tree(instance, DpPolicy(table))
            tree_value = eval_policy_tree(tree, instance)
            click.echo(f"policy tree:  {fmt_exact(tree_value)} ({tree.leaf_count()} leaves)")
            report.results["policy_tree"] = json_number(tree_value)

        if save_table:
            save_action_table(table, save_table)
            click.echo(f"actions: {save_table}")

    finish_report(report, out_dir, "exact")
