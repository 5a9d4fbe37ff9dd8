from __future__ import annotations

import click
import numpy as np

from commands import register
from commands.common import finish_report, input_option, load, new_report, out_dir_option, precheck
from config import Config
from services.mdp import build_state_space, extract_threshold, solve_lp, value_iteration


@register
@click.command("threshold")
@input_option
@click.option("--discount", type=float, default=None, help=f"Discount in (0, 1) (default {Config.MDP_DISCOUNT}).")
@click.option("--tol", type=float, default=None, help=f"Bellman residual target (default {Config.MDP_TOL}).")
@click.option("--lp", "with_lp", is_flag=True, help="Cross-check the values with the LP formulation.")
@out_dir_option
@click.pass_context
def threshold_cmd(
    ctx: click.Context,
    input_path: str,
    discount: float | None,
    tol: float | None,
    with_lp: bool,
    out_dir: str | None,
) -> None:
    """Threshold alpha of the single-bin MDP for i.i.d. discrete items."""
    instance = load(input_path)
    precheck(ctx, instance, "threshold")
    report = new_report(ctx, {"input": input_path, "discount": discount, "tol": tol})

    space = build_state_space(instance.items[0], instance.capacity)
    table = value_iteration(space, instance.penalty, discount, tol)
    alpha = extract_threshold(table, space)

    click.echo(f"alpha = {alpha} ({float(alpha):.6g})")
    click.echo(f"states = {space.size}, iterations = {table.iterations}, residual = {table.residual:.3g}")
    report.results = {
        "alpha": str(alpha),
        "n_states": space.size,
        "iterations": table.iterations,
        "residual": table.residual,
    }

    if with_lp:
        V_lp = solve_lp(space, instance.penalty, table.discount)
        gap = float(np.max(np.abs(V_lp - table.V)))
        click.echo(f"LP vs value iteration: max |dV| = {gap:.3g}")
        report.results["lp_gap"] = gap

    finish_report(report, out_dir, "threshold")
