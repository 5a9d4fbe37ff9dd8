from __future__ import annotations

import click

from commands import register
from commands.common import finish_report, input_option, load, new_report, out_dir_option, precheck
from services.exact import optimal_cost_dp
from services.ptas import discretize_instance, make_params, ptas_dp, track_monte_carlo
from utils.formatting import fmt_exact, fmt_mean, json_number
from utils.instance_io import save_action_table


@register
@click.command("ptas")
@input_option
@click.option("--eps", metavar="<eps>", required=True, help="Accuracy, e.g. 0.3 or 3/10.")
@click.option("--grid", metavar="<g>", default=None, help="Size grid (default eps^5); must be <= eps^4.")
@click.option("--track", is_flag=True, help="Simulate the tracking policy on the original items.")
@click.option("--trials", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--compare", is_flag=True, help="Also compute the exact optimum at capacity 1.")
@click.option("--save-table", metavar="<path>", type=click.Path(dir_okay=False), default=None)
@out_dir_option
@click.pass_context
def ptas_cmd(
    ctx: click.Context,
    input_path: str,
    eps: str,
    grid: str | None,
    track: bool,
    trials: int,
    seed: int,
    workers: int | None,
    compare: bool,
    save_table: str | None,
    out_dir: str | None,
) -> None:
    """Discretize, solve the level DP in bins of 1 + 4 eps, optionally track."""
    instance = load(input_path)
    precheck(ctx, instance, "ptas")
    params = make_params(eps, grid)
    report = new_report(ctx, {"input": input_path, **params.as_dict(), "track": track, "trials": trials}, seed=seed)

    hat = discretize_instance(instance, params)
    value, table = ptas_dp(hat, params)
    click.echo(f"discretized optimum (cap 1+4eps): {fmt_exact(value)}  [{len(table)} states]")
    report.results = {"ptas_dp": json_number(value), "states": len(table)}

    if compare:
        opt, _ = optimal_cost_dp(instance)
        click.echo(f"exact optimum (cap 1):            {fmt_exact(opt)}")
        click.echo(f"ratio:                            {float(value / opt):.6g}")
        report.results["optimal_cost"] = json_number(opt)

    if track:
        stats = track_monte_carlo(table, instance, params, trials, seed, workers=workers)
        click.echo(f"tracked cost (cap 1+6eps):        {fmt_mean(stats.mean_cost, stats.stderr)}")
        report.results["tracked"] = stats.as_row()
        report.results["source_open_freq"] = list(stats.source_open_freq)
        report.results["source_copy_mean"] = list(stats.source_copy_mean)

    if save_table:
        save_action_table(table, save_table)
        click.echo(f"actions: {save_table}")

    finish_report(report, out_dir, "ptas")
