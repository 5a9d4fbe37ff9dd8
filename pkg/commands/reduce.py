from __future__ import annotations

import click

from commands import register
from commands.common import finish_report, new_report, out_dir_option
from errors import SolverCapacityError
from services.reduction import (
    constructive_policy_value,
    count_sat_bruteforce,
    reduction_instance,
    reduction_value,
    restricted_policy_search,
    symmetrize_2cnf,
)
from utils.cnf_reader import load_cnf
from utils.formatting import fmt_exact
from utils.instance_io import save_instance, save_reduction_sidecar


@register
@click.command("reduce")
@click.option("-f", "--formula", "cnf_path", metavar="<cnf>", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("-o", "--output", metavar="<path>", type=click.Path(dir_okay=False), default=None, help="Write the instance here.")
@click.option("--sidecar", metavar="<path>", type=click.Path(dir_okay=False), default=None, help="Item roles / digit blocks.")
@click.option("--search/--no-search", default=True, show_default=True, help="Run the exact oracles when small enough.")
@out_dir_option
@click.pass_context
def reduce_cmd(
    ctx: click.Context,
    cnf_path: str,
    output: str | None,
    sidecar: str | None,
    search: bool,
    out_dir: str | None,
) -> None:
    """Bin packing instance whose optimal cost encodes #SAT of a formula.

    2CNF input is symmetrized first; 4CNF input must already be symmetric.
    """
    phi = load_cnf(cnf_path)
    report = new_report(ctx, {"formula": cnf_path, "search": search})

    if phi.widths == {2}:
        phi = symmetrize_2cnf(phi)
        click.echo(f"symmetrized: {phi.n_vars} variables, {len(phi.clauses)} clauses")

    art = reduction_instance(phi)
    s = count_sat_bruteforce(phi)
    predicted = reduction_value(phi.n_vars, s)
    click.echo(f"satisfying assignments: {s}")
    click.echo(f"predicted optimum:      {fmt_exact(predicted)}")
    report.results = {"s_phi": s, "predicted": str(predicted), "n_items": art.instance.n}

    if search:
        try:
            searched = restricted_policy_search(art)
        except SolverCapacityError as e:
            click.secho(f"search skipped: {e}", fg="yellow", err=True)
        else:
            constructive = constructive_policy_value(art)
            click.echo(f"searched optimum:       {fmt_exact(searched)}")
            click.echo(f"constructive policy:    {fmt_exact(constructive)}")
            report.results["searched"] = str(searched)
            report.results["constructive"] = str(constructive)
            report.results["agree"] = searched == predicted == constructive

    if output:
        save_instance(art.instance, output)
        side = sidecar or output.rsplit(".", 1)[0] + ".roles.json"
        save_reduction_sidecar(art, side)
        click.echo(f"instance: {output}\nroles:    {side}")

    finish_report(report, out_dir, "reduce")
