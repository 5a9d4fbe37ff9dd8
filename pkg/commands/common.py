from __future__ import annotations

import os
import time

import click

from config import Config
from errors import EXIT_SOLVER_CAPACITY, EXIT_USAGE
from models.instance import Instance
from services.validation import is_too_large, validate_instance_before_solve
from utils.instance_io import load_instance
from utils.reports import RunReport, write_report

input_option = click.option(
    "-i",
    "--input",
    "input_path",
    metavar="<path>",
    type=click.Path(exists=True, dir_okay=False),
    required=True,
    help="Instance JSON file.",
)

out_dir_option = click.option(
    "--out-dir",
    metavar="<dir>",
    type=click.Path(file_okay=False),
    default=None,
    help="Where reports go (default: PACKLAB_OUTPUT_DIR).",
)


def load(path: str) -> Instance:
    return load_instance(path)


def precheck(ctx: click.Context, instance: Instance, mode: str) -> None:
    """Print pre-solve hints and stop before any solver starts."""
    hints = validate_instance_before_solve(instance, mode)
    if not hints:
        return
    for h in hints:
        click.secho(f"  - {h}", fg="yellow", err=True)
    ctx.exit(EXIT_SOLVER_CAPACITY if is_too_large(hints) else EXIT_USAGE)


def new_report(ctx: click.Context, params: dict, seed: int | None = None) -> RunReport:
    obj = ctx.find_root().obj or {}
    report = RunReport(command=list(obj.get("argv") or []), params=params, seed=seed)
    report.wall_clock = time.perf_counter()
    return report


def finish_report(report: RunReport, out_dir: str | None, stem: str) -> str:
    report.wall_clock = round(time.perf_counter() - report.wall_clock, 3)
    path = os.path.join(out_dir or Config.OUTPUT_DIR, f"{stem}.json")
    write_report(report, path)
    click.echo(f"report: {path}")
    return path
