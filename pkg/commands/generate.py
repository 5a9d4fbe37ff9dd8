from __future__ import annotations

import logging

import click

from commands import register
from errors import InvalidParams
from models.distribution import to_rational
from services.generators import GENERATORS, gen_named
from utils.instance_io import save_instance

logger = logging.getLogger(f"packlab.{__name__}")

# integer-valued family parameters; everything else is read as a rational
_INT_PARAMS = {"n", "n1"}


def parse_params(args: list[str]) -> dict:
    """`--key value` pairs from the leftover command line."""
    params: dict = {}
    it = iter(args)
    for tok in it:
        if not tok.startswith("--"):
            raise click.UsageError(f"expected --<param> <value>, got {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            value = next(it, None)
            if value is None:
                raise click.UsageError(f"--{key} needs a value")
        try:
            params[key] = int(value) if key in _INT_PARAMS else to_rational(value)
        except ValueError as e:
            raise InvalidParams(f"--{key}: cannot read {value!r}") from e
    return params


@register
@click.command(
    "generate",
    context_settings=dict(ignore_unknown_options=True, allow_extra_args=True),
)
@click.argument("name", type=click.Choice(sorted(GENERATORS)))
@click.option("-o", "--output", metavar="<path>", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def generate_cmd(ctx: click.Context, name: str, output: str) -> None:
    """Write instance NAME with family parameters (--n 1000 --C 50 ...)."""
    params = parse_params(ctx.args)
    instance = gen_named(name, params)
    save_instance(instance, output)
    logger.info("generated %s with %s", name, params)
    click.echo(f"{name}: {instance.n} items, C={instance.penalty} -> {output}")
