import sys

import click

from config import Config
from errors import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, PackLabError
from extensions import configure_logging


def create_app() -> click.Group:
    @click.group(context_settings=dict(help_option_names=["-h", "--help"]))
    @click.option("--log-level", default=None, help=f"Logging level (default {Config.LOG_LEVEL}).")
    @click.pass_context
    def cli(ctx: click.Context, log_level: str | None) -> None:
        """Policy laboratory for stochastic bin packing with overflow penalties."""
        configure_logging(log_level or Config.LOG_LEVEL)
        ctx.ensure_object(dict)

    # import and register subcommands
    from commands import commands

    for cmd in commands:
        cli.add_command(cmd)

    return cli


def run_cli(argv: list[str] | None = None) -> int:
    """Run one command line; returns the process exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    cli = create_app()
    try:
        rv = cli.main(args=argv, prog_name="packlab", standalone_mode=False, obj={"argv": argv})
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE if isinstance(e, click.UsageError) else EXIT_FAILURE
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_FAILURE
    except PackLabError as e:
        # solver errors are shown verbatim
        click.secho(f"{type(e).__name__}: {e}", fg="red", err=True)
        return e.exit_code
    return rv if isinstance(rv, int) else EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
