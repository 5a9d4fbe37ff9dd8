import click

# every subcommand module appends its command here on import;
# app.create_app() adds them to the group
commands: list[click.Command] = []


def register(cmd: click.Command) -> click.Command:
    commands.append(cmd)
    return cmd


#  import command modules so they register themselves
from . import generate     # noqa: F401,E402
from . import simulate     # noqa: F401,E402
from . import exact        # noqa: F401,E402
from . import ptas         # noqa: F401,E402
from . import threshold    # noqa: F401,E402
from . import reduce       # noqa: F401,E402
