import logging
import sys
from typing import Optional

import click

from eqbn import __version__
from eqbn.cli.cover import cover_verify
from eqbn.cli.jet import jet_check
from eqbn.cli.orbifold import orbifold_index
from eqbn.cli.rep import rep_decompose
from eqbn.cli.suite import suite
from eqbn.cli.wendl import wendl_certify
from eqbn.config import DEFAULT_CONFIG_HASH, config_hash, get_settings


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Defaults to EQBN_LOG_LEVEL.",
)
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Suite threads.")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], workers: Optional[int]) -> None:
    """Exact checks for equivariant Brill–Noether machinery."""
    settings = get_settings()
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["workers"] = workers or settings.workers


@cli.command()
def version() -> None:
    """Print the version and configuration hashes."""
    settings = get_settings()
    click.echo(f"eqbn {__version__}")
    click.echo(f"config_hash {config_hash(settings)}")
    click.echo(f"default_config_hash {DEFAULT_CONFIG_HASH}")


cli.add_command(wendl_certify)
cli.add_command(orbifold_index)
cli.add_command(rep_decompose)
cli.add_command(cover_verify)
cli.add_command(jet_check)
cli.add_command(suite)
