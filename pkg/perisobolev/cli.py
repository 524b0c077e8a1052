"""
Command-line interface for perisobolev.

Every numerical command reads a configuration file (or a named preset) and
writes its JSON summary and CSV tables to the output directory.
"""

from typing import Optional
import json
import logging
import sys

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .config import RunConfig, parse_config
from .errors import ConfigError
from .presets import PRESETS, list_presets, load_preset, preset_text
from .runner import EXIT_CONFIG, run
from .settings import LOG_DATEFORMAT, LOG_FORMAT, LOG_LEVEL

console = Console(stderr=True)


def configure_logging(verbose: bool = False):
    """Route package logs through rich; DEBUG when verbose."""
    level = logging.DEBUG if verbose else getattr(logging, LOG_LEVEL)
    handler = RichHandler(console=console, show_path=False, markup=False)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFORMAT))
    root = logging.getLogger('perisobolev')
    root.handlers = [handler]
    root.setLevel(level)
    root.propagate = False


def _load(command: str, config_path: Optional[str], sweep: Optional[str]) -> RunConfig:
    if config_path and sweep:
        raise ConfigError(["Use either --config or --sweep, not both"])
    if sweep:
        return load_preset(sweep, command)
    if not config_path:
        raise ConfigError(["A configuration file (--config) or a preset (--sweep) is required"])
    config = parse_config(config_path)
    if config.command != command:
        raise ConfigError([f"[run] command: file is for '{config.command}', not '{command}'"],
                          config_path)
    return config


def _execute(command: str, config_path: Optional[str], sweep: Optional[str],
             out: str, threads: Optional[int], verbose: bool):
    configure_logging(verbose)
    try:
        config = _load(command, config_path, sweep)
    except ConfigError as e:
        click.echo(f"❌ {e}", err=True)
        for message in e.errors:
            click.echo(f"  - {message}", err=True)
        sys.exit(EXIT_CONFIG)

    config.out = out
    if threads is not None:
        config.threads = threads

    click.echo(f"🚀 Running {command} (digest {config.digest[:12]})", err=True)
    code = run(config)
    if code == 0:
        click.echo(f"✅ {command} finished; outputs in {out}", err=True)
    elif code == 1:
        click.echo(f"⚠️  {command} finished but a check failed; see {out}/{command}.json", err=True)
    elif code == 2:
        click.echo(f"❌ {command}: invalid input", err=True)
    else:
        click.echo(f"❌ {command}: numerical failure", err=True)
    sys.exit(code)


def run_options(func):
    """Options shared by every numerical command."""
    func = click.option('--verbose', '-v', is_flag=True, help='Log every iteration')(func)
    func = click.option('--threads', '-t', type=click.IntRange(min=1),
                        help='Worker threads (never changes results)')(func)
    func = click.option('--out', '-o', type=click.Path(file_okay=False), default='.',
                        show_default=True, help='Output directory')(func)
    func = click.option('--sweep', '-s', 'sweep', help='Named preset instead of a file')(func)
    func = click.option('--config', '-c', 'config_path', type=click.Path(exists=True, dir_okay=False),
                        help='Configuration file')(func)
    return func


@click.group()
@click.version_option(version=__version__)
def main():
    """
    perisobolev - Peridynamic and fractional Sobolev energies

    Evaluate nonlocal energies, check their local limits and solve the
    associated Dirichlet and eigenvalue problems.
    """
    pass


def _make_command(name: str, doc: str):
    @run_options
    def command(config_path, sweep, out, threads, verbose):
        _execute(name, config_path, sweep, out, threads, verbose)
    command.__doc__ = doc
    return main.command(name=name)(command)


_make_command('norms', """
    Modular and Luxemburg norm of a test function.

    Example:

        perisobolev norms --config norms.ini --out results
    """)
_make_command('seminorm', """
    Directional seminorms and energies in every direction.
    """)
_make_command('bbm', """
    delta -> 0 or s -> 1 sweep against the local limit.

    Examples:

        perisobolev bbm --sweep bbm_gaussian

        perisobolev bbm --config sweep.ini --threads 4
    """)
_make_command('gamma', """
    Energies along a recovery sequence of vanishing horizons.
    """)
_make_command('solve', """
    Dirichlet problem for the peridynamic anisotropic p-Laplacian.

    Example:

        perisobolev solve --sweep dirichlet_p2 --out results
    """)
_make_command('eigen', """
    First eigenvalue of the homogeneous nonlocal Rayleigh quotient.
    """)
_make_command('check', """
    Property checks (regularization, a-priori bounds, condition P).
    """)


@main.command()
@click.argument('name', required=False)
def presets(name: Optional[str]):
    """
    List the named presets, or print one as a configuration file.
    """
    if name:
        try:
            click.echo(preset_text(name))
        except ConfigError as e:
            click.echo(f"❌ {e.errors[0]}", err=True)
            sys.exit(EXIT_CONFIG)
        return

    table = Table(title="📚 Presets")
    table.add_column("name")
    table.add_column("command")
    table.add_column("description")
    for key in list_presets():
        preset = PRESETS[key]
        table.add_row(key, preset['sections']['run']['command'], preset['description'])
    Console().print(table)
    click.echo("\nUsage: perisobolev <command> --sweep <name>")


@main.command()
def schema():
    """
    Display the JSON schema for configuration files.
    """
    from .schema import CONFIG_SCHEMA

    click.echo(json.dumps(CONFIG_SCHEMA, indent=2))


if __name__ == '__main__':
    main()
