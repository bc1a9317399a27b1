from __future__ import annotations

import logging
import sys
from typing import Optional

import click
from dotenv import load_dotenv
load_dotenv()

from treedecomp.config import settings
from treedecomp.commands.catalog import cmd_label, cmd_label_file, cmd_trees
from treedecomp.commands.decomposition import cmd_decompose, cmd_eggleton, cmd_verify
from treedecomp.commands.feasibility import cmd_feasibility
from treedecomp.commands.outcome import CommandOutcome
from treedecomp.services.cache import open_cache


def _emit(outcome: CommandOutcome, machine: bool = False) -> None:
    text = outcome.machine_report if machine and outcome.machine_report is not None else outcome.human_report
    if text:
        click.echo(text.rstrip("\n"))
    if outcome.diagnostic:
        click.echo(outcome.diagnostic, err=True)
    sys.exit(outcome.exit_code)


LOG_LEVELS = ["debug", "info", "warning", "error", "critical"]

machine_option = click.option("--machine", is_flag=True, help="Write the structured document to stdout instead of a table.")
budget_option = click.option("--budget", type=int, default=None, help="Node expansions per tree search (default TREEDECOMP_SEARCH_BUDGET).")
cache_option = click.option("--cache/--no-cache", default=None, help="Reuse labelings from the local SQLite cache.")


def _cache_enabled(flag: Optional[bool]) -> bool:
    return settings.cache_enabled if flag is None else flag


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Logging level for diagnostics on stderr.",
)
def cli(log_level: Optional[str]) -> None:
    """Free trees, graceful and semigraceful labelings, and cyclic multigraph decompositions."""
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


@cli.command()
@click.option("--order", type=int, required=True)
@click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None, help="Write the catalog document here.")
@click.option("--max-order", type=int, default=None, help="Override the largest enumerated order.")
@click.option("--edge-list-dir", type=click.Path(file_okay=False), default=None, help="Also write one edge-list file per tree here.")
@machine_option
def trees(order: int, output_path: Optional[str], max_order: Optional[int], edge_list_dir: Optional[str], machine: bool) -> None:
    """Enumerate the free trees of one order."""
    _emit(cmd_trees(order, output_path, max_order, edge_list_dir), machine)


@cli.command()
@click.option("--order", type=int, default=None)
@click.option("--tree-file", type=click.Path(dir_okay=False), default=None, help="Label one tree read from an edge-list file instead.")
@click.option("--mode", type=click.Choice(["graceful", "semigraceful"]), required=True)
@budget_option
@cache_option
@machine_option
def label(order: Optional[int], tree_file: Optional[str], mode: str, budget: Optional[int], cache: Optional[bool], machine: bool) -> None:
    """Find and verify one labeling per tree of the given order, or for one tree file."""
    if (order is None) == (tree_file is None):
        raise click.UsageError("give exactly one of --order and --tree-file")
    with open_cache(_cache_enabled(cache)) as db:
        outcome = cmd_label(order, mode, budget, db) if tree_file is None else cmd_label_file(tree_file, mode, budget, db)
    _emit(outcome, machine)


@cli.command()
@click.option("--order", type=int, required=True)
@click.option("--family", is_flag=True, help="Decompose K_p^(2 tau(p)) into copies of the whole family.")
@click.option("--tree-index", type=int, default=None, help="Decompose K_p^(2) into rotations of one catalog tree.")
@click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None)
@budget_option
@cache_option
@machine_option
def decompose(order: int, family: bool, tree_index: Optional[int], output_path: Optional[str], budget: Optional[int], cache: Optional[bool], machine: bool) -> None:
    """Build, verify and write a decomposition certificate."""
    with open_cache(_cache_enabled(cache)) as db:
        outcome = cmd_decompose(order, family, tree_index, output_path, budget, db)
    _emit(outcome, machine)


@cli.command()
@click.argument("certificate_path", type=click.Path(dir_okay=False))
@machine_option
def verify(certificate_path: str, machine: bool) -> None:
    """Re-check a certificate from its contents alone."""
    _emit(cmd_verify(certificate_path), machine)


@cli.command()
@click.option("--order", type=int, default=None)
@click.option("--tau", type=int, default=None, help="Number of trees of the order; computed when omitted.")
@click.option("--table", is_flag=True, help="Print the gcd table for odd orders up to 15.")
@machine_option
def feasibility(order: Optional[int], tau: Optional[int], table: bool, machine: bool) -> None:
    """Least copy count and edge multiplicity allowed by edge counting."""
    _emit(cmd_feasibility(order, tau, table), machine)


@cli.command()
@click.option("--output-dir", type=click.Path(file_okay=False), default=None)
@budget_option
@cache_option
def eggleton(output_dir: Optional[str], budget: Optional[int], cache: Optional[bool]) -> None:
    """Decompose K_5^(6) and K_7^(22) into copies of their tree families."""
    with open_cache(_cache_enabled(cache)) as db:
        outcome = cmd_eggleton(output_dir, budget, db)
    _emit(outcome)


if __name__ == "__main__":
    cli()
