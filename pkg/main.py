"""
PruneLoop: reasoning with periodic self-pruning of the chain of thought.

This module provides the command-line interface: single episodes, benchmark
runs with resumable logs, synthesis and reward filtering of pruning training
data, and the KV-cache rotation check.
"""

from typing import Optional

import typer
from typing_extensions import Annotated

from commands.eval import evaluate
from commands.filter import filter_candidates
from commands.run import run
from commands.synthesize import synthesize
from commands.verify_kv import verify_kv
from config import load_config
from logger import logger, set_verbosity

app = typer.Typer()


def configure(
    ctx: typer.Context,
    config: Annotated[Optional[str], typer.Option(help="YAML config file.")] = None,
    backend: Annotated[Optional[str], typer.Option(help="Backend name: openai or simulated.")] = None,
    base_url: Annotated[Optional[str], typer.Option(help="OpenAI-compatible server URL.")] = None,
    reasoning_model: Annotated[Optional[str], typer.Option(help="Model id for reasoning requests.")] = None,
    cleaning_model: Annotated[Optional[str], typer.Option(help="Model id for cleaning requests.")] = None,
    seed: Annotated[Optional[int], typer.Option(help="Seed for the simulated backend.")] = None,
    l_clean: Annotated[Optional[int], typer.Option(help="Generated tokens between cleaning cycles.")] = None,
    max_iterations: Annotated[Optional[int], typer.Option(help="Cap on cleaning cycles per episode.")] = None,
    rollouts: Annotated[Optional[int], typer.Option(help="Rollouts per question (eval) or per context (filter).")] = None,
    sentinel: Annotated[Optional[str], typer.Option(help="Marker left where text was pruned.")] = None,
    verbose: Annotated[bool, typer.Option(help="Enable debug logging.")] = False,
):
    """Load the configuration shared by every command (defaults < file < flags)."""
    set_verbosity(verbose)

    overrides = {
        "backend": backend,
        "server.base_url": base_url,
        "server.reasoning_model_id": reasoning_model,
        "server.cleaning_model_id": cleaning_model,
        "seed": seed,
        "policy.l_clean": l_clean,
        "policy.max_cleaning_iterations": max_iterations,
        "rollouts": rollouts,
        "sentinel": sentinel,
    }
    try:
        ctx.obj = load_config(config, overrides)
    except ValueError as e:
        logger.error(str(e))
        raise typer.Exit(code=1)


app.callback()(configure)
app.command(help="Run one reasoning episode and print its transcript.")(run)
app.command(name="eval", help="Run a benchmark and report pass@1, #Token and deltas.")(evaluate)
app.command(help="Synthesize candidate pruning commands from trajectories.")(synthesize)
app.command(name="filter", help="Score candidates with rollouts and export the retained ones.")(filter_candidates)
app.command(name="verify-kv", help="Check KV-cache excision with key re-rotation.")(verify_kv)

if __name__ == "__main__":
    app()
