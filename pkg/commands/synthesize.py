import typer
from typing_extensions import Annotated
from tqdm import tqdm

from evaluation import dump_models, load_trajectories, write_jsonl_atomic
from logger import logger
from pruning import resolve_guard
from rewards import synthesize_sequential


def synthesize(
    ctx: typer.Context,
    trajectories: Annotated[
        str,
        typer.Argument(help="Trajectory file, one {question, gold_answer, cot_text, source_id} record per line."),
    ],
    output: Annotated[
        str,
        typer.Option(help="Candidate file to write (input of the filter command)."),
    ] = "candidates.jsonl",
    chunk_tokens: Annotated[
        int,
        typer.Option(help="Chunk size in estimated tokens."),
    ] = 1000,
    guard: Annotated[
        str,
        typer.Option(help="Paragraph guard preset applied inside each chunk (default, none)."),
    ] = "none",
):
    """
    Ask the cleaning backend for pruning commands over each trajectory, chunk by
    chunk, each time conditioned on the already cleaned history.

    Example usage:
        python main.py --backend simulated synthesize data/trajectories.jsonl --output candidates.jsonl
    """
    config = ctx.obj

    try:
        guard_policy = resolve_guard(guard)
        corpus = load_trajectories(trajectories)
        template = config.cleaning_template()
        oracle = config.make_backend()
    except ValueError as e:
        logger.error(str(e))
        raise typer.Exit(code=1)

    logger.info(f"Synthesizing candidates from {len(corpus)} trajectories in {chunk_tokens}-token chunks...")
    candidates = []
    for traj in tqdm(corpus, desc="Trajectories"):
        candidates.extend(
            synthesize_sequential(traj, oracle, template, chunk_tokens, guard_policy, config.cleaning)
        )

    written = write_jsonl_atomic(output, dump_models(candidates))
    logger.info(f"{written} candidate(s) written to {output}")
