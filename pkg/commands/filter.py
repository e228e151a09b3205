from typing import Optional

import typer
from typing_extensions import Annotated
from tqdm import tqdm

from evaluation import dump_models, read_jsonl, write_jsonl_atomic
from logger import logger
from rewards import CandidateInstance, export_instances, filter_retain, score_and_mark


def filter_candidates(
    ctx: typer.Context,
    candidates: Annotated[str, typer.Argument(help="Candidate file written by the synthesize command.")],
    output: Annotated[
        str,
        typer.Option(help="Training-instance file for the retained candidates."),
    ] = "train.jsonl",
    scored_output: Annotated[
        str,
        typer.Option(help="Also write every candidate with its accuracies to this file."),
    ] = "",
    min_acc: Annotated[
        Optional[float],
        typer.Option(help="Additionally require the pruned context's accuracy to reach this value."),
    ] = None,
):
    """
    Score every candidate with rollouts (k from the global --rollouts) on the raw
    and the pruned context and export those whose accuracy does not drop.

    Example usage:
        python main.py --backend simulated --rollouts 8 filter candidates.jsonl --output train.jsonl
    """
    config = ctx.obj

    try:
        pool = read_jsonl(candidates, CandidateInstance)
        template = config.cleaning_template()
        solver = config.make_backend()
    except ValueError as e:
        logger.error(str(e))
        raise typer.Exit(code=1)

    logger.info(f"Scoring {len(pool)} candidate(s) with {config.rollouts} rollouts per context...")
    scored = [
        score_and_mark(
            inst,
            solver,
            config.rollouts,
            params=config.reasoning,
            reasoning_template=config.reasoning_template,
            instruction=config.instruction,
        )
        for inst in tqdm(pool, desc="Candidates")
    ]

    if scored_output:
        write_jsonl_atomic(scored_output, dump_models(scored))
        logger.info(f"Scored candidates saved to {scored_output}")

    retained = [inst for inst in scored if filter_retain(inst, min_acc)]
    written = export_instances(retained, output, template)
    logger.info(f"Retained {len(retained)} of {len(scored)} candidate(s); {written} instance(s) written to {output}")
