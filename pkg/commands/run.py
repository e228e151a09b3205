import json

import typer
from typing_extensions import Annotated

from evaluation import build_reasoning_prompt, check_answer, extract_boxed
from logger import logger
from orchestrator import run_episode


def run(
    ctx: typer.Context,
    question: Annotated[str, typer.Argument(help="Question text to reason about.")],
    gold: Annotated[
        str,
        typer.Option(help="Reference answer; when given, the boxed answer is checked against it."),
    ] = "",
    output: Annotated[
        str,
        typer.Option(help="Write the full episode record as JSON to this file."),
    ] = "",
    show_text: Annotated[
        bool,
        typer.Option(help="Print the final generated text after the transcript."),
    ] = False,
):
    """
    Run a single reasoning episode and print its transcript.

    Example usage:
        python main.py --backend simulated run "What is 2 + 2?"
        python main.py --l-clean 3000 run "..." --gold 4 --output episode.json
    """
    config = ctx.obj

    try:
        template = config.cleaning_template()
        backend = config.make_backend()
    except ValueError as e:
        logger.error(str(e))
        raise typer.Exit(code=1)

    logger.info(f"Reasoning with {config.server.reasoning_model_id} via the {config.backend} backend...")
    record = run_episode(
        build_reasoning_prompt(question, config.reasoning_template, config.instruction),
        config.policy,
        config.reasoning,
        backend,
        template,
        question_id="cli",
        cleaning_params=config.cleaning,
        guard=config.guard_policy(),
        geometry=config.kv,
    )

    for visit in record.states:
        logger.info(f"{visit.state.value:<16} at {visit.at_tokens} generated tokens")
    for cycle, report in zip(record.cycles, record.cleaning_reports):
        note = f" (no-op: {cycle.parse_error})" if cycle.parse_error else ""
        logger.info(
            f"cycle {cycle.iteration}: {report.match_count} span(s), "
            f"{cycle.context_chars_before} -> {cycle.context_chars_after} chars{note}"
        )

    predicted = extract_boxed(record.final_text)
    if gold:
        record = record.model_copy(
            update={"predicted": predicted, "correct": predicted is not None and check_answer(predicted, gold)}
        )

    logger.info(
        f"Finished in state {record.status.value}: {record.total_tokens} tokens kept, "
        f"{record.generated_tokens_total} generated, {len(record.cleaning_reports)} cleaning cycle(s)"
    )
    logger.info(f"Answer: {predicted if predicted is not None else '(none)'}")
    if gold:
        logger.info("Correct!" if record.correct else f"Incorrect, expected {gold}")
    if record.error:
        logger.warning(f"Episode ended on a backend error: {record.error}")

    if show_text:
        typer.echo(record.final_text)

    if output:
        with open(output, "w", encoding="utf-8") as f:
            json.dump(record.model_dump(mode="json"), f, ensure_ascii=False, indent=2)
        logger.info(f"Episode record saved to {output}")
