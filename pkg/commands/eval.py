from pathlib import Path

import typer
from typing_extensions import Annotated

from evaluation import latency_report, length_buckets, read_run_log, run_benchmark, summarize, token_stats
from logger import logger


def _parse_buckets(buckets: str) -> list[int]:
    try:
        edges = [int(b) for b in buckets.split(",") if b.strip()]
    except ValueError:
        raise ValueError(f"Invalid bucket edges: {buckets}. Use comma-separated integers, e.g. 8000,16000")
    if any(e <= 0 for e in edges):
        raise ValueError("Bucket edges must be positive")
    return edges


def evaluate(
    ctx: typer.Context,
    dataset: Annotated[str, typer.Argument(help="Dataset file, one {id, question, gold_answer} record per line.")],
    output: Annotated[
        str,
        typer.Option(help="Run log to create, or to resume if it already exists."),
    ] = "runs/run.jsonl",
    baseline: Annotated[
        str,
        typer.Option(help="Run log of a reference run; reports token, latency and KV deltas against it."),
    ] = "",
    buckets: Annotated[
        str,
        typer.Option(help="Comma-separated token edges for the length-bucket report (needs --baseline)."),
    ] = "",
    report_only: Annotated[
        bool,
        typer.Option(help="Skip running and only report on the existing run log."),
    ] = False,
    progress: Annotated[bool, typer.Option(help="Show a progress bar.")] = True,
):
    """
    Run a benchmark (rollouts per question from the global --rollouts) and report metrics.

    Example usage:
        python main.py --backend simulated --rollouts 2 eval data/aime.jsonl --output runs/aime.jsonl
        python main.py eval data/aime.jsonl --output runs/aime.jsonl --baseline runs/vanilla.jsonl --buckets 8000,16000
    """
    config = ctx.obj

    try:
        edges = _parse_buckets(buckets)
        if edges and not baseline:
            raise ValueError("--buckets needs --baseline")

        if report_only:
            run_log = read_run_log(output)
        else:
            logger.info(f"Evaluating {dataset} with {config.rollouts} rollout(s) per question...")
            run_log = run_benchmark(
                dataset,
                config.rollouts,
                config.policy,
                config.reasoning,
                config.make_backend(),
                output,
                config.cleaning_template(),
                config.snapshot(),
                workers=config.workers,
                cleaning_params=config.cleaning,
                guard=config.guard_policy(),
                geometry=config.kv,
                reasoning_template=config.reasoning_template,
                instruction=config.instruction,
                progress=progress,
            )

        summary = summarize(run_log)
        for key, value in summary.items():
            logger.info(f"{key}: {value}")

        if baseline:
            reference = read_run_log(baseline)
            stats = token_stats(run_log, reference)
            latency = latency_report(run_log, reference)
            logger.info(
                f"#Token {stats.avg_tokens:.1f} vs {stats.baseline_avg_tokens:.1f} "
                f"({stats.delta_ratio:+.1%}; reverse {stats.reverse_delta_ratio:+.1%})"
            )
            logger.info(
                f"Latency {latency.latency_delta_ratio:+.1%}, KV memory {latency.kv_bytes_delta_ratio:+.1%}"
            )
            for row in length_buckets(run_log, reference, edges) if edges else []:
                logger.info(
                    f"bucket {row.label}: {row.questions} question(s), "
                    f"p@1 {row.pass_at_1:.3f} vs {row.baseline_pass_at_1:.3f}, "
                    f"#Token {row.avg_tokens:.0f} vs {row.baseline_avg_tokens:.0f}"
                )
    except ValueError as e:
        logger.error(str(e))
        raise typer.Exit(code=1)

    logger.info(f"Run log: {Path(output)}")
