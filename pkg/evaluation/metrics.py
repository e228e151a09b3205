from collections import defaultdict
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from .runlog import RunLog


def pass_at_1(per_question: Mapping[str, Sequence[bool]]) -> float:
    """
    Mean over questions of the fraction of correct rollouts.

    Raises:
        ValueError: If there are no questions or a question has no rollouts.
    """
    if not per_question:
        raise ValueError("pass@1 needs at least one question")

    fractions = []
    for question, rollouts in per_question.items():
        if not rollouts:
            raise ValueError(f"Question {question} has no rollouts")
        fractions.append(sum(bool(r) for r in rollouts) / len(rollouts))
    return fmean(fractions)


def macro_average(values: Iterable[float]) -> float:
    """Unweighted mean across benchmarks."""
    values = list(values)
    if not values:
        raise ValueError("Cannot average an empty list")
    return fmean(values)


def relative_change(new: float, old: float) -> float:
    """(new - old) / old."""
    if old == 0:
        raise ValueError("Relative change against a zero baseline is undefined")
    return (new - old) / old


def per_question_correct(run: RunLog) -> dict[str, list[bool]]:
    grouped = defaultdict(list)
    for record in sorted(run.records, key=lambda r: r.key):
        grouped[record.question_id].append(bool(record.correct))
    return dict(grouped)


def _mean(run: RunLog, field: str) -> float:
    if not run.records:
        raise ValueError("Run log has no records")
    return fmean(getattr(r, field) for r in run.records)


@dataclass(frozen=True)
class TokenStats:
    avg_tokens: float
    baseline_avg_tokens: float | None = None
    delta_ratio: float | None = None
    reverse_delta_ratio: float | None = None


def token_stats(run: RunLog, baseline: RunLog | None = None) -> TokenStats:
    """
    Average #Token over all rollouts and, with a baseline, the relative change.

    Both directions are reported: delta_ratio = (run - base) / base and
    reverse_delta_ratio = (base - run) / run.

    Raises:
        ValueError: If the two logs were produced on different datasets.
    """
    avg = _mean(run, "total_tokens")
    if baseline is None:
        return TokenStats(avg_tokens=avg)

    if baseline.dataset_id != run.dataset_id:
        raise ValueError(f"Dataset mismatch: run on {run.dataset_id}, baseline on {baseline.dataset_id}")

    base = _mean(baseline, "total_tokens")
    return TokenStats(
        avg_tokens=avg,
        baseline_avg_tokens=base,
        delta_ratio=relative_change(avg, base),
        reverse_delta_ratio=relative_change(base, avg),
    )


@dataclass(frozen=True)
class LatencyReport:
    latency_delta_ratio: float
    kv_bytes_delta_ratio: float


def latency_report(run: RunLog, baseline: RunLog) -> LatencyReport:
    return LatencyReport(
        latency_delta_ratio=relative_change(_mean(run, "wall_time"), _mean(baseline, "wall_time")),
        kv_bytes_delta_ratio=relative_change(_mean(run, "kv_bytes_est"), _mean(baseline, "kv_bytes_est")),
    )


@dataclass(frozen=True)
class BucketRow:
    label: str
    questions: int
    pass_at_1: float
    avg_tokens: float
    baseline_pass_at_1: float
    baseline_avg_tokens: float


def length_buckets(run: RunLog, baseline: RunLog, edges: Sequence[int]) -> list[BucketRow]:
    """
    Group questions by their baseline average #Token and compare per bucket.

    Args:
        run (RunLog):       Run under study.
        baseline (RunLog):  Reference run; defines each question's length.
        edges (list[int]):  Ascending bucket boundaries in tokens.

    Returns:
        list[BucketRow]: Non-empty buckets in ascending order.
    """
    bounds = [0, *sorted(edges), None]

    def by_question(log):
        grouped = defaultdict(list)
        for record in log.records:
            grouped[record.question_id].append(record)
        return grouped

    run_groups, base_groups = by_question(run), by_question(baseline)
    rows = []
    for lo, hi in zip(bounds, bounds[1:]):
        members = [
            q for q, recs in base_groups.items()
            if q in run_groups and lo <= fmean(r.total_tokens for r in recs) and (hi is None or fmean(r.total_tokens for r in recs) < hi)
        ]
        if not members:
            continue

        run_recs = [r for q in members for r in run_groups[q]]
        base_recs = [r for q in members for r in base_groups[q]]
        rows.append(
            BucketRow(
                label=f"{lo}-{hi}" if hi is not None else f"{lo}+",
                questions=len(members),
                pass_at_1=pass_at_1({q: [bool(r.correct) for r in run_groups[q]] for q in members}),
                avg_tokens=fmean(r.total_tokens for r in run_recs),
                baseline_pass_at_1=pass_at_1({q: [bool(r.correct) for r in base_groups[q]] for q in members}),
                baseline_avg_tokens=fmean(r.total_tokens for r in base_recs),
            )
        )
    return rows


def summarize(run: RunLog) -> dict:
    """Headline numbers of a run, deterministic in its record set."""
    if not run.records:
        return {"records": 0}

    records = run.records
    return {
        "records": len(records),
        "questions": len({r.question_id for r in records}),
        "pass_at_1": pass_at_1(per_question_correct(run)),
        "avg_tokens": fmean(r.total_tokens for r in records),
        "avg_generated_tokens": fmean(r.generated_tokens_total for r in records),
        "avg_cleaning_cycles": fmean(r.cleaning_cycles for r in records),
        "avg_reprefill_tokens": fmean(r.reprefill_tokens_total for r in records),
        "avg_kv_bytes": fmean(r.kv_bytes_est for r in records),
        "errors": sum(r.error is not None for r in records),
        "status": {s: sum(r.status.value == s for r in records) for s in sorted({r.status.value for r in records})},
    }
