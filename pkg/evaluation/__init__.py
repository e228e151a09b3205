from .answers import (
    DEFAULT_REASONING_TEMPLATE,
    REASONING_INSTRUCTION,
    BoxedAnswer,
    build_reasoning_prompt,
    check_answer,
    extract_boxed,
    find_boxed,
    normalize_answer,
)
from .datasets import (
    DatasetRecord,
    Trajectory,
    dump_models,
    load_dataset,
    load_trajectories,
    read_jsonl,
    to_json_line,
    write_jsonl_atomic,
)
from .metrics import (
    BucketRow,
    LatencyReport,
    TokenStats,
    latency_report,
    length_buckets,
    macro_average,
    pass_at_1,
    per_question_correct,
    relative_change,
    summarize,
    token_stats,
)
from .runlog import RunLog, RunLogHeader, RunLogWriter, hash_snapshot, read_run_log, repair_tail
from .runner import run_benchmark

__all__ = [
    "BoxedAnswer",
    "BucketRow",
    "DEFAULT_REASONING_TEMPLATE",
    "DatasetRecord",
    "LatencyReport",
    "REASONING_INSTRUCTION",
    "RunLog",
    "RunLogHeader",
    "RunLogWriter",
    "TokenStats",
    "Trajectory",
    "build_reasoning_prompt",
    "check_answer",
    "dump_models",
    "extract_boxed",
    "find_boxed",
    "hash_snapshot",
    "latency_report",
    "length_buckets",
    "load_dataset",
    "load_trajectories",
    "macro_average",
    "normalize_answer",
    "pass_at_1",
    "per_question_correct",
    "read_jsonl",
    "read_run_log",
    "relative_change",
    "repair_tail",
    "run_benchmark",
    "summarize",
    "to_json_line",
    "token_stats",
]
