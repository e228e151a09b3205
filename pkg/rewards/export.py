from pathlib import Path

from codec import CleaningPromptTemplate, format_cleaning_prompt, serialize_command
from evaluation import to_json_line, write_jsonl_atomic
from .instance import CandidateInstance


def training_record(inst: CandidateInstance, template: CleaningPromptTemplate) -> dict:
    system, user = format_cleaning_prompt(inst.context_raw, template)
    return {
        "system": system,
        "user": user,
        "target": serialize_command(inst.command),
        "provenance": {
            "source_id": inst.source_id,
            "chunk_index": inst.chunk_index,
            "acc_raw": inst.acc_raw,
            "acc_new": inst.acc_new,
        },
    }


def export_instances(retained: list[CandidateInstance], path: str | Path, template: CleaningPromptTemplate) -> int:
    """
    Write one training record per retained instance, one per line.

    The file is written to a temp name and renamed into place; on failure no
    partial file is left behind.

    Returns:
        int: Number of records written.
    """
    return write_jsonl_atomic(path, (to_json_line(training_record(inst, template)) for inst in retained))
