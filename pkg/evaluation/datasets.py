import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, TypeVar

from pydantic import BaseModel, Field, ValidationError

T = TypeVar("T", bound=BaseModel)


class DatasetRecord(BaseModel):
    id: str
    question: str
    gold_answer: str


class Trajectory(BaseModel):
    question: str
    gold_answer: str
    cot_text: str = Field(min_length=1)
    source_id: str


def read_jsonl(path: str | Path, model: type[T]) -> list[T]:
    """
    Read one record per line into `model`, skipping blank lines.

    Raises:
        ValueError: On unreadable files or invalid lines (with the line number).
    """
    records = []
    try:
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(model.model_validate_json(line))
                except ValidationError as e:
                    raise ValueError(f"{path}:{number}: invalid {model.__name__}: {e}") from e
    except OSError as e:
        raise ValueError(f"Cannot read {path}: {e}") from e
    return records


def load_dataset(path: str | Path) -> list[DatasetRecord]:
    records = read_jsonl(path, DatasetRecord)
    seen = set()
    duplicates = [r.id for r in records if r.id in seen or seen.add(r.id)]
    if duplicates:
        raise ValueError(f"Duplicate question ids in {path}: {', '.join(sorted(set(duplicates)))}")
    return records


def load_trajectories(path: str | Path) -> list[Trajectory]:
    return read_jsonl(path, Trajectory)


def write_jsonl_atomic(path: str | Path, lines: Iterable[str]) -> int:
    """
    Write lines to a temp file next to `path`, then rename it into place.

    On any error the temp file is removed and the exception re-raised, so a
    failed export never leaves a partial file behind.

    Returns:
        int: Number of lines written.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    count = 0
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            for line in lines:
                f.write(line.rstrip("\n") + "\n")
                count += 1
        os.replace(temp_name, target)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise
    return count


def dump_models(models: Iterable[BaseModel]) -> Iterable[str]:
    return (m.model_dump_json() for m in models)


def to_json_line(data: dict) -> str:
    return json.dumps(data, ensure_ascii=False, sort_keys=True)
