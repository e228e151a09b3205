import hashlib
import json
import threading
from datetime import datetime, timezone
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from logger import logger
from orchestrator import RunRecord


def hash_snapshot(snapshot: dict) -> str:
    canonical = json.dumps(snapshot, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


class RunLogHeader(BaseModel):
    kind: str = "header"
    config: dict
    config_hash: str
    dataset_id: str
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))


class RunLog(BaseModel):
    header: RunLogHeader
    records: list[RunRecord] = []

    def keys(self) -> set[tuple[str, int]]:
        return {r.key for r in self.records}

    @property
    def dataset_id(self) -> str:
        return self.header.dataset_id


def repair_tail(path: Path) -> None:
    """Drop a trailing partial line left by an interrupted write."""
    data = path.read_bytes()
    if data and not data.endswith(b"\n"):
        cut = data.rfind(b"\n") + 1
        logger.warning(f"Discarding {len(data) - cut} bytes of an incomplete record in {path}")
        with open(path, "r+b") as f:
            f.truncate(cut)


def read_run_log(path: str | Path) -> RunLog:
    """
    Load a run log: a header line followed by one RunRecord per line.

    A final line without its newline is treated as an interrupted write and
    ignored.

    Raises:
        ValueError: If the header is missing, a record is invalid, a record's
                    config hash differs from the header, or a key repeats.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
    except OSError as e:
        raise ValueError(f"Cannot read run log {path}: {e}") from e

    # The element after the last newline is either empty or an incomplete write
    complete = [line for line in lines[:-1] if line.strip()]
    if not complete:
        raise ValueError(f"Run log {path} has no header")

    try:
        header = RunLogHeader.model_validate_json(complete[0])
    except ValidationError as e:
        raise ValueError(f"Invalid run log header in {path}: {e}") from e

    records = []
    seen = set()
    for number, line in enumerate(complete[1:], start=2):
        try:
            record = RunRecord.model_validate_json(line)
        except ValidationError as e:
            raise ValueError(f"{path}:{number}: invalid record: {e}") from e
        if record.config_hash != header.config_hash:
            raise ValueError(
                f"{path}:{number}: record config {record.config_hash} does not match header {header.config_hash}"
            )
        if record.key in seen:
            raise ValueError(f"{path}:{number}: duplicate record for {record.key}")
        seen.add(record.key)
        records.append(record)

    return RunLog(header=header, records=records)


class RunLogWriter:
    """Append-only writer shared by concurrent episodes; one line per call."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def write_header(self, header: RunLogHeader) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self._lock, open(self.path, "w", encoding="utf-8") as f:
            f.write(header.model_dump_json() + "\n")

    def append(self, record: RunRecord) -> None:
        line = record.model_dump_json() + "\n"
        with self._lock, open(self.path, "a", encoding="utf-8") as f:
            f.write(line)
            f.flush()
