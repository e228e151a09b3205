import json
import re
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, StrictStr, ValidationError

from .errors import MalformedCommand, SchemaViolation
from .schema import MAX_PAIRS, WRAPPER_KEYS

_FENCE_RE = re.compile(r"^```[A-Za-z0-9_-]*[ \t]*\n?(.*?)\n?```$", re.DOTALL)


class AnchorPair(BaseModel):
    """Literal anchors marking the first and last characters of a span to delete."""

    model_config = ConfigDict(frozen=True)

    prefix: StrictStr = Field(min_length=1)
    suffix: StrictStr = Field(min_length=1)


class PruneCommand(BaseModel):
    """Ordered anchor pairs; an empty list means nothing to delete."""

    model_config = ConfigDict(frozen=True)

    pairs: tuple[AnchorPair, ...] = ()

    def __len__(self):
        return len(self.pairs)


def _strip_fence(raw: str) -> str:
    text = raw.strip()
    match = _FENCE_RE.match(text)
    return match.group(1).strip() if match else text


def _unwrap(data: Any) -> list:
    if isinstance(data, list):
        return data

    if isinstance(data, dict) and len(data) == 1:
        key, value = next(iter(data.items()))
        if key in WRAPPER_KEYS and isinstance(value, list):
            return value

    raise MalformedCommand(
        f"Expected a JSON array of prefix/suffix objects, got {type(data).__name__}"
    )


def parse_command(raw: str, sentinel: str | None = None) -> PruneCommand:
    """
    Parse and validate the cleaning-mode output.

    Accepts a bare array, the same array inside a triple-backtick fence, or a
    single-key object wrapping the array under one of WRAPPER_KEYS. Anchor text
    is taken verbatim, whitespace included.

    Args:
        raw (str):                Model output.
        sentinel (str, optional): When given, anchors containing it are rejected.

    Returns:
        PruneCommand: The validated pairs, in order.

    Raises:
        MalformedCommand: If the text is not parseable into an array.
        SchemaViolation:  If any element is missing fields, has empty or
                          non-string fields, contains the sentinel, or if there
                          are more than MAX_PAIRS elements.
    """
    try:
        data = json.loads(_strip_fence(raw))
    except json.JSONDecodeError as e:
        raise MalformedCommand(f"Pruning command is not valid JSON: {e}") from e

    items = _unwrap(data)

    if len(items) > MAX_PAIRS:
        raise SchemaViolation([f"{len(items)} pairs exceeds the limit of {MAX_PAIRS}"])

    pairs = []
    problems = []
    for index, item in enumerate(items):
        try:
            pair = AnchorPair.model_validate(item)
        except ValidationError as e:
            reasons = ", ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'item'}: {err['msg']}"
                for err in e.errors()
            )
            problems.append(f"element {index}: {reasons}")
            continue

        if sentinel and (sentinel in pair.prefix or sentinel in pair.suffix):
            problems.append(f"element {index}: anchor contains the sentinel {sentinel!r}")
            continue

        pairs.append(pair)

    if problems:
        raise SchemaViolation(problems)

    return PruneCommand(pairs=tuple(pairs))


def serialize_command(cmd: PruneCommand) -> str:
    """Canonical compact array-of-objects text."""
    return json.dumps(
        [{"prefix": p.prefix, "suffix": p.suffix} for p in cmd.pairs],
        ensure_ascii=False,
        separators=(",", ":"),
    )
