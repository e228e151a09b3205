import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, NamedTuple


class Origin(str, Enum):
    PROMPT = "prompt"
    GENERATED = "generated"
    SENTINEL = "sentinel"


class TokenCount(NamedTuple):
    count: int
    estimated: bool


TokenCounter = Callable[[str], TokenCount]


def estimate_tokens(text: str) -> TokenCount:
    """
    Tokenizer-agnostic estimate used for locally constructed strings.

    Args:
        text (str): Any text.

    Returns:
        TokenCount: ceil(len(text) / 4), flagged as estimated.
    """
    return TokenCount(math.ceil(len(text) / 4), True)


@dataclass(frozen=True)
class Segment:
    text: str
    origin: Origin
    token_count: int

    def __post_init__(self):
        if self.token_count < 0:
            raise ValueError(f"Segment token_count must be >= 0, got {self.token_count}")
        if (self.token_count == 0) != (self.text == ""):
            raise ValueError(
                f"Segment token_count is 0 only for empty text "
                f"(text length {len(self.text)}, token_count {self.token_count})"
            )


@dataclass(frozen=True)
class Context:
    """
    Immutable snapshot of a reasoning transcript.

    The prompt region is fixed at construction. Generated text and the sentinel
    markers left behind by pruning live in `segments`, in order.

    Attributes:
        prompt_text (str):              Chat-templated problem statement.
        segments (tuple[Segment]):      Generated and sentinel segments in order.
        total_generated_tokens (int):   Sum of token_count over generated segments.
        tokens_since_last_clean (int):  Generated tokens appended since the last rebuild.
        cleaning_iterations_used (int): Cleaning cycles already spent on this episode.
        segments_at_last_clean (int):   Number of segments right after the last rebuild.
        estimated (bool):               True if any count came from the estimate rule.
    """

    prompt_text: str
    segments: tuple[Segment, ...] = ()
    total_generated_tokens: int = 0
    tokens_since_last_clean: int = 0
    cleaning_iterations_used: int = 0
    segments_at_last_clean: int = 0
    estimated: bool = field(default=False, compare=False)

    def __post_init__(self):
        generated = sum(s.token_count for s in self.segments if s.origin is Origin.GENERATED)
        if generated != self.total_generated_tokens:
            raise ValueError(
                f"total_generated_tokens {self.total_generated_tokens} does not match "
                f"generated segments ({generated})"
            )
        if not 0 <= self.tokens_since_last_clean <= self.total_generated_tokens:
            raise ValueError("tokens_since_last_clean must lie in [0, total_generated_tokens]")

    @property
    def context_tokens(self) -> int:
        """Tokens held by the generated region, sentinels included."""
        return sum(s.token_count for s in self.segments)

    @property
    def has_generated_text(self) -> bool:
        return any(s.origin is Origin.GENERATED and s.text for s in self.segments)


def new_context(prompt_text: str) -> Context:
    return Context(prompt_text=prompt_text)


def append_generation(ctx: Context, text: str, token_count: int) -> Context:
    """
    Append backend output as a new generated segment.

    Args:
        ctx (Context):      Current snapshot.
        text (str):         Generated continuation.
        token_count (int):  Backend-reported usage for `text`.

    Returns:
        Context: New snapshot with both token counters advanced by token_count.

    Note:
        A backend that reports 0 tokens for non-empty text gets the estimate
        rule instead and the snapshot is flagged as estimated.
    """
    estimated = ctx.estimated
    if text and token_count == 0:
        token_count, estimated = estimate_tokens(text).count, True
    if not text:
        token_count = 0

    return replace(
        ctx,
        segments=ctx.segments + (Segment(text, Origin.GENERATED, token_count),),
        total_generated_tokens=ctx.total_generated_tokens + token_count,
        tokens_since_last_clean=ctx.tokens_since_last_clean + token_count,
        estimated=estimated,
    )


def generated_text(ctx: Context) -> str:
    """The generated region as the model sees it, sentinels included."""
    return "".join(s.text for s in ctx.segments)


def flatten(ctx: Context) -> str:
    return ctx.prompt_text + generated_text(ctx)


def _scaled_counts(counts: list[int], ratio: float, ceiling: int) -> list[int]:
    scaled = [max(1, math.floor(c * ratio)) for c in counts]
    excess = sum(scaled) - ceiling
    for i in sorted(range(len(scaled)), key=lambda j: -scaled[j]):
        if excess <= 0:
            break
        cut = min(excess, scaled[i] - 1)
        scaled[i] -= cut
        excess -= cut
    return scaled


def rebuild_from_flat(
    prompt_text: str,
    flat_generated: str,
    sentinel: str,
    token_counter: TokenCounter = estimate_tokens,
    cleaning_iterations_used: int = 0,
    previous: Context | None = None,
) -> Context:
    """
    Re-segment a post-prune generated region.

    The text is split on every sentinel occurrence into alternating generated
    and sentinel segments. Counters are recomputed, tokens_since_last_clean is
    reset to 0 and the iteration count is carried over from the caller.

    With `previous` (the pre-prune snapshot) the backend-reported usage wins
    over the counting rule: an unchanged text keeps its segments, otherwise
    each piece's count is scaled by previous usage / counted previous text and
    the generated total never exceeds previous.total_generated_tokens (as long
    as that leaves at least one token per piece).

    Args:
        prompt_text (str):              Unchanged prompt region.
        flat_generated (str):           Generated region after pruning.
        sentinel (str):                 Marker spliced in place of pruned spans.
        token_counter (TokenCounter):   Counting rule for the re-built pieces.
        cleaning_iterations_used (int): Preserved iteration counter.
        previous (Context):             Snapshot the pruned text came from.

    Returns:
        Context: Fresh snapshot over the same text.
    """
    if not sentinel:
        raise ValueError("Sentinel must be a non-empty string")

    if previous is not None and generated_text(previous) == flat_generated:
        return replace(
            previous,
            prompt_text=prompt_text,
            tokens_since_last_clean=0,
            cleaning_iterations_used=cleaning_iterations_used,
            segments_at_last_clean=len(previous.segments),
        )

    estimated = False
    # (text, origin, count) before any rescaling
    parts: list[tuple[str, Origin, int]] = []
    for i, piece in enumerate(flat_generated.split(sentinel)):
        if i > 0:
            counted = token_counter(sentinel)
            estimated |= counted.estimated
            parts.append((sentinel, Origin.SENTINEL, max(counted.count, 1)))
        if piece:
            counted = token_counter(piece)
            estimated |= counted.estimated
            parts.append((piece, Origin.GENERATED, max(counted.count, 1)))

    generated_at = [i for i, p in enumerate(parts) if p[1] is Origin.GENERATED]
    if previous is not None and generated_at:
        prior_counted = [
            token_counter(s.text) for s in previous.segments if s.origin is Origin.GENERATED and s.text
        ]
        ratio = previous.total_generated_tokens / max(sum(c.count for c in prior_counted), 1)
        scaled = _scaled_counts([parts[i][2] for i in generated_at], ratio, previous.total_generated_tokens)
        for i, count in zip(generated_at, scaled):
            parts[i] = (parts[i][0], parts[i][1], count)
        estimated |= previous.estimated

    segments = [Segment(text, origin, count) for text, origin, count in parts]
    total = sum(s.token_count for s in segments if s.origin is Origin.GENERATED)
    return Context(
        prompt_text=prompt_text,
        segments=tuple(segments),
        total_generated_tokens=total,
        tokens_since_last_clean=0,
        cleaning_iterations_used=cleaning_iterations_used,
        segments_at_last_clean=len(segments),
        estimated=estimated,
    )


def reuse_boundary(old_flat: str, new_flat: str) -> int:
    """Length in characters of the longest common prefix of two contexts."""
    return len(os.path.commonprefix([old_flat, new_flat]))


def window_start(ctx: Context) -> int:
    """Character offset in the generated region where text since the last clean begins."""
    return sum(len(s.text) for s in ctx.segments[: ctx.segments_at_last_clean])
