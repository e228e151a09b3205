import math

from pydantic import BaseModel, ConfigDict, NonNegativeInt, model_validator

from codec import AnchorPair, PruneCommand
from .guards import GuardPolicy, intersects


class PairOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    matched: bool
    match_count: NonNegativeInt
    removed_chars: NonNegativeInt

    @model_validator(mode="after")
    def _matched_iff_counted(self):
        if self.matched != (self.match_count > 0):
            raise ValueError("matched must be true exactly when match_count > 0")
        return self


class CleaningReport(BaseModel):
    """Match outcomes of one command application."""

    model_config = ConfigDict(frozen=True)

    per_pair: tuple[PairOutcome, ...] = ()
    total_removed_chars: NonNegativeInt = 0
    total_removed_tokens_est: NonNegativeInt = 0
    guard_rejections: NonNegativeInt = 0

    @model_validator(mode="after")
    def _totals_add_up(self):
        if self.total_removed_chars != sum(p.removed_chars for p in self.per_pair):
            raise ValueError("total_removed_chars must equal the sum of per-pair removed_chars")
        return self

    @classmethod
    def from_outcomes(cls, outcomes, guard_rejections: int = 0) -> "CleaningReport":
        total = sum(o.removed_chars for o in outcomes)
        return cls(
            per_pair=tuple(outcomes),
            total_removed_chars=total,
            total_removed_tokens_est=math.ceil(total / 4),
            guard_rejections=guard_rejections,
        )

    @property
    def match_count(self) -> int:
        return sum(p.match_count for p in self.per_pair)


def _scan(text: str, pair: AnchorPair, regions):
    spans = []
    rejected = 0
    pos = 0

    while True:
        start = text.find(pair.prefix, pos)
        if start == -1:
            break

        suffix_at = text.find(pair.suffix, start + len(pair.prefix))
        if suffix_at == -1:
            # No suffix after the leftmost prefix means none after any later prefix
            break

        span = (start, suffix_at + len(pair.suffix))
        if regions and intersects(span, regions):
            rejected += 1
            pos = start + 1
            continue

        spans.append(span)
        pos = span[1]

    return spans, rejected


def find_spans(text: str, pair: AnchorPair, regions: list[tuple[int, int]] | None = None):
    """
    Locate every non-overlapping, leftmost-first, shortest span for an anchor pair.

    A span starts at a literal occurrence of the prefix and ends right after the
    first literal occurrence of the suffix that begins at or after the prefix's
    end. Spans may cross newlines.

    Args:
        text (str):          Text to scan.
        pair (AnchorPair):   Literal anchors.
        regions (list):      Guarded [start, end) ranges; spans touching them are skipped.

    Returns:
        list: (start, end) pairs with an exclusive end.
    """
    return _scan(text, pair, regions)[0]


def _splice(text: str, spans: list[tuple[int, int]], sentinel: str) -> str:
    out = []
    cursor = 0
    for start, end in spans:
        out.append(text[cursor:start])
        out.append(sentinel)
        cursor = end
    out.append(text[cursor:])
    return "".join(out)


def apply(text: str, cmd: PruneCommand, sentinel: str, guard: GuardPolicy | None = None):
    """
    Apply a pruning command to the flattened generated region.

    Pairs run strictly in list order, each on the text produced by the previous
    one. Every matched span is replaced by the sentinel. Unmatched pairs are
    recorded, never raised.

    Args:
        text (str):            Generated region (prompt excluded).
        cmd (PruneCommand):    Anchor pairs to apply.
        sentinel (str):        Replacement marker.
        guard (GuardPolicy):   Protected regions (None disables guarding).

    Returns:
        tuple[str, CleaningReport]: Cleaned text and its report.
    """
    outcomes = []
    rejections = 0

    for pair in cmd.pairs:
        regions = guard.regions(text) if guard else None
        spans, rejected = _scan(text, pair, regions)
        rejections += rejected

        removed = sum(end - start for start, end in spans)
        outcomes.append(PairOutcome(matched=bool(spans), match_count=len(spans), removed_chars=removed))

        if spans:
            text = _splice(text, spans, sentinel)

    return text, CleaningReport.from_outcomes(outcomes, rejections)
