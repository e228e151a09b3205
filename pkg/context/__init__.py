from .model import (
    Context,
    Origin,
    Segment,
    TokenCount,
    TokenCounter,
    append_generation,
    estimate_tokens,
    flatten,
    generated_text,
    new_context,
    rebuild_from_flat,
    reuse_boundary,
    window_start,
)

__all__ = [
    "Context",
    "Origin",
    "Segment",
    "TokenCount",
    "TokenCounter",
    "append_generation",
    "estimate_tokens",
    "flatten",
    "generated_text",
    "new_context",
    "rebuild_from_flat",
    "reuse_boundary",
    "window_start",
]
