from .executor import CleaningReport, PairOutcome, apply, find_spans
from .guards import GUARD_PRESETS, GuardPolicy, intersects, resolve_guard

__all__ = [
    "CleaningReport",
    "GUARD_PRESETS",
    "GuardPolicy",
    "PairOutcome",
    "apply",
    "find_spans",
    "intersects",
    "resolve_guard",
]
