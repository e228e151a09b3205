from .degeneration import detect_degeneration
from .episode import run_episode
from .kv_accounting import KVGeometry, estimate_kv_bytes
from .policy import TriggerPolicy, should_trigger
from .record import TERMINAL_STATES, CycleTrace, EpisodeState, RunRecord, StateVisit

__all__ = [
    "CycleTrace",
    "EpisodeState",
    "KVGeometry",
    "RunRecord",
    "StateVisit",
    "TERMINAL_STATES",
    "TriggerPolicy",
    "detect_degeneration",
    "estimate_kv_bytes",
    "run_episode",
    "should_trigger",
]
