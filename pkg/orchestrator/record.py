from enum import Enum

from pydantic import BaseModel, NonNegativeInt, model_validator

from pruning import CleaningReport


class EpisodeState(str, Enum):
    REASONING = "Reasoning"
    CLEANING = "Cleaning"
    PRUNING = "Pruning"
    RESUMING = "Resuming"
    DONE = "Done"
    DEGENERATED = "Degenerated"
    BUDGET_EXHAUSTED = "BudgetExhausted"


TERMINAL_STATES = (EpisodeState.DONE, EpisodeState.DEGENERATED, EpisodeState.BUDGET_EXHAUSTED)


class StateVisit(BaseModel):
    state: EpisodeState
    at_tokens: NonNegativeInt


class CycleTrace(BaseModel):
    """Bookkeeping of one cleaning cycle, parallel to RunRecord.cleaning_reports."""

    iteration: int
    triggered_at_tokens: NonNegativeInt
    context_chars_before: NonNegativeInt
    context_chars_after: NonNegativeInt
    reuse_boundary_chars: NonNegativeInt
    reprefill_tokens_est: NonNegativeInt
    parse_error: str | None = None


class RunRecord(BaseModel):
    """
    Full trace of one episode.

    total_tokens is the final generated region, sentinels included (the #Token
    figure); generated_tokens_total also counts everything that was pruned.
    """

    question_id: str
    rollout_index: int = 0
    states: list[StateVisit]
    cleaning_reports: list[CleaningReport] = []
    cycles: list[CycleTrace] = []
    final_text: str = ""
    total_tokens: NonNegativeInt = 0
    generated_tokens_total: NonNegativeInt = 0
    peak_context_tokens: NonNegativeInt = 0
    reprefill_tokens_total: NonNegativeInt = 0
    kv_bytes_est: NonNegativeInt = 0
    wall_time: float = 0.0
    estimated: bool = False
    error: str | None = None
    predicted: str | None = None
    correct: bool | None = None
    config_hash: str = ""

    @model_validator(mode="after")
    def _state_path(self):
        if not self.states or self.states[0].state is not EpisodeState.REASONING:
            raise ValueError("An episode must start in the Reasoning state")
        if self.states[-1].state not in TERMINAL_STATES:
            raise ValueError(f"An episode must end in one of {[s.value for s in TERMINAL_STATES]}")
        if len(self.cycles) != len(self.cleaning_reports):
            raise ValueError("cycles and cleaning_reports must line up")
        return self

    @property
    def status(self) -> EpisodeState:
        return self.states[-1].state

    @property
    def cleaning_cycles(self) -> int:
        return len(self.cycles)

    @property
    def key(self) -> tuple[str, int]:
        return self.question_id, self.rollout_index
