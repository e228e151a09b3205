from pydantic import BaseModel, ConfigDict, Field, model_validator

from codec import PruneCommand
from pruning import GuardPolicy


class CandidateInstance(BaseModel):
    """
    One synthesized pruning example: the chunk being cleaned, the command the
    oracle proposed for it, and (once scored) the accuracy on both contexts.

    context_raw is cleaned_history + current_chunk; context_new is context_raw
    after applying `command` with `sentinel` under `guard`.
    """

    model_config = ConfigDict(frozen=True)

    source_id: str
    question: str
    gold_answer: str
    chunk_index: int = Field(ge=0)
    cleaned_history: str
    current_chunk: str
    command: PruneCommand
    context_raw: str
    context_new: str
    sentinel: str
    guard: GuardPolicy
    acc_raw: float | None = Field(default=None, ge=0.0, le=1.0)
    acc_new: float | None = Field(default=None, ge=0.0, le=1.0)
    retained: bool | None = None

    @model_validator(mode="after")
    def _consistent(self):
        if self.context_raw != self.cleaned_history + self.current_chunk:
            raise ValueError("context_raw must be cleaned_history followed by current_chunk")
        if (self.acc_raw is None) != (self.acc_new is None):
            raise ValueError("acc_raw and acc_new are set together")
        if self.retained is not None:
            if self.acc_raw is None:
                raise ValueError("retained requires scored accuracies")
            if self.retained != (self.acc_new >= self.acc_raw):
                raise ValueError("retained must equal acc_new >= acc_raw")
        return self

    @property
    def scored(self) -> bool:
        return self.acc_raw is not None
