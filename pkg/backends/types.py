from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, model_validator


class BackendConfig(BaseModel):
    """
    Where and how to reach the serving layer.

    The cleaning model id names the adapter that plays the "merged" cleaning
    module; reasoning requests go to the plain backbone.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    base_url: str = "http://localhost:8000/v1"
    reasoning_model_id: str = "Qwen/Qwen3-8B"
    cleaning_model_id: str = "cleaning-adapter"
    request_timeout: float = Field(default=600.0, gt=0)
    max_retries: NonNegativeInt = 3
    backoff_seconds: float = Field(default=1.0, ge=0)
    api_key_env: str = "OPENAI_API_KEY"
    tokenize_url: str | None = None
    # In-context baselines use the backbone itself for cleaning
    allow_shared_model: bool = False

    @model_validator(mode="after")
    def _distinct_models(self):
        if self.reasoning_model_id == self.cleaning_model_id and not self.allow_shared_model:
            raise ValueError(
                "reasoning_model_id and cleaning_model_id are identical; "
                "set allow_shared_model to use one model for both modes"
            )
        return self


class GenerationParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    temperature: float = Field(default=0.7, ge=0)
    top_k: NonNegativeInt = 20
    top_p: float = Field(default=0.95, ge=0, le=1)
    max_new_tokens: PositiveInt = 32768
    stop_sequences: tuple[str, ...] = ()


class FinishReason(str, Enum):
    STOP = "stop"
    LENGTH = "length"
    OTHER = "other"

    @classmethod
    def from_server(cls, value) -> "FinishReason":
        try:
            return cls(value)
        except ValueError:
            return cls.OTHER


class RolloutResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    completion_tokens: NonNegativeInt
    finish_reason: FinishReason
    latency: float = 0.0
    estimated: bool = False
