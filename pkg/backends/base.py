from typing import Protocol

from context import TokenCount
from .types import BackendConfig, GenerationParams, RolloutResult


class Backend(Protocol):
    """What the orchestrator and the reward pipeline need from a serving layer."""

    config: BackendConfig
    retries: int

    def continue_reasoning(
        self, prompt_text: str, partial_response: str, params: GenerationParams
    ) -> RolloutResult: ...

    def request_cleaning(
        self, system_text: str, user_text: str, schema: dict, params: GenerationParams
    ) -> str: ...

    def count_tokens(self, text: str) -> TokenCount: ...
