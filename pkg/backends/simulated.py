import hashlib
import json

import numpy as np

from context import TokenCount
from .tokens import split_tokens
from .types import BackendConfig, FinishReason, GenerationParams, RolloutResult

VOCABULARY = (
    "let", "consider", "the", "sum", "of", "roots", "so", "we", "get", "check",
    "again", "wait", "modulo", "prime", "factor", "hence", "square", "term",
    "case", "value", "equation", "substitute", "compute", "therefore", "bound",
)

PARAGRAPH_SEPARATOR = "\n\n"
ANCHOR_WORDS = 4


def _rng(*parts) -> np.random.Generator:
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


class SimulatedBackend:
    """
    Offline stand-in for a reasoning server, deterministic in (seed, request).

    Every question gets a planned response length and an answer derived from
    its prompt. Continuations are paragraphs of filler words; some paragraphs
    repeat an earlier one verbatim so that cleaning has something to remove.
    The cleaning mode proposes deleting one repeated middle paragraph.

    Args:
        config (BackendConfig): Model ids only; no network is used.
        seed (int):             Global seed mixed into every request.
        min_tokens (int):       Lower bound of the planned response length.
        max_tokens (int):       Upper bound of the planned response length.
        repeat_rate (float):    Probability that a new paragraph repeats an older one.
    """

    def __init__(
        self,
        config: BackendConfig,
        seed: int = 0,
        min_tokens: int = 600,
        max_tokens: int = 9000,
        repeat_rate: float = 0.25,
    ):
        self.config = config
        self.seed = seed
        self.retries = 0
        self.min_tokens = min_tokens
        self.max_tokens = max_tokens
        self.repeat_rate = repeat_rate

    def answer_for(self, prompt_text: str) -> str:
        return str(int(_rng(self.seed, "answer", prompt_text).integers(0, 1000)))

    def _planned_tokens(self, prompt_text: str) -> int:
        return int(_rng(self.seed, "length", prompt_text).integers(self.min_tokens, self.max_tokens + 1))

    def _paragraph(self, rng: np.random.Generator, earlier: list[str]) -> str:
        candidates = [p for p in earlier[1:] if len(split_tokens(p)) >= 2 * ANCHOR_WORDS]
        if candidates and rng.random() < self.repeat_rate:
            return candidates[int(rng.integers(0, len(candidates)))].strip()
        length = int(rng.integers(2 * ANCHOR_WORDS, 120))
        return " ".join(rng.choice(VOCABULARY, size=length))

    def continue_reasoning(self, prompt_text: str, partial_response: str, params: GenerationParams) -> RolloutResult:
        rng = _rng(self.seed, "continue", prompt_text, partial_response)
        remaining = self._planned_tokens(prompt_text) - len(split_tokens(partial_response))

        earlier = partial_response.split(PARAGRAPH_SEPARATOR)
        pieces = []
        produced = 0
        while produced < min(remaining, params.max_new_tokens):
            paragraph = self._paragraph(rng, earlier)
            earlier.append(paragraph)
            lead = PARAGRAPH_SEPARATOR if (partial_response or pieces) else ""
            pieces.append(lead + paragraph)
            produced += len(split_tokens(paragraph))

        lead = PARAGRAPH_SEPARATOR if (partial_response or pieces) else ""
        pieces.append(f"{lead}Therefore the final answer is \\boxed{{{self.answer_for(prompt_text)}}}.")

        tokens = split_tokens("".join(pieces))
        if len(tokens) > params.max_new_tokens:
            return RolloutResult(
                text="".join(tokens[: params.max_new_tokens]),
                completion_tokens=params.max_new_tokens,
                finish_reason=FinishReason.LENGTH,
            )
        return RolloutResult(text="".join(tokens), completion_tokens=len(tokens), finish_reason=FinishReason.STOP)

    def request_cleaning(self, system_text: str, user_text: str, schema: dict, params: GenerationParams) -> str:
        paragraphs = [p.strip() for p in user_text.split(PARAGRAPH_SEPARATOR)]
        seen = set()
        # First and last paragraphs stay; pick the first middle paragraph seen before
        for paragraph in paragraphs[1:-1]:
            words = paragraph.split()
            if paragraph in seen and len(words) >= 2 * ANCHOR_WORDS and "<" not in paragraph:
                prefix = " ".join(words[:ANCHOR_WORDS])
                suffix = " ".join(words[-ANCHOR_WORDS:])
                return json.dumps([{"prefix": prefix, "suffix": suffix}])
            seen.add(paragraph)
        return "[]"

    def count_tokens(self, text: str) -> TokenCount:
        return TokenCount(len(split_tokens(text)), False)
