import threading
from dataclasses import dataclass

from context import TokenCount
from .errors import ContextLengthExceeded, ScriptExhausted, ScriptMismatch, ServerError, TransportError
from .retry import call_with_retries
from .tokens import split_tokens
from .types import BackendConfig, FinishReason, GenerationParams, RolloutResult

MOCK_CONFIG = BackendConfig(
    base_url="mock://",
    reasoning_model_id="mock-reasoner",
    cleaning_model_id="mock-cleaner",
    max_retries=3,
    backoff_seconds=0.0,
)


@dataclass(frozen=True)
class Reason:
    """A reasoning chunk. finish_reason overrides the length-derived default."""

    text: str
    finish_reason: FinishReason | None = None


@dataclass(frozen=True)
class Clean:
    raw: str


@dataclass(frozen=True)
class Fault:
    """Consumed in place of a reply; kind is transport, context_length or server."""

    kind: str = "transport"
    status_code: int = 503


def _raise_fault(fault: Fault):
    if fault.kind == "transport":
        raise TransportError("scripted timeout")
    if fault.kind == "context_length":
        raise ContextLengthExceeded("scripted context overflow", status_code=400)
    if fault.kind == "server":
        raise ServerError("scripted server error", status_code=fault.status_code)
    raise ValueError(f"Unknown fault kind: {fault.kind}")


class MockBackend:
    """
    Deterministic backend that replays a script of events in order.

    Tokens are whitespace-led words (see split_tokens). A reasoning reply
    longer than max_new_tokens is cut there and reported with finish_reason
    "length"; a reply of exactly max_new_tokens tokens also reports "length"
    unless the event says otherwise.

    Attributes:
        calls (list):             (mode, model id) per request, in order.
        cleaning_requests (list): (system, user) texts of every cleaning request.
        retries (int):            Retries spent across all requests.
    """

    def __init__(self, events, config: BackendConfig = MOCK_CONFIG, sleep=lambda _: None):
        self.config = config
        self.events = list(events)
        self.position = 0
        self.retries = 0
        self.calls = []
        self.cleaning_requests = []
        self._lock = threading.Lock()
        self._sleep = sleep

    @property
    def exhausted(self) -> bool:
        return self.position >= len(self.events)

    def _next(self, expected: type):
        with self._lock:
            if self.position >= len(self.events):
                raise ScriptExhausted(f"Script exhausted after {len(self.events)} events")
            event = self.events[self.position]
            self.position += 1

        if isinstance(event, Fault):
            _raise_fault(event)
        if not isinstance(event, expected):
            raise ScriptMismatch(
                f"Event {self.position - 1} is {type(event).__name__}, expected {expected.__name__}"
            )
        return event

    def _consume(self, expected: type, describe: str):
        event, retried = call_with_retries(
            lambda: self._next(expected),
            self.config.max_retries,
            self.config.backoff_seconds,
            sleep=self._sleep,
            describe=describe,
        )
        with self._lock:
            self.retries += retried
        return event

    def continue_reasoning(self, prompt_text: str, partial_response: str, params: GenerationParams) -> RolloutResult:
        self.calls.append(("reasoning", self.config.reasoning_model_id))
        event = self._consume(Reason, "mock reasoning")

        tokens = split_tokens(event.text)
        if len(tokens) > params.max_new_tokens:
            tokens = tokens[: params.max_new_tokens]
            finish = FinishReason.LENGTH
        elif event.finish_reason is not None:
            finish = event.finish_reason
        else:
            finish = FinishReason.LENGTH if len(tokens) == params.max_new_tokens else FinishReason.STOP

        return RolloutResult(text="".join(tokens), completion_tokens=len(tokens), finish_reason=finish)

    def request_cleaning(self, system_text: str, user_text: str, schema: dict, params: GenerationParams) -> str:
        self.calls.append(("cleaning", self.config.cleaning_model_id))
        self.cleaning_requests.append((system_text, user_text))
        return self._consume(Clean, "mock cleaning").raw

    def count_tokens(self, text: str) -> TokenCount:
        return TokenCount(len(split_tokens(text)), False)


def mock_script(events, **kwargs) -> MockBackend:
    """
    Build a MockBackend that replays `events`.

    Args:
        events (list): Reason, Clean and Fault events in consumption order.

    Returns:
        MockBackend: Consuming past the end raises ScriptExhausted.
    """
    return MockBackend(events, **kwargs)
