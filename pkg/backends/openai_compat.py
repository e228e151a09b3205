import os
import threading
import time

import httpx

from context import TokenCount, estimate_tokens
from logger import logger
from .errors import ContextLengthExceeded, ServerError, TransportError
from .retry import call_with_retries
from .types import BackendConfig, FinishReason, GenerationParams, RolloutResult

_CONTEXT_LENGTH_MARKERS = ("maximum context length", "context length", "too many tokens", "context_length_exceeded")


class OpenAICompatibleBackend:
    """
    Client for an OpenAI-compatible server (vLLM and friends).

    Reasoning uses the raw completion endpoint: the chat-templated prompt with
    the partial response appended, so generation resumes where the (possibly
    pruned) transcript ends. Cleaning uses the chat endpoint, routed to the
    cleaning adapter, with the pruning-command schema attached as a structured
    output constraint and thinking disabled.

    Args:
        config (BackendConfig):         Endpoint, model ids, timeouts and retries.
        transport (httpx.BaseTransport): Optional transport (httpx.MockTransport in tests).
        sleep (Callable):                Backoff sleep, injectable for tests.
    """

    def __init__(self, config: BackendConfig, transport=None, sleep=time.sleep):
        self.config = config
        self.retries = 0
        self._lock = threading.Lock()
        self._sleep = sleep
        self._tokenize_available = True

        headers = {}
        api_key = os.environ.get(config.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        self._client = httpx.Client(
            base_url=config.base_url,
            headers=headers,
            timeout=httpx.Timeout(config.request_timeout, connect=10.0),
            transport=transport,
        )

    def close(self):
        self._client.close()

    def _send(self, path: str, body: dict) -> dict:
        try:
            response = self._client.post(path, json=body)
        except httpx.TransportError as exc:
            raise TransportError(f"Transport error on {path}: {exc}") from exc

        if response.status_code >= 400:
            text = response.text
            if response.status_code == 400 and any(m in text.lower() for m in _CONTEXT_LENGTH_MARKERS):
                raise ContextLengthExceeded(text[:300], status_code=400)
            raise ServerError(f"Server error {response.status_code} on {path}: {text[:300]}", response.status_code)

        try:
            return response.json()
        except ValueError as exc:
            raise ServerError(f"Unparseable response body on {path}: {response.text[:200]}", response.status_code) from exc

    def _post(self, path: str, body: dict) -> dict:
        data, retried = call_with_retries(
            lambda: self._send(path, body),
            self.config.max_retries,
            self.config.backoff_seconds,
            sleep=self._sleep,
            describe=f"POST {path}",
        )
        if retried:
            with self._lock:
                self.retries += retried
        return data

    @staticmethod
    def _sampling(params: GenerationParams) -> dict:
        body = {
            "max_tokens": params.max_new_tokens,
            "temperature": params.temperature,
            "top_p": params.top_p,
            "top_k": params.top_k,
        }
        if params.stop_sequences:
            body["stop"] = list(params.stop_sequences)
        return body

    def continue_reasoning(self, prompt_text: str, partial_response: str, params: GenerationParams) -> RolloutResult:
        body = {
            "model": self.config.reasoning_model_id,
            "prompt": prompt_text + partial_response,
            "echo": False,
            **self._sampling(params),
        }
        logger.debug(f"Reasoning request: model={body['model']} max_tokens={params.max_new_tokens}")

        started = time.perf_counter()
        data = self._post("/completions", body)
        latency = time.perf_counter() - started

        try:
            choice = data["choices"][0]
        except (KeyError, IndexError) as exc:
            raise ServerError(f"No choices in completion response: {str(data)[:200]}") from exc

        text = choice.get("text") or ""
        usage = data.get("usage") or {}
        tokens = usage.get("completion_tokens")
        estimated = tokens is None
        if estimated:
            counted = self.count_tokens(text)
            tokens, estimated = counted.count, counted.estimated

        return RolloutResult(
            text=text,
            completion_tokens=tokens,
            finish_reason=FinishReason.from_server(choice.get("finish_reason")),
            latency=latency,
            estimated=estimated,
        )

    def request_cleaning(self, system_text: str, user_text: str, schema: dict, params: GenerationParams) -> str:
        body = {
            "model": self.config.cleaning_model_id,
            "messages": [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ],
            "response_format": {
                "type": "json_schema",
                "json_schema": {"name": "prune_command", "schema": schema, "strict": True},
            },
            "chat_template_kwargs": {"enable_thinking": False},
            **self._sampling(params),
        }
        logger.debug(f"Cleaning request: model={body['model']} cot_chars={len(user_text)}")

        data = self._post("/chat/completions", body)
        try:
            return data["choices"][0]["message"].get("content") or ""
        except (KeyError, IndexError, AttributeError) as exc:
            raise ServerError(f"No message in chat response: {str(data)[:200]}") from exc

    def _tokenize_endpoint(self) -> str:
        if self.config.tokenize_url:
            return self.config.tokenize_url
        root = self.config.base_url.rstrip("/")
        if root.endswith("/v1"):
            root = root[: -len("/v1")]
        return f"{root}/tokenize"

    def count_tokens(self, text: str) -> TokenCount:
        if not text:
            return TokenCount(0, False)

        if self._tokenize_available:
            try:
                response = self._client.post(
                    self._tokenize_endpoint(),
                    json={"model": self.config.reasoning_model_id, "prompt": text, "add_special_tokens": False},
                )
                if response.status_code == 200:
                    data = response.json()
                    count = data.get("count")
                    if count is None and "tokens" in data:
                        count = len(data["tokens"])
                    if count is not None:
                        return TokenCount(int(count), False)
                logger.debug(f"Tokenize endpoint answered {response.status_code}; using estimates")
            except (httpx.HTTPError, ValueError) as exc:
                logger.debug(f"Tokenize endpoint unavailable ({exc}); using estimates")
            self._tokenize_available = False

        return estimate_tokens(text)
