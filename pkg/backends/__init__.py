from .base import Backend
from .errors import (
    BackendError,
    ContextLengthExceeded,
    ScriptExhausted,
    ScriptMismatch,
    ServerError,
    TransportError,
)
from .mock import MOCK_CONFIG, Clean, Fault, MockBackend, Reason, mock_script
from .openai_compat import OpenAICompatibleBackend
from .retry import call_with_retries
from .simulated import SimulatedBackend
from .tokens import split_tokens
from .types import BackendConfig, FinishReason, GenerationParams, RolloutResult

# Backends selectable by name from the CLI and config file
BACKEND_REGISTRY = {
    "openai": OpenAICompatibleBackend,
    "simulated": SimulatedBackend,
}


def resolve_backend(backend_name):
    """
    Resolves a backend name to its class.

    Args:
        backend_name (str): The name of the backend, e.g., "openai".

    Returns:
        class: The backend class registered under that name.

    Raises:
        ValueError: If the backend name is invalid.
    """
    if backend_name not in BACKEND_REGISTRY:
        error_message = (
            f"Invalid backend: {backend_name}. "
            f"Valid backends are: {', '.join(BACKEND_REGISTRY)}"
        )
        raise ValueError(error_message)

    return BACKEND_REGISTRY[backend_name]


def create_backend(backend_name, config: BackendConfig, seed: int = 0):
    """Instantiate a registered backend; only the simulator takes a seed."""
    backend_class = resolve_backend(backend_name)
    if backend_class is SimulatedBackend:
        return SimulatedBackend(config, seed=seed)
    return backend_class(config)


__all__ = [
    "BACKEND_REGISTRY",
    "Backend",
    "BackendConfig",
    "BackendError",
    "Clean",
    "ContextLengthExceeded",
    "Fault",
    "FinishReason",
    "GenerationParams",
    "MOCK_CONFIG",
    "MockBackend",
    "OpenAICompatibleBackend",
    "Reason",
    "RolloutResult",
    "ScriptExhausted",
    "ScriptMismatch",
    "ServerError",
    "SimulatedBackend",
    "TransportError",
    "call_with_retries",
    "create_backend",
    "mock_script",
    "resolve_backend",
    "split_tokens",
]
