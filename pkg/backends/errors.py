class BackendError(Exception):
    """Base exception for backend failures."""

    retryable = False

    def __init__(self, message: str, status_code: int | None = None):
        self.status_code = status_code
        super().__init__(message)


class TransportError(BackendError):
    """Connection failure or timeout."""

    retryable = True


class ContextLengthExceeded(BackendError):
    """The server refused the request because the context is too long."""


class ServerError(BackendError):
    """Non-transport server failure; 429 and 5xx are worth retrying."""

    def __init__(self, message: str, status_code: int | None = None):
        super().__init__(message, status_code)
        self.retryable = status_code is not None and (status_code == 429 or status_code >= 500)


class ScriptExhausted(BackendError):
    """A scripted backend was asked for more events than it holds."""


class ScriptMismatch(BackendError):
    """A scripted backend's next event does not fit the requested mode."""
