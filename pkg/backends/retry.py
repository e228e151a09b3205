import time
from typing import Callable, TypeVar

from logger import logger
from .errors import BackendError

T = TypeVar("T")


def call_with_retries(
    fn: Callable[[], T],
    max_retries: int,
    backoff_seconds: float,
    sleep: Callable[[float], None] = time.sleep,
    describe: str = "request",
) -> tuple[T, int]:
    """
    Run `fn`, retrying retryable BackendErrors with exponential backoff.

    Args:
        fn (Callable):           Zero-argument request.
        max_retries (int):       Extra attempts after the first.
        backoff_seconds (float): Base delay; attempt n waits base * 2**n.
        sleep (Callable):        Injected for tests.
        describe (str):          Label used in log lines.

    Returns:
        tuple: (result, number of retries spent).
    """
    attempt = 0
    while True:
        try:
            return fn(), attempt
        except BackendError as e:
            if not e.retryable or attempt >= max_retries:
                raise
            delay = backoff_seconds * (2**attempt)
            logger.warning(
                f"{describe} failed on attempt {attempt + 1}/{max_retries + 1}: {e}; retrying in {delay:.1f}s"
            )
            sleep(delay)
            attempt += 1
