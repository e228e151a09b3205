import numpy as np

MIN_UNIT_CHARS = 50
MIN_REPEATS = 4
WINDOW_CHARS = 4000


def detect_degeneration(
    tail_text: str,
    min_unit: int = MIN_UNIT_CHARS,
    min_repeats: int = MIN_REPEATS,
    window: int = WINDOW_CHARS,
) -> bool:
    """
    Flag repetitive looping in the tail of a generation.

    True iff, within the last `window` characters, some unit of at least
    `min_unit` characters occurs `min_repeats` times back-to-back. For each
    period p this is a run of at least (min_repeats - 1) * p positions where
    text[i] == text[i + p].

    Args:
        tail_text (str):   Recent generated text.
        min_unit (int):    Shortest repeating unit, in characters.
        min_repeats (int): Consecutive copies required.
        window (int):      How much of the tail to inspect.

    Returns:
        bool: Whether a loop was found.
    """
    text = tail_text[-window:]
    if len(text) < min_unit * min_repeats:
        return False

    codes = np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32)
    needed_repeats = min_repeats - 1

    for period in range(min_unit, len(codes) // min_repeats + 1):
        equal = codes[:-period] == codes[period:]
        # Longest run of equal positions via edge detection
        edges = np.diff(np.concatenate(([0], equal.view(np.int8), [0])))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        if starts.size and np.max(ends - starts) >= needed_repeats * period:
            return True

    return False
