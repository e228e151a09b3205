from dataclasses import dataclass

import numpy as np

from .rope import RopeParams, rope_apply


@dataclass(frozen=True)
class ToyCache:
    """
    Single-head attention cache.

    Keys are stored already rotated to their position; values carry no
    positional rotation.
    """

    positions: np.ndarray
    keys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if not (len(self.positions) == len(self.keys) == len(self.values)):
            raise ValueError("positions, keys and values must have the same length")
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError("Cache positions must be strictly increasing")
        if not (np.all(np.isfinite(self.keys)) and np.all(np.isfinite(self.values))):
            raise ValueError("Cache vectors must be finite")

    def __len__(self):
        return len(self.positions)


def build_cache(raw_keys: np.ndarray, values: np.ndarray, params: RopeParams, start: int = 0) -> ToyCache:
    """Prefill: rotate each key to its position start, start + 1, ..."""
    if start + len(raw_keys) > params.max_positions:
        raise ValueError(f"Sequence of {len(raw_keys)} tokens exceeds max_positions={params.max_positions}")
    positions = np.arange(start, start + len(raw_keys))
    return ToyCache(positions, rope_apply(raw_keys, positions, params), np.asarray(values, dtype=np.float64))


def attention_step(query: np.ndarray, query_position: int, cache: ToyCache, params: RopeParams) -> np.ndarray:
    """Softmax attention of one rotated query over the cached keys and values."""
    if len(cache) == 0:
        raise ValueError("attention_step needs a non-empty cache")

    q = rope_apply(query, query_position, params)
    scores = cache.keys @ q / np.sqrt(params.head_dim)
    weights = np.exp(scores - scores.max())
    weights /= weights.sum()
    return weights @ cache.values


def excise_and_rotate(cache: ToyCache, span: tuple[int, int], params: RopeParams, rotate: bool = True) -> ToyCache:
    """
    Drop the entries in positions [start, end) and shift later entries back.

    Later entries move to position - d with d = end - start; their keys are
    re-rotated by -d so they match a fresh prefill at the new positions.
    Values and earlier entries are untouched.

    Args:
        cache (ToyCache):     Cache to edit.
        span (tuple):         (start_pos, end_pos), end exclusive.
        params (RopeParams):  Rotation frequencies.
        rotate (bool):        False skips the key re-rotation (negative control).

    Returns:
        ToyCache: The edited cache (the same object for an empty span).
    """
    start, end = span
    if end <= start:
        return cache

    if len(cache) == 0 or start < cache.positions[0] or end > cache.positions[-1] + 1:
        raise ValueError(f"Span {span} is outside the cached positions")

    shift = end - start
    before = cache.positions < start
    after = cache.positions >= end

    tail_keys = cache.keys[after]
    if rotate and len(tail_keys):
        tail_keys = rope_apply(tail_keys, -shift, params)

    return ToyCache(
        positions=np.concatenate([cache.positions[before], cache.positions[after] - shift]),
        keys=np.concatenate([cache.keys[before], tail_keys]),
        values=np.concatenate([cache.values[before], cache.values[after]]),
    )
