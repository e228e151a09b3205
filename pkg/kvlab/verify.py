from dataclasses import asdict, dataclass

import numpy as np

from .cache import attention_step, build_cache, excise_and_rotate
from .rope import RopeParams


@dataclass(frozen=True)
class EquivalenceReport:
    seq_len: int
    head_dim: int
    span: tuple[int, int]
    max_abs_err: float
    max_rel_err: float
    key_rel_err: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _rel(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    if a.size == 0:
        return 0.0, 0.0
    abs_err = float(np.max(np.abs(a - b)))
    scale = float(np.max(np.abs(b)))
    return abs_err, (abs_err / scale if scale > 0 else abs_err)


def verify_equivalence(
    seq: np.ndarray,
    span: tuple[int, int],
    params: RopeParams,
    tolerance: float = 1e-5,
    probes: int = 8,
    rng: np.random.Generator | None = None,
    rotate: bool = True,
) -> EquivalenceReport:
    """
    Compare cache surgery against re-prefilling the pruned sequence.

    Token vectors are projected to keys and values with fixed random matrices.
    Path A prefills the full sequence and calls excise_and_rotate; path B
    prefills the sequence with the span removed. Both caches answer the same
    probe queries at the next free position.

    Args:
        seq (np.ndarray):        (n, head_dim) token vectors.
        span (tuple):            (start, end) positions to remove.
        params (RopeParams):     Rotation frequencies.
        tolerance (float):       Maximum accepted relative error.
        probes (int):            Number of probe queries.
        rng (np.random.Generator): Source of projections and probes.
        rotate (bool):           False runs the no-rotation negative control.

    Returns:
        EquivalenceReport: Errors over probe outputs and cached keys; passed iff
                           both relative errors are within tolerance.
    """
    rng = rng or np.random.default_rng(0)
    seq = np.asarray(seq, dtype=np.float64)
    d = params.head_dim
    w_k = rng.standard_normal((d, d)) / np.sqrt(d)
    w_v = rng.standard_normal((d, d)) / np.sqrt(d)
    queries = rng.standard_normal((probes, d))

    start, end = span
    full = build_cache(seq @ w_k, seq @ w_v, params)
    path_a = excise_and_rotate(full, span, params, rotate=rotate)

    kept = np.concatenate([seq[:start], seq[max(end, start):]])
    path_b = build_cache(kept @ w_k, kept @ w_v, params)

    next_position = len(kept)
    out_a = np.stack([attention_step(q, next_position, path_a, params) for q in queries])
    out_b = np.stack([attention_step(q, next_position, path_b, params) for q in queries])

    max_abs, max_rel = _rel(out_a, out_b)
    _, key_rel = _rel(path_a.keys, path_b.keys)

    return EquivalenceReport(
        seq_len=len(seq),
        head_dim=d,
        span=(int(start), int(end)),
        max_abs_err=max_abs,
        max_rel_err=max_rel,
        key_rel_err=key_rel,
        passed=max_rel <= tolerance and key_rel <= tolerance,
    )


def random_configs(count: int, seed: int = 0, max_len: int = 64, head_dims=(4, 8, 16)):
    """
    Yield (seq, span, params) cases with a non-empty span and a non-empty tail.

    The tail guarantees that the no-rotation control has something to get wrong.
    """
    rng = np.random.default_rng(seed)
    for _ in range(count):
        head_dim = int(rng.choice(head_dims))
        length = int(rng.integers(3, max_len + 1))
        start = int(rng.integers(0, length - 1))
        end = int(rng.integers(start + 1, length))
        seq = rng.standard_normal((length, head_dim))
        yield seq, (start, end), RopeParams(head_dim=head_dim, max_positions=max_len)
