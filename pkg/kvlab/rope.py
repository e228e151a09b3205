from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RopeParams:
    head_dim: int
    base: float = 10000.0
    max_positions: int = 4096

    def __post_init__(self):
        if self.head_dim < 2 or self.head_dim % 2:
            raise ValueError(f"head_dim must be even and >= 2, got {self.head_dim}")
        if self.base <= 1:
            raise ValueError(f"base must be > 1, got {self.base}")

    @property
    def inv_freq(self) -> np.ndarray:
        """theta_i = base^(-2i / head_dim) for each rotated pair."""
        return self.base ** (-np.arange(0, self.head_dim, 2, dtype=np.float64) / self.head_dim)


def rope_apply(vec: np.ndarray, position, params: RopeParams) -> np.ndarray:
    """
    Rotate consecutive pairs (x_2i, x_2i+1) by position * theta_i.

    Args:
        vec (np.ndarray):      (..., head_dim) vectors.
        position (float|array): Scalar or array broadcastable to vec.shape[:-1];
                               negative positions rotate backwards.
        params (RopeParams):   Rotation frequencies.

    Returns:
        np.ndarray: Rotated copy, same shape; norms are preserved.
    """
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape[-1] != params.head_dim:
        raise ValueError(f"Expected last dimension {params.head_dim}, got {vec.shape[-1]}")

    angles = np.asarray(position, dtype=np.float64)[..., None] * params.inv_freq
    cos, sin = np.cos(angles), np.sin(angles)

    even, odd = vec[..., 0::2], vec[..., 1::2]
    out = np.empty(np.broadcast_shapes(vec.shape, cos.shape[:-1] + (params.head_dim,)), dtype=np.float64)
    out[..., 0::2] = even * cos - odd * sin
    out[..., 1::2] = even * sin + odd * cos
    return out
