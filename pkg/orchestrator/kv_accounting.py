from pydantic import BaseModel, ConfigDict, PositiveInt


class KVGeometry(BaseModel):
    """Attention cache shape; defaults describe a 36-layer, 8-KV-head, bf16 model."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    layers: PositiveInt = 36
    kv_heads: PositiveInt = 8
    head_dim: PositiveInt = 128
    bytes_per_element: PositiveInt = 2


def estimate_kv_bytes(tokens: int, geometry: KVGeometry) -> int:
    """Bytes held by the K and V caches for `tokens` positions."""
    return tokens * geometry.layers * geometry.kv_heads * geometry.head_dim * 2 * geometry.bytes_per_element
