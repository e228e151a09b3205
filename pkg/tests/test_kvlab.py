import numpy as np
import pytest

from kvlab import (
    RopeParams,
    ToyCache,
    attention_step,
    build_cache,
    excise_and_rotate,
    random_configs,
    rope_apply,
    verify_equivalence,
)


def test_rotation_preserves_norm_and_inverts():
    params = RopeParams(head_dim=8)
    vec = np.random.default_rng(0).standard_normal(8)
    rotated = rope_apply(vec, 17, params)

    assert np.linalg.norm(rotated) == pytest.approx(np.linalg.norm(vec))
    assert np.allclose(rope_apply(rotated, -17, params), vec)


def test_rotations_compose():
    params = RopeParams(head_dim=16)
    vec = np.random.default_rng(1).standard_normal(16)

    assert np.allclose(rope_apply(rope_apply(vec, 5, params), 7, params), rope_apply(vec, 12, params))


def test_rope_params_validation():
    with pytest.raises(ValueError):
        RopeParams(head_dim=7)
    with pytest.raises(ValueError):
        rope_apply(np.zeros(4), 0, RopeParams(head_dim=8))


def test_excision_shifts_later_positions():
    params = RopeParams(head_dim=4)
    rng = np.random.default_rng(2)
    cache = build_cache(rng.standard_normal((6, 4)), rng.standard_normal((6, 4)), params)
    edited = excise_and_rotate(cache, (1, 3), params)

    assert edited.positions.tolist() == [0, 1, 2, 3]
    assert np.array_equal(edited.values, np.concatenate([cache.values[:1], cache.values[3:]]))
    assert np.array_equal(edited.keys[0], cache.keys[0])


def test_empty_span_leaves_cache_unchanged():
    params = RopeParams(head_dim=4)
    cache = build_cache(np.ones((3, 4)), np.ones((3, 4)), params)

    assert excise_and_rotate(cache, (2, 2), params) is cache
    with pytest.raises(ValueError):
        excise_and_rotate(cache, (2, 9), params)


def test_attention_needs_a_cache():
    params = RopeParams(head_dim=4)
    empty = build_cache(np.zeros((0, 4)), np.zeros((0, 4)), params)

    with pytest.raises(ValueError):
        attention_step(np.ones(4), 0, empty, params)


def test_sequence_longer_than_max_positions():
    with pytest.raises(ValueError):
        build_cache(np.ones((10, 4)), np.ones((10, 4)), RopeParams(head_dim=4, max_positions=8))


def test_excise_and_rotate_matches_reprefill():
    rng = np.random.default_rng(100)
    reports = [verify_equivalence(seq, span, params, rng=rng) for seq, span, params in random_configs(100, seed=3)]

    assert all(r.passed for r in reports)
    assert max(r.max_rel_err for r in reports) <= 1e-5
    assert {r.head_dim for r in reports} <= {4, 8, 16}
    assert max(r.seq_len for r in reports) <= 64


def test_skipping_rotation_fails_every_case():
    rng = np.random.default_rng(100)
    reports = [
        verify_equivalence(seq, span, params, rng=rng, rotate=False) for seq, span, params in random_configs(100, seed=3)
    ]

    assert not any(r.passed for r in reports)


def test_report_is_json_ready():
    seq, span, params = next(random_configs(1, seed=0))
    report = verify_equivalence(seq, span, params).to_dict()

    assert set(report) == {"seq_len", "head_dim", "span", "max_abs_err", "max_rel_err", "key_rel_err", "passed"}


def test_position_zero_is_identity():
    params = RopeParams(head_dim=8)
    vec = np.random.default_rng(3).standard_normal(8)

    np.testing.assert_allclose(rope_apply(vec, 0, params), vec, rtol=0, atol=1e-12)


def test_rotation_is_additive_and_keeps_norm_on_random_vectors():
    rng = np.random.default_rng(4)
    for _ in range(100):
        params = RopeParams(head_dim=int(rng.choice([2, 4, 8, 16])))
        vec = rng.standard_normal(params.head_dim)
        a, b = (int(p) for p in rng.integers(-256, 256, size=2))

        np.testing.assert_allclose(
            rope_apply(rope_apply(vec, a, params), b, params), rope_apply(vec, a + b, params), rtol=0, atol=1e-12
        )
        assert np.linalg.norm(rope_apply(vec, a, params)) == pytest.approx(np.linalg.norm(vec), rel=1e-12)


def test_single_entry_cache_returns_its_value():
    params = RopeParams(head_dim=4)
    rng = np.random.default_rng(5)
    cache = build_cache(rng.standard_normal((1, 4)), rng.standard_normal((1, 3)), params)

    out = attention_step(rng.standard_normal(4), 9, cache, params)

    np.testing.assert_array_equal(out, cache.values[0])


def test_identical_keys_average_their_values():
    params = RopeParams(head_dim=4)
    key = np.array([0.3, -1.2, 0.5, 2.0])
    values = np.array([[1.0, 2.0], [3.0, -4.0]])
    cache = ToyCache(np.array([0, 1]), np.stack([key, key]), values)

    out = attention_step(np.array([1.0, 0.0, -1.0, 0.5]), 2, cache, params)

    np.testing.assert_allclose(out, values.mean(axis=0), rtol=0, atol=1e-12)


def rotate_dense(vec, position, params):
    # Pairs as complex numbers, rotated by e^{i * position * theta}
    pairs = vec[0::2] + 1j * vec[1::2]
    thetas = params.base ** (-np.arange(0, params.head_dim, 2) / params.head_dim)
    rotated = pairs * np.exp(1j * position * thetas)
    out = np.empty(params.head_dim)
    out[0::2], out[1::2] = rotated.real, rotated.imag
    return out


def test_attention_matches_dense_recompute():
    rng = np.random.default_rng(6)
    for _ in range(50):
        params = RopeParams(head_dim=int(rng.choice([4, 8, 16])))
        length = int(rng.integers(1, 40))
        raw_keys = rng.standard_normal((length, params.head_dim))
        values = rng.standard_normal((length, 5))
        query = rng.standard_normal(params.head_dim)
        query_position = length + int(rng.integers(0, 10))

        keys = np.array([rotate_dense(k, p, params) for p, k in enumerate(raw_keys)])
        scores = keys @ rotate_dense(query, query_position, params) / np.sqrt(params.head_dim)
        weights = np.exp(scores - scores.max())
        expected = (weights / weights.sum()) @ values

        out = attention_step(query, query_position, build_cache(raw_keys, values, params), params)
        np.testing.assert_allclose(out, expected, rtol=0, atol=1e-12)
