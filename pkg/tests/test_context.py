import random

import pytest

from context import (
    Context,
    Origin,
    Segment,
    TokenCount,
    append_generation,
    estimate_tokens,
    flatten,
    generated_text,
    new_context,
    rebuild_from_flat,
    reuse_boundary,
    window_start,
)

PROMPT = "<|im_start|>user\nWhat is 6 * 7?<|im_end|>\n<|im_start|>assistant\n"


def words(text):
    return TokenCount(len(text.split()), False)


def test_new_context_is_empty():
    ctx = new_context(PROMPT)

    assert ctx.segments == ()
    assert ctx.total_generated_tokens == 0
    assert ctx.tokens_since_last_clean == 0
    assert ctx.cleaning_iterations_used == 0
    assert flatten(ctx) == PROMPT


def test_append_generation_advances_both_counters():
    ctx = append_generation(new_context(PROMPT), "First we multiply.", 4)
    ctx = append_generation(ctx, "\n\nSo 42.", 3)

    assert ctx.total_generated_tokens == 7
    assert ctx.tokens_since_last_clean == 7
    assert generated_text(ctx) == "First we multiply.\n\nSo 42."
    assert flatten(ctx) == PROMPT + "First we multiply.\n\nSo 42."
    assert not ctx.estimated


def test_append_generation_estimates_missing_counts():
    ctx = append_generation(new_context(PROMPT), "x" * 10, 0)

    assert ctx.total_generated_tokens == 3
    assert ctx.estimated


def test_append_empty_generation_adds_nothing_to_counters():
    ctx = append_generation(new_context(PROMPT), "", 5)

    assert ctx.total_generated_tokens == 0
    assert ctx.segments[-1] == Segment("", Origin.GENERATED, 0)


def test_estimate_tokens_rounds_up():
    assert estimate_tokens("") == TokenCount(0, True)
    assert estimate_tokens("abcde") == TokenCount(2, True)


@pytest.mark.parametrize("text, count", [("abc", 0), ("", 2), ("abc", -1)])
def test_segment_rejects_inconsistent_counts(text, count):
    with pytest.raises(ValueError):
        Segment(text, Origin.GENERATED, count)


def test_context_rejects_mismatched_totals():
    with pytest.raises(ValueError):
        Context(PROMPT, (Segment("abc", Origin.GENERATED, 1),), total_generated_tokens=2)

    with pytest.raises(ValueError):
        Context(PROMPT, (Segment("abc", Origin.GENERATED, 1),), total_generated_tokens=1, tokens_since_last_clean=2)


def test_rebuild_splits_on_sentinel_and_resets_the_interval():
    ctx = rebuild_from_flat(PROMPT, "alpha beta<Del>gamma<Del>", "<Del>", words, cleaning_iterations_used=2)

    assert [s.origin for s in ctx.segments] == [
        Origin.GENERATED,
        Origin.SENTINEL,
        Origin.GENERATED,
        Origin.SENTINEL,
    ]
    assert generated_text(ctx) == "alpha beta<Del>gamma<Del>"
    assert ctx.total_generated_tokens == 3
    assert ctx.context_tokens == 5
    assert ctx.tokens_since_last_clean == 0
    assert ctx.cleaning_iterations_used == 2
    assert ctx.segments_at_last_clean == 4
    assert ctx.prompt_text == PROMPT


def test_rebuild_with_default_counter_is_estimated():
    ctx = rebuild_from_flat(PROMPT, "abcdefgh", "<Del>")

    assert ctx.total_generated_tokens == 2
    assert ctx.estimated


def test_rebuild_rejects_empty_sentinel():
    with pytest.raises(ValueError):
        rebuild_from_flat(PROMPT, "text", "")


def test_reuse_boundary_is_common_prefix_length():
    assert reuse_boundary("abcdef", "abcXef") == 3
    assert reuse_boundary("abc", "abc") == 3
    assert reuse_boundary("", "abc") == 0


def test_window_start_marks_text_since_last_clean():
    ctx = rebuild_from_flat(PROMPT, "kept<Del>", "<Del>", words)
    ctx = append_generation(ctx, " new words", 2)

    assert generated_text(ctx)[window_start(ctx):] == " new words"
    assert window_start(new_context(PROMPT)) == 0


def random_text(rng, alphabet="ab c\n", low=1, high=40):
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(low, high)))


def random_context(rng, appends=(1, 6)):
    ctx = new_context(PROMPT)
    for _ in range(rng.randint(*appends)):
        text = random_text(rng)
        ctx = append_generation(ctx, text, rng.randint(1, 3 * len(text)))
    return ctx


def test_flatten_survives_rebuild_on_random_contexts():
    rng = random.Random(7)
    for _ in range(100):
        ctx = random_context(rng)
        flat = generated_text(ctx)
        if rng.random() < 0.5:
            start = rng.randrange(len(flat) + 1)
            flat = flat[:start] + "<Del>" + flat[rng.randint(start, len(flat)):]

        rebuilt = rebuild_from_flat(PROMPT, flat, "<Del>", words)

        assert flatten(rebuilt) == PROMPT + flat
        assert flatten(rebuild_from_flat(PROMPT, generated_text(ctx), "<Del>", words, previous=ctx)) == flatten(ctx)


def test_rebuild_of_unchanged_text_keeps_reported_usage():
    ctx = append_generation(new_context(PROMPT), "x" * 200, 10)

    rebuilt = rebuild_from_flat(PROMPT, "x" * 200, "<Del>", estimate_tokens, cleaning_iterations_used=1, previous=ctx)

    assert rebuilt.total_generated_tokens == 10
    assert rebuilt.context_tokens == 10
    assert rebuilt.tokens_since_last_clean == 0
    assert rebuilt.cleaning_iterations_used == 1
    assert not rebuilt.estimated


def test_rebuild_scales_estimates_to_reported_usage():
    ctx = append_generation(new_context(PROMPT), "a" * 100 + "b" * 100, 10)

    rebuilt = rebuild_from_flat(PROMPT, "a" * 100 + "<Del>", "<Del>", estimate_tokens, previous=ctx)

    # 25 estimated tokens scaled by 10 / 50
    assert rebuilt.total_generated_tokens == 5
    assert rebuilt.estimated


def test_prune_and_rebuild_never_grows_generated_tokens():
    rng = random.Random(11)
    for _ in range(100):
        ctx = random_context(rng, appends=(2, 6))
        old = generated_text(ctx)
        start = rng.randrange(len(old))
        new = old[:start] + "<Del>" + old[rng.randint(start + 1, len(old)):]

        rebuilt = rebuild_from_flat(PROMPT, new, "<Del>", estimate_tokens, previous=ctx)

        assert rebuilt.total_generated_tokens <= ctx.total_generated_tokens
        assert generated_text(rebuilt) == new


def boundary_by_scan(a, b):
    i = 0
    while i < min(len(a), len(b)) and a[i] == b[i]:
        i += 1
    return i


def test_reuse_boundary_matches_character_scan_after_splices():
    rng = random.Random(3)
    for _ in range(100):
        old = random_text(rng, alphabet="ab", low=10_000, high=10_000)
        start = rng.randrange(len(old))
        new = old[:start] + "<Del>" + old[rng.randint(start, len(old)):]

        assert reuse_boundary(old, new) == boundary_by_scan(old, new)
        assert reuse_boundary(old, new) == reuse_boundary(new, old)
