import json
import random

import pytest

from codec import (
    CLEANING_RESPONSE_SCHEMA,
    COT_PLACEHOLDER,
    MAX_PAIRS,
    AnchorPair,
    CleaningPromptTemplate,
    MalformedCommand,
    PruneCommand,
    SchemaViolation,
    TemplateError,
    format_cleaning_prompt,
    load_template,
    parse_command,
    render_cleaning_prompt,
    serialize_command,
)
from context import append_generation, new_context


def test_parse_bare_array():
    cmd = parse_command('[{"prefix": "Wait,", "suffix": "again."}]')

    assert cmd.pairs == (AnchorPair(prefix="Wait,", suffix="again."),)


def test_parse_empty_array():
    assert parse_command("[]") == PruneCommand()
    assert len(parse_command("  []\n")) == 0


def test_parse_fenced_array():
    raw = '```json\n[{"prefix": "a", "suffix": "b"}, {"prefix": "c", "suffix": "d"}]\n```'

    assert [p.prefix for p in parse_command(raw).pairs] == ["a", "c"]


def test_parse_wrapped_array():
    cmd = parse_command('{"pairs": [{"prefix": "a", "suffix": "b"}]}')

    assert len(cmd) == 1


def test_anchor_whitespace_is_kept_verbatim():
    cmd = parse_command('[{"prefix": "  Let me\\n", "suffix": "done. "}]')

    assert cmd.pairs[0].prefix == "  Let me\n"
    assert cmd.pairs[0].suffix == "done. "


@pytest.mark.parametrize("raw", ["not json", '{"a": 1}', '"text"', '{"pairs": [], "extra": []}', "```\nnope\n```"])
def test_malformed_output(raw):
    with pytest.raises(MalformedCommand):
        parse_command(raw)


@pytest.mark.parametrize(
    "raw",
    [
        '[{"prefix": "a"}]',
        '[{"prefix": "", "suffix": "b"}]',
        '[{"prefix": 1, "suffix": "b"}]',
        '["a"]',
    ],
)
def test_schema_violations(raw):
    with pytest.raises(SchemaViolation) as info:
        parse_command(raw)

    assert len(info.value.problems) == 1


def test_schema_violation_lists_every_bad_element():
    raw = json.dumps([{"prefix": "a", "suffix": "b"}, {"prefix": "a"}, {"suffix": "b"}])

    with pytest.raises(SchemaViolation) as info:
        parse_command(raw)

    assert len(info.value.problems) == 2
    assert "element 1" in info.value.problems[0]


def test_too_many_pairs():
    raw = json.dumps([{"prefix": "a", "suffix": "b"}] * 65)

    with pytest.raises(SchemaViolation):
        parse_command(raw)


def test_anchor_containing_sentinel_is_rejected():
    raw = '[{"prefix": "a <Del>", "suffix": "b"}]'

    assert len(parse_command(raw)) == 1
    with pytest.raises(SchemaViolation):
        parse_command(raw, sentinel="<Del>")


def test_serialize_is_compact_and_parses_back():
    cmd = PruneCommand(pairs=(AnchorPair(prefix="Wait, \"no\"", suffix="é\n"), AnchorPair(prefix="x", suffix="y")))
    text = serialize_command(cmd)

    assert text.startswith('[{"prefix":')
    assert "é" in text
    assert parse_command(text) == cmd


ANCHOR_ALPHABET = "abcXYZ \n\t\"\\`{}[],:é∑"


def random_command(rng):
    def anchor():
        return "".join(rng.choice(ANCHOR_ALPHABET) for _ in range(rng.randint(1, 20)))

    return PruneCommand(pairs=tuple(AnchorPair(prefix=anchor(), suffix=anchor()) for _ in range(rng.randint(0, MAX_PAIRS))))


def test_random_commands_survive_serialize_and_parse():
    rng = random.Random(5)
    for _ in range(500):
        cmd = random_command(rng)

        assert parse_command(serialize_command(cmd), sentinel="<Del>") == cmd


def test_response_schema_shape():
    assert CLEANING_RESPONSE_SCHEMA["type"] == "array"
    assert CLEANING_RESPONSE_SCHEMA["items"]["required"] == ["prefix", "suffix"]


def test_bundled_template_renders_sentinel_and_cot():
    template = load_template("<Del>")
    system, user = format_cleaning_prompt("step one\n\nstep two", template)

    assert "<Del> in the CoT reasoning indicates" in system
    assert "<SENTINEL>" not in system
    assert user == "### CoT Reasoning:\nstep one\n\nstep two"


def test_custom_sentinel_reaches_the_system_prompt():
    system, _ = format_cleaning_prompt("x", load_template("[removed]"))

    assert "[removed] in the CoT reasoning" in system


def test_render_uses_generated_region_only():
    ctx = append_generation(new_context("PROMPT TEXT"), "reasoning so far", 3)
    _, user = render_cleaning_prompt(ctx, load_template())

    assert "reasoning so far" in user
    assert "PROMPT TEXT" not in user


def test_cot_containing_placeholder_text_is_inserted_once():
    template = load_template()
    _, user = format_cleaning_prompt(f"quoted {COT_PLACEHOLDER} here", template)

    assert user.endswith(f"quoted {COT_PLACEHOLDER} here")


@pytest.mark.parametrize("user_text", ["no placeholder", f"{COT_PLACEHOLDER} and {COT_PLACEHOLDER}"])
def test_template_needs_exactly_one_placeholder(user_text):
    with pytest.raises(TemplateError):
        CleaningPromptTemplate("system", user_text)


def test_missing_template_directory(tmp_path):
    with pytest.raises(TemplateError):
        load_template(template_dir=tmp_path / "nowhere")


def test_custom_template_directory(tmp_path):
    (tmp_path / "cleaning_system.txt").write_text("Clean it. <SENTINEL> marks removals.\n")
    (tmp_path / "cleaning_user.txt").write_text(f"CoT:\n{COT_PLACEHOLDER}")
    system, user = format_cleaning_prompt("abc", load_template("<X>", tmp_path))

    assert system == "Clean it. <X> marks removals."
    assert user == "CoT:\nabc"
