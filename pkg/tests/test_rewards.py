import json
import random
import threading

import pytest

from backends import Clean, FinishReason, GenerationParams, RolloutResult, TransportError, mock_script
from codec import AnchorPair, PruneCommand, load_template, parse_command
from context import TokenCount
from evaluation import Trajectory
from pruning import GUARD_PRESETS, apply
from rewards import (
    CandidateInstance,
    chunk_trajectory,
    export_instances,
    filter_retain,
    score_and_mark,
    score_candidate,
    synthesize_chain,
    synthesize_sequential,
)

TEMPLATE = load_template()
NO_GUARD = GUARD_PRESETS["none"]


def trajectory(cot, source_id="t0"):
    return Trajectory(question="What is 6 * 7?", gold_answer="42", cot_text=cot, source_id=source_id)


def instance(acc_raw=None, acc_new=None, index=0, context_raw="raw context", context_new="new context", **extra):
    return CandidateInstance(
        source_id=f"s{index}",
        question=f"Question {index}?",
        gold_answer="42",
        chunk_index=0,
        cleaned_history="",
        current_chunk=context_raw,
        command=PruneCommand(pairs=(AnchorPair(prefix="raw", suffix="context"),)),
        context_raw=context_raw,
        context_new=context_new,
        sentinel="<Del>",
        guard=NO_GUARD,
        acc_raw=acc_raw,
        acc_new=acc_new,
        **extra,
    )


# Chunking


def test_chunks_without_paragraph_breaks_are_exact():
    chunks = chunk_trajectory(trajectory("x" * 10_000), chunk_tokens=1000)

    assert [len(c) for c in chunks] == [4000, 4000, 2000]


def test_short_trajectory_is_one_chunk():
    assert chunk_trajectory(trajectory("short"), chunk_tokens=1000) == ["short"]


def test_chunks_snap_back_to_paragraph_breaks():
    cot = "a" * 3800 + "\n\n" + "b" * 3000
    chunks = chunk_trajectory(trajectory(cot), chunk_tokens=1000)

    assert chunks[0] == "a" * 3800 + "\n\n"
    assert "".join(chunks) == cot


def test_distant_paragraph_break_is_ignored():
    cot = "a" * 1000 + "\n\n" + "b" * 5000
    chunks = chunk_trajectory(trajectory(cot), chunk_tokens=1000)

    assert len(chunks[0]) == 4000


def test_chunks_concatenate_to_original():
    rng = random.Random(3)
    for i in range(100):
        cot = "".join(rng.choice(["word ", "x", "\n\n", "\n"]) for _ in range(rng.randint(1, 3000)))
        size = rng.randint(1, 300)
        chunks = chunk_trajectory(trajectory(cot), chunk_tokens=size)

        assert "".join(chunks) == cot
        assert all(0 < len(c) <= size * 4 for c in chunks)


def test_chunk_size_must_be_positive():
    with pytest.raises(ValueError):
        chunk_trajectory(trajectory("abc"), chunk_tokens=0)


# Synthesis

C1 = "alpha beta gamma del"
C2 = "ta REDO this twice. "
C3 = "omega final answer. "


def test_noop_oracle_emits_nothing():
    oracle = mock_script([Clean("[]")] * 3)
    result = synthesize_chain(trajectory(C1 + C2 + C3), oracle, TEMPLATE, chunk_tokens=5)

    assert result.instances == []
    assert result.final_history == C1 + C2 + C3


def test_deletion_in_middle_chunk_reaches_later_history():
    oracle = mock_script([Clean("[]"), Clean('[{"prefix": "REDO", "suffix": "twice."}]'), Clean("[]")])
    result = synthesize_chain(trajectory(C1 + C2 + C3), oracle, TEMPLATE, chunk_tokens=5)

    (inst,) = result.instances
    assert inst.chunk_index == 1
    assert inst.cleaned_history == C1
    assert inst.current_chunk == C2
    assert inst.context_new == C1 + "ta <Del> "
    assert result.histories == [C1, C1 + "ta <Del> ", C1 + "ta <Del> " + C3]
    assert oracle.cleaning_requests[2][1] == "### CoT Reasoning:\n" + C1 + "ta <Del> " + C3


def test_history_is_protected_from_the_oracle():
    oracle = mock_script([Clean("[]"), Clean('[{"prefix": "alpha", "suffix": "REDO"}]'), Clean("[]")])
    result = synthesize_chain(trajectory(C1 + C2 + C3), oracle, TEMPLATE, chunk_tokens=5)

    assert result.final_history == C1 + C2 + C3
    assert result.instances[0].context_new == result.instances[0].context_raw


def test_unparseable_chunk_is_skipped():
    oracle = mock_script([Clean("[]"), Clean("I would delete the second part"), Clean("[]")])
    result = synthesize_chain(trajectory(C1 + C2 + C3), oracle, TEMPLATE, chunk_tokens=5)

    assert result.instances == []
    assert result.histories[1] == C1 + C2


def _constructed_case(rng, index):
    chunks, script, deleted = [], [], []
    for k in range(rng.randint(2, 6)):
        filler = "".join(rng.choice("abc ") for _ in range(14))
        if rng.random() < 0.5:
            chunks.append(f"ZZ{k}{filler}YY{k}")
            script.append(Clean(json.dumps([{"prefix": f"ZZ{k}", "suffix": f"YY{k}"}])))
            deleted.append(k)
        else:
            chunks.append(filler + "abcdef")
            script.append(Clean("[]"))
    return trajectory("".join(chunks), source_id=f"t{index}"), chunks, script, deleted


def _hand_traced_chain(chunks, deleted):
    history, chain = "", []
    for k, chunk in enumerate(chunks):
        text = history + chunk
        if k in deleted:
            start = text.index(f"ZZ{k}")
            end = text.index(f"YY{k}", start) + 3
            text = text[:start] + "<Del>" + text[end:]
        history = text
        chain.append(history)
    return chain


def test_chain_matches_hand_trace_on_constructed_trajectories():
    rng = random.Random(21)
    for index in range(10):
        traj, chunks, script, deleted = _constructed_case(rng, index)
        result = synthesize_chain(traj, mock_script(script), TEMPLATE, chunk_tokens=5)

        assert result.histories == _hand_traced_chain(chunks, deleted)
        assert [i.chunk_index for i in result.instances] == deleted
        for previous, current in zip(result.histories, result.histories[1:]):
            assert current.startswith(previous)
        for inst in result.instances:
            assert apply(inst.context_raw, inst.command, inst.sentinel, inst.guard)[0] == inst.context_new

        again = synthesize_chain(traj, mock_script(script), TEMPLATE, chunk_tokens=5)
        assert again.histories == result.histories


def test_synthesize_sequential_returns_instances():
    oracle = mock_script([Clean("[]"), Clean('[{"prefix": "REDO", "suffix": "twice."}]'), Clean("[]")])

    assert len(synthesize_sequential(trajectory(C1 + C2 + C3), oracle, TEMPLATE, chunk_tokens=5)) == 1


# Scoring and filtering


class CountingSolver:
    """Answers correctly for the first n requests on each partial response."""

    def __init__(self, correct_counts, fail_on=()):
        self.correct_counts = correct_counts
        self.fail_on = set(fail_on)
        self.seen = {}
        self.config = None
        self.retries = 0
        self._lock = threading.Lock()

    def continue_reasoning(self, prompt_text, partial_response, params):
        if partial_response in self.fail_on:
            raise TransportError("still down after retries")
        with self._lock:
            served = self.seen.get(partial_response, 0)
            self.seen[partial_response] = served + 1
        answer = "42" if served < self.correct_counts.get(partial_response, 0) else "7"
        return RolloutResult(text=f" so \\boxed{{{answer}}}", completion_tokens=3, finish_reason=FinishReason.STOP)

    def request_cleaning(self, system_text, user_text, schema, params):
        return "[]"

    def count_tokens(self, text):
        return TokenCount(len(text.split()), False)


def test_score_counts_correct_rollouts():
    solver = CountingSolver({"raw context": 3, "new context": 5})

    assert score_candidate(instance(), solver, k=8) == (0.375, 0.625)
    assert solver.seen == {"raw context": 8, "new context": 8}


def test_score_all_correct_and_single_rollout():
    assert score_candidate(instance(), CountingSolver({"raw context": 8, "new context": 8}), k=8) == (1.0, 1.0)
    assert score_candidate(instance(), CountingSolver({"new context": 1}), k=1) == (0.0, 1.0)


def test_failed_rollouts_count_as_incorrect():
    solver = CountingSolver({"raw context": 8, "new context": 8}, fail_on={"new context"})

    assert score_candidate(instance(), solver, k=4) == (1.0, 0.0)


def test_score_rejects_zero_rollouts():
    with pytest.raises(ValueError):
        score_candidate(instance(), CountingSolver({}), k=0)


@pytest.mark.parametrize(
    "acc_raw, acc_new, kept",
    [(0.375, 0.625, True), (0.5, 0.5, True), (0.625, 0.375, False), (0.0, 0.0, True)],
)
def test_filter_retain(acc_raw, acc_new, kept):
    assert filter_retain(instance(acc_raw, acc_new)) is kept


def test_min_acc_drops_zero_accuracy_candidates():
    assert not filter_retain(instance(0.0, 0.0), min_acc=0.125)
    assert filter_retain(instance(0.25, 0.5), min_acc=0.125)


def test_unscored_candidate_cannot_be_filtered():
    with pytest.raises(ValueError):
        filter_retain(instance())


def test_retained_flag_must_follow_the_rule():
    with pytest.raises(ValueError):
        instance(0.5, 0.25, retained=True)


def test_filter_matches_brute_force_on_scripted_corpus():
    rng = random.Random(8)
    k = 8
    counts, pool = {}, []
    for i in range(200):
        raw, new = f"raw context {i}", f"new context {i}"
        counts[raw], counts[new] = rng.randint(0, k), rng.randint(0, k)
        pool.append(instance(index=i, context_raw=raw, context_new=new))
    # Boundary cases
    counts["raw context 0"], counts["new context 0"] = 0, 0
    counts["raw context 1"], counts["new context 1"] = 4, 4

    solver = CountingSolver(counts)
    scored = [score_and_mark(inst, solver, k) for inst in pool]

    retained = {inst.source_id for inst in scored if filter_retain(inst)}
    expected = {f"s{i}" for i in range(200) if counts[f"new context {i}"] >= counts[f"raw context {i}"]}
    assert retained == expected
    assert all(inst.retained == (inst.source_id in expected) for inst in scored)
    assert all((inst.acc_raw * k).is_integer() and (inst.acc_new * k).is_integer() for inst in scored)


# Export


def test_export_nothing_writes_empty_file(tmp_path):
    path = tmp_path / "train.jsonl"

    assert export_instances([], path, TEMPLATE) == 0
    assert path.read_text() == ""


def test_export_round_trips_commands(tmp_path):
    path = tmp_path / "train.jsonl"
    retained = [instance(0.5, 0.5, index=i) for i in range(3)]

    assert export_instances(retained, path, TEMPLATE) == 3

    lines = path.read_text().splitlines()
    assert len(lines) == 3
    for line, inst in zip(lines, retained):
        data = json.loads(line)
        assert parse_command(data["target"]) == inst.command
        assert data["user"] == "### CoT Reasoning:\n" + inst.context_raw
        assert data["provenance"]["source_id"] == inst.source_id


def test_candidate_file_round_trip(tmp_path):
    inst = instance(0.25, 0.5, retained=True)

    assert CandidateInstance.model_validate_json(inst.model_dump_json()) == inst
