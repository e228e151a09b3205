from concurrent.futures import ThreadPoolExecutor

from backends import Backend, BackendError, GenerationParams
from evaluation import DEFAULT_REASONING_TEMPLATE, REASONING_INSTRUCTION, build_reasoning_prompt, check_answer, extract_boxed
from logger import logger
from .instance import CandidateInstance


def _rollout_correct(
    backend: Backend, prompt: str, partial: str, gold: str, params: GenerationParams, label: str
) -> bool:
    try:
        result = backend.continue_reasoning(prompt, partial, params)
    except BackendError as e:
        logger.warning(f"Rollout {label} failed after retries, counted as incorrect: {e}")
        return False

    predicted = extract_boxed(partial + result.text)
    return predicted is not None and check_answer(predicted, gold)


def score_candidate(
    inst: CandidateInstance,
    solver_backend: Backend,
    k: int = 8,
    params: GenerationParams | None = None,
    reasoning_template: str = DEFAULT_REASONING_TEMPLATE,
    instruction: str = REASONING_INSTRUCTION,
    workers: int | None = None,
) -> tuple[float, float]:
    """
    Continue reasoning k times from context_raw and k times from context_new.

    All 2k rollouts run concurrently (up to `workers`, default 2k). A rollout
    whose request still fails after the backend's retries counts as
    incorrect, so both accuracies stay multiples of 1/k.

    Returns:
        tuple[float, float]: (acc_raw, acc_new).

    Raises:
        ValueError: If k is smaller than 1.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")

    params = params or GenerationParams()
    prompt = build_reasoning_prompt(inst.question, reasoning_template, instruction)
    jobs = [("raw", inst.context_raw, i) for i in range(k)] + [("new", inst.context_new, i) for i in range(k)]

    with ThreadPoolExecutor(max_workers=workers or 2 * k) as pool:
        outcomes = list(
            pool.map(
                lambda job: _rollout_correct(
                    solver_backend, prompt, job[1], inst.gold_answer, params,
                    f"{inst.source_id}/{inst.chunk_index}/{job[0]}#{job[2]}",
                ),
                jobs,
            )
        )

    return sum(outcomes[:k]) / k, sum(outcomes[k:]) / k


def filter_retain(inst: CandidateInstance, min_acc: float | None = None) -> bool:
    """
    Keep a candidate when pruning preserves or improves accuracy.

    With min_acc set, acc_new must also reach it (off by default, so the
    0/0 case is retained).

    Raises:
        ValueError: If the candidate has not been scored.
    """
    if not inst.scored:
        raise ValueError(f"Candidate {inst.source_id}/{inst.chunk_index} has not been scored")

    keep = inst.acc_new >= inst.acc_raw
    if min_acc is not None:
        keep = keep and inst.acc_new >= min_acc
    return keep


def score_and_mark(inst: CandidateInstance, solver_backend: Backend, k: int = 8, **kwargs) -> CandidateInstance:
    acc_raw, acc_new = score_candidate(inst, solver_backend, k, **kwargs)
    return inst.model_copy(update={"acc_raw": acc_raw, "acc_new": acc_new, "retained": acc_new >= acc_raw})
