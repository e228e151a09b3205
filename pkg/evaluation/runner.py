import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path

from tqdm import tqdm

from backends import Backend, GenerationParams
from codec import CleaningPromptTemplate
from logger import logger
from orchestrator import EpisodeState, KVGeometry, RunRecord, StateVisit, TriggerPolicy, run_episode
from pruning import GuardPolicy
from .answers import DEFAULT_REASONING_TEMPLATE, REASONING_INSTRUCTION, build_reasoning_prompt, check_answer, extract_boxed
from .datasets import DatasetRecord, load_dataset
from .runlog import RunLog, RunLogHeader, RunLogWriter, hash_snapshot, read_run_log, repair_tail


def _failed_record(question_id: str, rollout_index: int, error: Exception) -> RunRecord:
    return RunRecord(
        question_id=question_id,
        rollout_index=rollout_index,
        states=[
            StateVisit(state=EpisodeState.REASONING, at_tokens=0),
            StateVisit(state=EpisodeState.BUDGET_EXHAUSTED, at_tokens=0),
        ],
        error=f"{type(error).__name__}: {error}",
    )


def _open_log(out_path: Path, header: RunLogHeader) -> set[tuple[str, int]]:
    """Start a fresh log, or validate an existing one and return its completed keys."""
    writer = RunLogWriter(out_path)
    if out_path.exists():
        repair_tail(out_path)
    # An interrupted header write leaves nothing after repair
    if not out_path.exists() or out_path.stat().st_size == 0:
        writer.write_header(header)
        return set()

    existing = read_run_log(out_path)
    if existing.header.config_hash != header.config_hash:
        raise ValueError(
            f"{out_path} was written with config {existing.header.config_hash}, "
            f"current config is {header.config_hash}; use a new output path"
        )
    if existing.header.dataset_id != header.dataset_id:
        raise ValueError(f"{out_path} belongs to dataset {existing.header.dataset_id}, not {header.dataset_id}")

    logger.info(f"Resuming {out_path}: {len(existing.records)} record(s) already complete")
    return existing.keys()


def run_benchmark(
    dataset_path: str | Path,
    rollouts: int,
    policy: TriggerPolicy,
    params: GenerationParams,
    backend: Backend,
    out_path: str | Path,
    template: CleaningPromptTemplate,
    config_snapshot: dict,
    workers: int = 8,
    cleaning_params: GenerationParams | None = None,
    guard: GuardPolicy | None = GuardPolicy(),
    geometry: KVGeometry = KVGeometry(),
    reasoning_template: str = DEFAULT_REASONING_TEMPLATE,
    instruction: str = REASONING_INSTRUCTION,
    clock=time.perf_counter,
    progress: bool = True,
) -> RunLog:
    """
    Run `rollouts` episodes per question and append each record to the run log.

    The log is resumable: keys (question id, rollout index) already present in
    `out_path` are skipped. A failed episode is written as a BudgetExhausted
    record with its error and never stops the run.

    Args:
        dataset_path (str):                 Line-delimited {id, question, gold_answer}.
        rollouts (int):                     Episodes per question.
        policy (TriggerPolicy):             Trigger policy for every episode.
        params (GenerationParams):          Reasoning sampling parameters.
        backend (Backend):                  Shared serving layer.
        out_path (str):                     Run log to create or resume.
        template (CleaningPromptTemplate):  Cleaning prompt.
        config_snapshot (dict):             Written to the header; its hash tags every record.
        workers (int):                      Concurrent episodes.

    Returns:
        RunLog: The complete log as read back from disk.

    Raises:
        ValueError: On an unreadable dataset, bad arguments, or an existing log
                    from another config or dataset.
    """
    if rollouts < 1:
        raise ValueError(f"rollouts must be at least 1, got {rollouts}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")

    dataset_path, out_path = Path(dataset_path), Path(out_path)
    questions = load_dataset(dataset_path)
    config_hash = hash_snapshot(config_snapshot)
    header = RunLogHeader(config=config_snapshot, config_hash=config_hash, dataset_id=dataset_path.stem)

    done = _open_log(out_path, header)
    writer = RunLogWriter(out_path)
    pending = [(q, i) for q in questions for i in range(rollouts) if (q.id, i) not in done]
    logger.info(f"{len(questions)} question(s) x {rollouts} rollout(s): {len(pending)} episode(s) to run")

    def run_one(question: DatasetRecord, index: int) -> RunRecord:
        try:
            record = run_episode(
                build_reasoning_prompt(question.question, reasoning_template, instruction),
                policy,
                params,
                backend,
                template,
                question_id=question.id,
                rollout_index=index,
                cleaning_params=cleaning_params,
                guard=guard,
                geometry=geometry,
                clock=clock,
            )
        except Exception as e:
            logger.warning(f"Episode {question.id}#{index} failed: {e}")
            record = _failed_record(question.id, index, e)

        predicted = extract_boxed(record.final_text)
        return record.model_copy(
            update={
                "predicted": predicted,
                "correct": predicted is not None and check_answer(predicted, question.gold_answer),
                "config_hash": config_hash,
            }
        )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_one, q, i) for q, i in pending]
        for future in tqdm(as_completed(futures), total=len(futures), desc="Episodes", disable=not progress):
            writer.append(future.result())

    return read_run_log(out_path)
