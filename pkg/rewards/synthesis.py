from dataclasses import dataclass, field

from backends import Backend, BackendError, GenerationParams
from codec import CLEANING_RESPONSE_SCHEMA, CleaningPromptTemplate, CommandError, format_cleaning_prompt, parse_command
from evaluation import Trajectory
from logger import logger
from pruning import GUARD_PRESETS, GuardPolicy, apply
from .chunking import chunk_trajectory
from .instance import CandidateInstance


@dataclass
class SynthesisResult:
    """Instances emitted for one trajectory plus the cleaned history after every chunk."""

    instances: list[CandidateInstance] = field(default_factory=list)
    histories: list[str] = field(default_factory=list)

    @property
    def final_history(self) -> str:
        return self.histories[-1] if self.histories else ""


def synthesize_chain(
    traj: Trajectory,
    oracle_backend: Backend,
    template: CleaningPromptTemplate,
    chunk_tokens: int = 1000,
    guard: GuardPolicy = GUARD_PRESETS["none"],
    params: GenerationParams | None = None,
) -> SynthesisResult:
    """
    Walk a trajectory chunk by chunk, each time asking the oracle to clean the
    already cleaned history followed by the next raw chunk.

    Deletions are confined to the current chunk: the history is guarded by
    setting the guard's head_chars to its length. A chunk whose command is
    empty emits no instance; a chunk whose reply does not parse, or whose
    request fails, is skipped and appended to the history unchanged.

    Args:
        traj (Trajectory):                  Source reasoning trace.
        oracle_backend (Backend):           Expert cleaning endpoint.
        template (CleaningPromptTemplate):  Cleaning prompt and sentinel.
        chunk_tokens (int):                 Chunk size in estimated tokens.
        guard (GuardPolicy):                Paragraph guards applied on top of the history guard.
        params (GenerationParams):          Sampling for cleaning requests.

    Returns:
        SynthesisResult: Instances in chunk order and the history chain.
    """
    params = params or GenerationParams(max_new_tokens=2048)
    sentinel = template.sentinel_name
    result = SynthesisResult()
    history = ""

    for index, chunk in enumerate(chunk_trajectory(traj, chunk_tokens)):
        previous = history
        context_raw = previous + chunk
        chunk_guard = guard.with_head_chars(max(guard.head_chars, len(previous)))
        system, user = format_cleaning_prompt(context_raw, template)

        try:
            raw = oracle_backend.request_cleaning(system, user, CLEANING_RESPONSE_SCHEMA, params)
            command = parse_command(raw, sentinel)
        except (CommandError, BackendError) as e:
            logger.warning(f"{traj.source_id} chunk {index}: skipped ({e})")
            history = context_raw
            result.histories.append(history)
            continue

        context_new, report = apply(context_raw, command, sentinel, chunk_guard)
        history = context_new
        result.histories.append(history)

        if not len(command):
            continue

        logger.debug(f"{traj.source_id} chunk {index}: {len(command)} pair(s), {report.match_count} span(s) removed")
        result.instances.append(
            CandidateInstance(
                source_id=traj.source_id,
                question=traj.question,
                gold_answer=traj.gold_answer,
                chunk_index=index,
                cleaned_history=previous,
                current_chunk=chunk,
                command=command,
                context_raw=context_raw,
                context_new=context_new,
                sentinel=sentinel,
                guard=chunk_guard,
            )
        )

    return result


def synthesize_sequential(
    traj: Trajectory,
    oracle_backend: Backend,
    template: CleaningPromptTemplate,
    chunk_tokens: int = 1000,
    guard: GuardPolicy = GUARD_PRESETS["none"],
    params: GenerationParams | None = None,
) -> list[CandidateInstance]:
    return synthesize_chain(traj, oracle_backend, template, chunk_tokens, guard, params).instances
