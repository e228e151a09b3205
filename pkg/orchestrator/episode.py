import time

from backends import Backend, BackendError, FinishReason, GenerationParams
from codec import (
    CLEANING_RESPONSE_SCHEMA,
    CleaningPromptTemplate,
    CommandError,
    PruneCommand,
    format_cleaning_prompt,
    parse_command,
)
from context import (
    Context,
    append_generation,
    estimate_tokens,
    flatten,
    generated_text,
    new_context,
    rebuild_from_flat,
    reuse_boundary,
    window_start,
)
from logger import logger
from pruning import CleaningReport, GuardPolicy, apply
from .degeneration import WINDOW_CHARS, detect_degeneration
from .kv_accounting import KVGeometry, estimate_kv_bytes
from .policy import TriggerPolicy, should_trigger
from .record import CycleTrace, EpisodeState, RunRecord, StateVisit


class _Episode:
    """Mutable bookkeeping for one run_episode call; never shared between episodes."""

    def __init__(self, backend: Backend, prompt_text: str):
        self.backend = backend
        self.ctx: Context = new_context(prompt_text)
        self.prompt_tokens = backend.count_tokens(prompt_text).count
        self.states = [StateVisit(state=EpisodeState.REASONING, at_tokens=0)]
        self.reports: list[CleaningReport] = []
        self.cycles: list[CycleTrace] = []
        self.generated_ever = 0
        self.peak = self.prompt_tokens
        self.reprefill_total = 0
        self.error: str | None = None

    def visit(self, state: EpisodeState):
        self.states.append(StateVisit(state=state, at_tokens=self.generated_ever))

    @property
    def used_tokens(self) -> int:
        return self.prompt_tokens + self.ctx.context_tokens


def _clean(
    episode: _Episode,
    policy: TriggerPolicy,
    template: CleaningPromptTemplate,
    cleaning_params: GenerationParams,
    sentinel: str,
    guard: GuardPolicy | None,
):
    ctx = episode.ctx
    iteration = ctx.cleaning_iterations_used + 1
    episode.visit(EpisodeState.CLEANING)
    logger.info(f"Cleaning cycle {iteration} at {episode.generated_ever} generated tokens")

    text = generated_text(ctx)
    offset = window_start(ctx) if policy.cleaning_scope == "window" else 0
    system, user = format_cleaning_prompt(text[offset:], template)
    raw = episode.backend.request_cleaning(system, user, CLEANING_RESPONSE_SCHEMA, cleaning_params)

    parse_error = None
    try:
        command = parse_command(raw, sentinel)
    except CommandError as e:
        logger.warning(f"Cleaning cycle {iteration} is a no-op: {e}")
        command, parse_error = PruneCommand(), str(e)

    episode.visit(EpisodeState.PRUNING)
    if offset and guard is not None:
        guard = guard.with_head_chars(max(guard.head_chars, offset))
    elif offset:
        guard = GuardPolicy(head_paragraph=False, tail_paragraph=False, head_chars=offset)
    cleaned, report = apply(text, command, sentinel, guard)

    old_flat = flatten(ctx)
    episode.ctx = rebuild_from_flat(
        ctx.prompt_text, cleaned, sentinel, episode.backend.count_tokens, iteration, previous=ctx
    )
    new_flat = flatten(episode.ctx)

    boundary = reuse_boundary(old_flat, new_flat)
    reprefill = estimate_tokens(new_flat[boundary:]).count if new_flat != old_flat else 0
    episode.reprefill_total += reprefill

    episode.reports.append(report)
    episode.cycles.append(
        CycleTrace(
            iteration=iteration,
            triggered_at_tokens=episode.generated_ever,
            context_chars_before=len(old_flat),
            context_chars_after=len(new_flat),
            reuse_boundary_chars=boundary,
            reprefill_tokens_est=reprefill,
            parse_error=parse_error,
        )
    )
    logger.info(
        f"Cycle {iteration}: {report.match_count} span(s) removed, "
        f"{report.total_removed_chars} chars, re-prefill ~{reprefill} tokens"
    )
    episode.visit(EpisodeState.RESUMING)


def run_episode(
    question: str,
    policy: TriggerPolicy,
    params: GenerationParams,
    backend: Backend,
    template: CleaningPromptTemplate,
    question_id: str = "",
    rollout_index: int = 0,
    cleaning_params: GenerationParams | None = None,
    guard: GuardPolicy | None = GuardPolicy(),
    geometry: KVGeometry = KVGeometry(),
    clock=time.perf_counter,
) -> RunRecord:
    """
    Drive one reasoning episode through its reasoning and cleaning cycles.

    Each reasoning call is bounded so it stops exactly at the next cleaning
    point (or at the context budget). When the interval is reached and
    iterations remain, the generated region is shown to the cleaning model, the
    returned command is applied, the context is rebuilt and reasoning resumes at
    its end. A command that does not parse is a no-op cycle that still spends an
    iteration.

    Args:
        question (str):                     Chat-templated prompt; never modified.
        policy (TriggerPolicy):             Interval, iteration cap, budget, detectors.
        params (GenerationParams):          Sampling for reasoning calls.
        backend (Backend):                  Serving layer (or a scripted mock).
        template (CleaningPromptTemplate):  Cleaning prompt; its sentinel is used for splicing.
        question_id (str):                  Identifier copied into the record.
        rollout_index (int):                Rollout number copied into the record.
        cleaning_params (GenerationParams): Sampling for cleaning calls (default: params).
        guard (GuardPolicy):                Executor guard; None disables it.
        geometry (KVGeometry):              Cache shape for the KV estimate.
        clock (Callable):                   Time source for wall_time.

    Returns:
        RunRecord: The episode trace. Backend failures end the episode in
                   BudgetExhausted with `error` set.
    """
    started = clock()
    cleaning_params = cleaning_params or params
    sentinel = template.sentinel_name
    episode = _Episode(backend, question)
    terminal = None

    while terminal is None:
        ctx = episode.ctx

        if should_trigger(ctx, policy):
            try:
                _clean(episode, policy, template, cleaning_params, sentinel, guard)
            except BackendError as e:
                logger.warning(f"Cleaning request failed, ending episode: {e}")
                episode.error = f"{type(e).__name__}: {e}"
                terminal = EpisodeState.BUDGET_EXHAUSTED
            continue

        remaining = policy.context_budget - episode.used_tokens
        if remaining <= 0:
            terminal = EpisodeState.BUDGET_EXHAUSTED
            break

        limit = min(remaining, params.max_new_tokens)
        if ctx.cleaning_iterations_used < policy.max_cleaning_iterations:
            limit = min(limit, policy.l_clean - ctx.tokens_since_last_clean)

        try:
            result = backend.continue_reasoning(
                ctx.prompt_text,
                generated_text(ctx),
                params.model_copy(update={"max_new_tokens": max(limit, 1)}),
            )
        except BackendError as e:
            logger.warning(f"Reasoning request failed, ending episode: {e}")
            episode.error = f"{type(e).__name__}: {e}"
            terminal = EpisodeState.BUDGET_EXHAUSTED
            break

        episode.ctx = append_generation(ctx, result.text, result.completion_tokens)
        episode.generated_ever += episode.ctx.total_generated_tokens - ctx.total_generated_tokens
        episode.peak = max(episode.peak, episode.used_tokens)

        if policy.degeneration_check and detect_degeneration(generated_text(episode.ctx)[-WINDOW_CHARS:]):
            logger.warning(f"Degeneration detected after {episode.generated_ever} tokens")
            terminal = EpisodeState.DEGENERATED
        elif result.finish_reason is not FinishReason.LENGTH:
            terminal = EpisodeState.DONE
        elif result.completion_tokens == 0:
            logger.warning("Backend hit its length limit without producing tokens; stopping")
            terminal = EpisodeState.DONE

    episode.visit(terminal)
    final = episode.ctx

    return RunRecord(
        question_id=question_id,
        rollout_index=rollout_index,
        states=episode.states,
        cleaning_reports=episode.reports,
        cycles=episode.cycles,
        final_text=generated_text(final),
        total_tokens=final.context_tokens,
        generated_tokens_total=episode.generated_ever,
        peak_context_tokens=episode.peak,
        reprefill_tokens_total=episode.reprefill_total,
        kv_bytes_est=estimate_kv_bytes(episode.peak, geometry),
        wall_time=clock() - started,
        estimated=final.estimated,
        error=episode.error,
    )
