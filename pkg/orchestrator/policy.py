from typing import Literal

from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveInt

from context import Context


class TriggerPolicy(BaseModel):
    """
    When to clean and when to stop.

    Attributes:
        l_clean (int):                  Generated tokens between cleaning cycles.
        max_cleaning_iterations (int):  Cap on cleaning cycles per episode.
        context_budget (int):           Prompt plus generated region, in tokens.
        degeneration_check (bool):      Stop early on repetitive loops.
        cleaning_scope (str):           "full" shows the whole generated region to the
                                        cleaner, "window" only what came since the last clean.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    l_clean: PositiveInt = 5000
    max_cleaning_iterations: NonNegativeInt = 50
    context_budget: PositiveInt = 32768
    degeneration_check: bool = False
    cleaning_scope: Literal["full", "window"] = "full"


def should_trigger(ctx: Context, policy: TriggerPolicy) -> bool:
    return (
        ctx.tokens_since_last_clean >= policy.l_clean
        and ctx.cleaning_iterations_used < policy.max_cleaning_iterations
        and ctx.has_generated_text
    )
