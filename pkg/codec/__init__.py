from .command import AnchorPair, PruneCommand, parse_command, serialize_command
from .errors import CommandError, MalformedCommand, SchemaViolation, TemplateError
from .prompt import (
    COT_PLACEHOLDER,
    CleaningPromptTemplate,
    format_cleaning_prompt,
    load_template,
    render_cleaning_prompt,
)
from .schema import CLEANING_RESPONSE_SCHEMA, MAX_PAIRS

__all__ = [
    "AnchorPair",
    "CLEANING_RESPONSE_SCHEMA",
    "COT_PLACEHOLDER",
    "CleaningPromptTemplate",
    "CommandError",
    "MAX_PAIRS",
    "MalformedCommand",
    "PruneCommand",
    "SchemaViolation",
    "TemplateError",
    "format_cleaning_prompt",
    "load_template",
    "parse_command",
    "render_cleaning_prompt",
    "serialize_command",
]
