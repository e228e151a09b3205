class CommandError(ValueError):
    """Base class for pruning-command problems."""


class MalformedCommand(CommandError):
    """The cleaning output is not a JSON array (or a known wrapper around one)."""


class SchemaViolation(CommandError):
    """
    The JSON parsed but one or more elements break the response schema.

    Args:
        problems (list[str]): One message per offending element.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("Pruning command violates schema: " + "; ".join(self.problems))


class TemplateError(ValueError):
    """A cleaning prompt template is unusable."""
