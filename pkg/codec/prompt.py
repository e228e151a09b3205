from dataclasses import dataclass
from pathlib import Path

from context import Context, generated_text
from .errors import TemplateError

COT_PLACEHOLDER = "<PREVIOUS_COT>"
SENTINEL_PLACEHOLDER = "<SENTINEL>"
TEMPLATE_DIR = Path(__file__).parent / "templates"


@dataclass(frozen=True)
class CleaningPromptTemplate:
    system_text: str
    user_text_with_placeholder: str
    sentinel_name: str = "<Del>"

    def __post_init__(self):
        count = self.user_text_with_placeholder.count(COT_PLACEHOLDER)
        if count != 1:
            raise TemplateError(
                f"Cleaning user template must contain {COT_PLACEHOLDER} exactly once, found {count}"
            )


def load_template(sentinel_name: str = "<Del>", template_dir: str | Path | None = None) -> CleaningPromptTemplate:
    """
    Load the cleaning prompt pair from `cleaning_system.txt` / `cleaning_user.txt`.

    Args:
        sentinel_name (str):     Marker shown to the model for removed content.
        template_dir (str|Path): Directory holding the two files (default: bundled assets).

    Raises:
        TemplateError: If a file is missing or the user template lacks the placeholder.
    """
    directory = Path(template_dir) if template_dir else TEMPLATE_DIR
    try:
        system_text = (directory / "cleaning_system.txt").read_text(encoding="utf-8")
        user_text = (directory / "cleaning_user.txt").read_text(encoding="utf-8")
    except OSError as e:
        raise TemplateError(f"Cannot read cleaning templates from {directory}: {e}") from e

    return CleaningPromptTemplate(system_text.rstrip("\n"), user_text, sentinel_name)


def format_cleaning_prompt(cot_text: str, template: CleaningPromptTemplate) -> tuple[str, str]:
    """Render (system, user) over an explicit CoT string."""
    system = template.system_text.replace(SENTINEL_PLACEHOLDER, template.sentinel_name)
    user = template.user_text_with_placeholder.replace(COT_PLACEHOLDER, cot_text, 1)
    return system, user


def render_cleaning_prompt(ctx: Context, template: CleaningPromptTemplate) -> tuple[str, str]:
    return format_cleaning_prompt(generated_text(ctx), template)
