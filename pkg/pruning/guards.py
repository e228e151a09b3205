from dataclasses import dataclass

PARAGRAPH_SEPARATOR = "\n\n"


@dataclass(frozen=True)
class GuardPolicy:
    """
    Regions of the generated text the executor must never touch.

    Args:
        head_paragraph (bool): Protect the first paragraph.
        tail_paragraph (bool): Protect the last paragraph.
        head_chars (int):      Protect the first `head_chars` characters.
        separator (str):       Paragraph separator.
    """

    head_paragraph: bool = True
    tail_paragraph: bool = True
    head_chars: int = 0
    separator: str = PARAGRAPH_SEPARATOR

    def regions(self, text: str) -> list[tuple[int, int]]:
        """Half-open [start, end) ranges guarded in `text`."""
        regions = []

        if self.head_chars > 0:
            regions.append((0, min(self.head_chars, len(text))))

        body = text.strip()
        if not body:
            return regions
        lead = len(text) - len(text.lstrip())
        trail_end = len(text.rstrip())

        if self.head_paragraph:
            end = text.find(self.separator, lead)
            regions.append((lead, trail_end if end == -1 else end))

        if self.tail_paragraph:
            start = text.rfind(self.separator, lead, trail_end)
            regions.append((lead if start == -1 else start + len(self.separator), trail_end))

        return regions

    def with_head_chars(self, head_chars: int) -> "GuardPolicy":
        return GuardPolicy(self.head_paragraph, self.tail_paragraph, head_chars, self.separator)


def intersects(span: tuple[int, int], regions: list[tuple[int, int]]) -> bool:
    start, end = span
    return any(start < g_end and g_start < end for g_start, g_end in regions)


# Dynamic selection dictionary by name (registry pattern)
GUARD_PRESETS = {
    "default": GuardPolicy(),
    "none": GuardPolicy(head_paragraph=False, tail_paragraph=False),
}


def resolve_guard(name):
    """
    Resolves a guard preset name to its GuardPolicy.

    Args:
        name (str): The preset name, e.g., "default".

    Raises:
        ValueError: If the preset name is invalid.
    """
    if name not in GUARD_PRESETS:
        error_message = (
            f"Invalid guard preset: {name}. "
            f"Valid presets are: {', '.join(GUARD_PRESETS)}"
        )
        raise ValueError(error_message)

    return GUARD_PRESETS[name]
