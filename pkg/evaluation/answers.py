import math
import re
from typing import NamedTuple

REASONING_INSTRUCTION = "Please reason step by step, and put your final answer within \\boxed{}."
DEFAULT_REASONING_TEMPLATE = "<|im_start|>user\n{question}\n{instruction}<|im_end|>\n<|im_start|>assistant\n"

_BOXED = "\\boxed{"
_LEFT_RIGHT_RE = re.compile(r"\\(?:left|right)(?![A-Za-z])")


class BoxedAnswer(NamedTuple):
    content: str
    malformed: bool


def build_reasoning_prompt(
    question: str,
    template: str = DEFAULT_REASONING_TEMPLATE,
    instruction: str = REASONING_INSTRUCTION,
) -> str:
    """Fill the plain-string chat template; {question} and {instruction} are literal markers."""
    return template.replace("{question}", question).replace("{instruction}", instruction)


def find_boxed(text: str) -> BoxedAnswer | None:
    """
    Locate the last \\boxed{...} group, honouring nested braces.

    Returns:
        BoxedAnswer | None: None when there is no \\boxed{; an unbalanced group
                            runs to the end of the text and is flagged malformed.
    """
    start = text.rfind(_BOXED)
    if start == -1:
        return None

    begin = start + len(_BOXED)
    depth = 1
    for i in range(begin, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return BoxedAnswer(text[begin:i], False)

    return BoxedAnswer(text[begin:], True)


def extract_boxed(text: str) -> str | None:
    found = find_boxed(text)
    return found.content if found else None


def normalize_answer(answer: str) -> str:
    text = answer.strip()
    while len(text) >= 2 and text.startswith("$") and text.endswith("$"):
        text = text[1:-1].strip()
    text = _LEFT_RIGHT_RE.sub("", text)
    return " ".join(text.split())


def _as_number(text: str) -> float | None:
    # float() also takes digit separators like "1_000"
    if "_" in text:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def check_answer(predicted: str, gold: str) -> bool:
    """
    Compare answers after light normalization.

    Normalization trims, strips outer dollar signs, drops \\left / \\right and
    collapses whitespace. If the strings still differ but both parse as plain
    numbers, they are compared numerically. No symbolic simplification: "1/2"
    and "0.5" do not match.
    """
    a, b = normalize_answer(predicted), normalize_answer(gold)
    if a == b:
        return True

    x, y = _as_number(a), _as_number(b)
    return x is not None and y is not None and math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-12)
