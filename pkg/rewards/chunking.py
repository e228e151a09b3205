from evaluation import Trajectory

CHARS_PER_TOKEN = 4
PARAGRAPH_BREAK = "\n\n"


def chunk_trajectory(traj: Trajectory, chunk_tokens: int = 1000) -> list[str]:
    """
    Split a chain of thought into consecutive chunks of at most `chunk_tokens`.

    Token counts are estimated at four characters per token. A cut snaps back
    to just after the last paragraph break found within the final 10% of the
    chunk; without one it falls exactly on the size limit. Joining the chunks
    gives back the original text.

    Raises:
        ValueError: If chunk_tokens is smaller than 1.
    """
    if chunk_tokens < 1:
        raise ValueError(f"chunk_tokens must be at least 1, got {chunk_tokens}")

    text = traj.cot_text
    size = chunk_tokens * CHARS_PER_TOKEN
    slack = size // 10

    chunks = []
    pos = 0
    while pos < len(text):
        end = pos + size
        if end >= len(text):
            chunks.append(text[pos:])
            break

        brk = text.rfind(PARAGRAPH_BREAK, end - slack, end)
        cut = brk + len(PARAGRAPH_BREAK) if brk != -1 else end
        chunks.append(text[pos:cut])
        pos = cut

    return chunks
