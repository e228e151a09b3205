import re

# Whitespace travels with the word that follows it; trailing whitespace is its own token
_TOKEN_RE = re.compile(r"\s*\S+|\s+")


def split_tokens(text: str) -> list[str]:
    """Word-level tokenization shared by the offline backends; joins back to `text`."""
    return _TOKEN_RE.findall(text)
