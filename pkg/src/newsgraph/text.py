"""Small text helpers shared across modules."""

from __future__ import annotations

import re
from typing import Iterable, List, Sequence

_NO_SPACE_BEFORE = {".", ",", "!", "?", ";", ":", "%", ")", "]", "}", "''"}
_NO_SPACE_AFTER = {"(", "[", "{", "``"}

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:['\-][A-Za-z0-9]+)*")


def detokenize(forms: Sequence[str]) -> str:
    """Join token forms with spaces, attaching punctuation and clitics."""
    out: List[str] = []
    for form in forms:
        if not out:
            out.append(form)
            continue
        glue = (
            form in _NO_SPACE_BEFORE
            or form.startswith("'")
            or form == "n't"
            or out[-1] in _NO_SPACE_AFTER
        )
        if glue:
            out[-1] = out[-1] + form
        else:
            out.append(form)
    return " ".join(out)


def simple_tokens(text: str) -> List[str]:
    """Lowercased word tokens of free text, punctuation dropped."""
    return [m.group(0).lower() for m in _WORD_RE.finditer(text)]


def content_words(text: str, stop_words: Iterable[str]) -> set:
    """Distinct lowercased tokens of ``text`` that are not stop words."""
    stop = set(stop_words)
    return {w for w in simple_tokens(text) if w not in stop}


def strip_leading_article(text: str) -> str:
    words = text.split()
    if words and words[0].lower() in {"the", "a", "an"}:
        return " ".join(words[1:])
    return text
