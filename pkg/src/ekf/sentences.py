"""Rule-based sentence splitting.

One splitter for the whole pipeline: the gold-set generator and the event
mention extractor must segment identically, so both import from here.
Splits after ``.``, ``!`` or ``?`` followed by whitespace, unless the dot
ends a known abbreviation.
"""

from __future__ import annotations

import re

# Trailing-dot abbreviations that never end a sentence.
ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "prof", "gen", "col", "sgt", "lt", "capt",
        "st", "jr", "sr", "vs", "etc", "e.g", "i.e", "cf", "al", "no",
        "u.s", "u.k", "inc", "ltd", "co", "dept", "fig", "approx",
    }
)

_BOUNDARY = re.compile(r"([.!?])(\s+)")


def split_sentences(text: str) -> list[str]:
    """Split a paragraph into trimmed sentences, in order."""
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        end = match.end(1)
        if match.group(1) == ".":
            word = _last_word(text, match.start(1))
            if word.casefold() in ABBREVIATIONS:
                continue
        chunk = text[start:end].strip()
        if chunk:
            sentences.append(chunk)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _last_word(text: str, dot_index: int) -> str:
    i = dot_index
    while i > 0 and (text[i - 1].isalnum() or text[i - 1] == "."):
        i -= 1
    return text[i:dot_index]
