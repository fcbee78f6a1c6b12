"""Text normal form and content hashing per FORMATS.md.

This is an independent implementation of the contract the pipeline's
`ekf.textnorm` module defines; the two components share no code, only the
document.  Identical input text must produce an identical content hash on
both sides, which the cross-component tests enforce.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata

_WS_RUN = re.compile(r"\s+")

# Opening quotation mark -> accepted closing marks (FORMATS.md pair table).
_QUOTE_PAIRS: dict[str, frozenset[str]] = {
    '"': frozenset('"'),
    "'": frozenset("'"),
    "“": frozenset("”"),  # curly double
    "‘": frozenset("’"),  # curly single
    "«": frozenset("»"),  # double guillemet
    "‹": frozenset("›"),  # single guillemet
    "„": frozenset({"“", "”"}),  # low-9 double
    "‚": frozenset({"‘", "’"}),  # low-9 single
    "「": frozenset("」"),  # CJK corner
    "『": frozenset("』"),  # CJK white corner
}


def normalize_text(text: str) -> str:
    """NFC, whitespace runs to single spaces, trim, strip quote pairs."""
    text = unicodedata.normalize("NFC", text)
    text = _WS_RUN.sub(" ", text).strip()
    while len(text) >= 2:
        closers = _QUOTE_PAIRS.get(text[0])
        if closers is None or text[-1] not in closers:
            break
        text = text[1:-1].strip()
    return text


def content_hash(text: str) -> str:
    """First 32 hex digits of SHA-256 over the UTF-8 normal form."""
    normal = normalize_text(text)
    return hashlib.sha256(normal.encode("utf-8")).hexdigest()[:32]
