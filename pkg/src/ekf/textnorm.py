"""Shared text normalization and content hashing.

Every component that keys data by quote text (mention ids, embedding
lookups, the vector interop index) must agree on one normal form.  The
rules live here and are documented in FORMATS.md; the offline embedding
exporter reimplements them against that document.

Normal form: NFC, outer whitespace trimmed, internal whitespace runs
collapsed to a single space, and surrounding quotation-mark pairs
stripped (repeatedly, as long as the first and last character form a
matching pair).
"""

from __future__ import annotations

import hashlib
import re
import unicodedata

_WS_RUN = re.compile(r"\s+")

# Opening quote -> accepted closing quotes.  Covers the straight ASCII
# marks plus the curly, guillemet, low-9 and CJK pairs seen on Wikiquote.
_QUOTE_PAIRS: dict[str, frozenset[str]] = {
    '"': frozenset('"'),
    "'": frozenset("'"),
    "“": frozenset("”"),  # " ... "
    "‘": frozenset("’"),  # ' ... '
    "«": frozenset("»"),  # « ... »
    "‹": frozenset("›"),  # ‹ ... ›
    "„": frozenset({"“", "”"}),  # „ ... " / „ ... "
    "‚": frozenset({"‘", "’"}),  # ‚ ... '
    "「": frozenset("」"),  # 「 ... 」
    "『": frozenset("』"),  # 『 ... 』
}


def normalize_text(text: str) -> str:
    """Return the canonical normal form of a quote text."""
    text = unicodedata.normalize("NFC", text)
    text = _WS_RUN.sub(" ", text).strip()
    while len(text) >= 2:
        closers = _QUOTE_PAIRS.get(text[0])
        if closers is None or text[-1] not in closers:
            break
        text = text[1:-1].strip()
    return text


def content_hash(text: str) -> str:
    """128-bit hex digest of the normalized text (the shared lookup key)."""
    normal = normalize_text(text)
    return hashlib.sha256(normal.encode("utf-8")).hexdigest()[:32]


def stable_hash(*parts: str) -> str:
    """128-bit hex digest of an ordered tuple of strings.

    Parts are joined with an unambiguous separator so that
    ("ab", "c") and ("a", "bc") hash differently.
    """
    joined = "\x1f".join(parts)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:32]
