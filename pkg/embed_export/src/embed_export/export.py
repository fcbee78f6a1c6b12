"""Batch export of mention embeddings into the interop vector format.

Input is the pipeline's mention records (JSONL with a ``text`` field).
Texts are normalized, deduplicated, and sorted, so the output depends
only on the set of texts, not on record order; identical texts would get
identical vectors anyway, and deduplication skips the redundant
inference.  Rows are unit-normalized at export time, which makes cosine
a plain dot product for the consumer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .encoder import Encoder, load_encoder
from .textnorm import content_hash, normalize_text
from .vecfile import write_vector_file


class ExportError(RuntimeError):
    """Invalid input records or unusable encoder output."""


@dataclass(frozen=True)
class ExportRequest:
    input: str
    model: str
    out_vectors: str
    out_index: str
    batch_size: int = 32

    def __post_init__(self) -> None:
        if not self.model:
            raise ValueError("model identifier must not be empty")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")


def read_mention_texts(path: str | Path) -> list[str]:
    """Extract the text field from every mention record."""
    texts: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ExportError(f"{path}: line {lineno}: invalid JSON") from exc
            if not isinstance(record, dict) or not isinstance(record.get("text"), str):
                raise ExportError(f"{path}: line {lineno}: mention record needs a text field")
            texts.append(record["text"])
    return texts


def unique_normalized(texts: Sequence[str]) -> list[str]:
    return sorted({normalize_text(t) for t in texts})


def _encode_all(encoder: Encoder, texts: Sequence[str], batch_size: int) -> np.ndarray:
    rows = np.empty((len(texts), encoder.dim), dtype=np.float32)
    for start in range(0, len(texts), batch_size):
        batch = texts[start : start + batch_size]
        out = np.asarray(encoder.encode(batch), dtype=np.float32)
        if out.shape != (len(batch), encoder.dim):
            raise ExportError(
                f"encoder returned shape {out.shape}, expected {(len(batch), encoder.dim)}"
            )
        rows[start : start + len(batch)] = out
    return rows


def _unit_rows(rows: np.ndarray) -> np.ndarray:
    # Normalize in float64, store float32: matches the consumer's cosine math.
    work = rows.astype(np.float64)
    if not np.all(np.isfinite(work)):
        raise ExportError("encoder returned non-finite values")
    norms = np.sqrt((work * work).sum(axis=1))
    if np.any(norms == 0.0):
        raise ExportError("encoder returned a zero vector")
    return (work / norms[:, np.newaxis]).astype(np.float32)


def export_embeddings(req: ExportRequest, encoder: Encoder | None = None) -> tuple[int, int]:
    """Write the vector and index files; return (row count, dim)."""
    if encoder is None:
        encoder = load_encoder(req.model)
    texts = unique_normalized(read_mention_texts(req.input))
    rows = _unit_rows(_encode_all(encoder, texts, req.batch_size))
    hashes = [content_hash(t) for t in texts]
    write_vector_file(req.out_vectors, req.out_index, rows, hashes)
    return len(texts), encoder.dim
