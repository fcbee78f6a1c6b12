"""Deterministic encoder stand-in for tests; no model, no network.

Rows are derived from SHA-256 of the input text and deliberately not
unit length, so tests can prove the exporter normalizes at write time.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

import numpy as np


def stub_vector(text: str, dim: int, scale: float = 2.0) -> np.ndarray:
    seed = hashlib.sha256(text.encode("utf-8")).digest()
    blocks = []
    counter = 0
    while sum(len(b) for b in blocks) < dim * 4:
        blocks.append(hashlib.sha256(seed + counter.to_bytes(8, "little")).digest())
        counter += 1
    raw = b"".join(blocks)[: dim * 4]
    u32 = np.frombuffer(raw, dtype="<u4").astype(np.float64)
    return ((u32 / 2.0**32 - 0.5) * scale).astype(np.float32)


class FakeEncoder:
    def __init__(self, dim: int = 32, scale: float = 2.0):
        self.dim = dim
        self.scale = scale
        self.batches: list[int] = []

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        self.batches.append(len(texts))
        return np.stack([stub_vector(t, self.dim, self.scale) for t in texts])


def expected_unit_row(text: str, dim: int, scale: float = 2.0) -> np.ndarray:
    """The exact float32 bytes the exporter must store for *text*."""
    row = stub_vector(text, dim, scale).astype(np.float64)
    return (row / np.sqrt(row @ row)).astype(np.float32)
