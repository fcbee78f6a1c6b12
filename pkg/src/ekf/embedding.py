"""Sentence vectors behind a pluggable provider interface.

Two providers ship with the pipeline: a seeded hash provider (deterministic,
model-free; distinct texts come out near-orthogonal at dim >= 64) and a file
provider that serves vectors precomputed by the offline exporter.  Cosine
similarity accumulates in float64 regardless of the float32 storage.

Interop vector file layout (little-endian): 8-byte magic ``EKFVEC01``,
uint32 dim, uint32 row count, then ``count`` rows of ``dim`` float32 values.
The sidecar index is a text file of ``row<TAB>content_hash_hex`` lines.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np

from .textnorm import content_hash

VECTOR_MAGIC = b"EKFVEC01"


class EmbeddingLookupError(KeyError):
    """A text has no stored vector in a file-backed provider."""


@dataclass(frozen=True)
class EmbeddingVector:
    """A fixed-length float32 vector."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float32)
        if arr.ndim != 1:
            raise ValueError("embedding vector must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding vector has non-finite values")
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


class EmbeddingProvider(Protocol):
    dim: int

    def embed(self, text: str) -> EmbeddingVector: ...


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity, clamped to [-1, 1]; symmetric by construction."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    av = a.values.astype(np.float64)
    bv = b.values.astype(np.float64)
    na = float(np.sqrt(np.dot(av, av)))
    nb = float(np.sqrt(np.dot(bv, bv)))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine is undefined for the zero vector")
    value = float(np.dot(av, bv)) / (na * nb)
    return max(-1.0, min(1.0, value))


def _hash_bytes(key: str, nbytes: int) -> bytes:
    """Expand a text key into *nbytes* of deterministic pseudo-random bytes."""
    seed = hashlib.sha256(key.encode("utf-8")).digest()
    blocks = []
    counter = 0
    while sum(len(b) for b in blocks) < nbytes:
        blocks.append(hashlib.sha256(seed + counter.to_bytes(8, "little")).digest())
        counter += 1
    return b"".join(blocks)[:nbytes]


class HashProvider:
    """Deterministic test-double provider derived from content hashes.

    Vectors are unit-norm with components uniform in [-0.5, 0.5) before
    normalization, so two distinct texts land nearly orthogonal for any
    reasonably large dim.  No model, no state, no platform dependence.
    """

    def __init__(self, dim: int):
        if dim < 8:
            raise ValueError("hash provider requires dim >= 8")
        self.dim = dim

    def embed(self, text: str) -> EmbeddingVector:
        raw = _hash_bytes(content_hash(text), self.dim * 4)
        u32 = np.frombuffer(raw, dtype="<u4").astype(np.float64)
        vec = u32 / 2.0**32 - 0.5
        norm = float(np.sqrt(np.dot(vec, vec)))
        if norm == 0.0:  # unreachable in practice, but keep the contract total
            vec[0] = 1.0
            norm = 1.0
        return EmbeddingVector((vec / norm).astype(np.float32))


def hash_provider(dim: int) -> HashProvider:
    return HashProvider(dim)


def read_vector_file(vectors_path: str | Path) -> np.ndarray:
    """Read an interop vector file into a (count, dim) float32 array."""
    data = Path(vectors_path).read_bytes()
    if len(data) < 16 or data[:8] != VECTOR_MAGIC:
        raise ValueError(f"{vectors_path}: not an interop vector file")
    dim, count = struct.unpack_from("<II", data, 8)
    expected = 16 + count * dim * 4
    if len(data) != expected:
        raise ValueError(
            f"{vectors_path}: size mismatch: header says {count}x{dim} "
            f"({expected} bytes), file has {len(data)}"
        )
    return np.frombuffer(data[16:], dtype="<f4").reshape(count, dim).copy()


def write_vector_file(
    vectors_path: str | Path,
    index_path: str | Path,
    rows: np.ndarray,
    hashes: Iterable[str],
) -> None:
    """Write vectors plus sidecar index in the interop format."""
    rows = np.ascontiguousarray(rows, dtype="<f4")
    if rows.ndim != 2:
        raise ValueError("rows must be a 2-d array")
    count, dim = rows.shape
    hash_list = list(hashes)
    if len(hash_list) != count:
        raise ValueError(f"{count} rows but {len(hash_list)} index entries")
    if count >= 2**32 or dim >= 2**32:
        raise ValueError("row count or dim overflows the 32-bit header")
    with open(vectors_path, "wb") as fh:
        fh.write(VECTOR_MAGIC)
        fh.write(struct.pack("<II", dim, count))
        fh.write(rows.tobytes())
    with open(index_path, "w", encoding="utf-8", newline="\n") as fh:
        for row, h in enumerate(hash_list):
            fh.write(f"{row}\t{h}\n")


def read_vector_index(index_path: str | Path, count: int) -> dict[str, int]:
    index: dict[str, int] = {}
    with open(index_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                row_text, hash_hex = line.split("\t")
                row = int(row_text)
            except ValueError as exc:
                raise ValueError(f"{index_path}: line {lineno}: bad index line") from exc
            if not 0 <= row < count:
                raise ValueError(f"{index_path}: line {lineno}: row {row} out of range")
            if hash_hex in index:
                raise ValueError(f"{index_path}: line {lineno}: duplicate hash {hash_hex}")
            index[hash_hex] = row
    return index


class FileProvider:
    """Serves precomputed vectors keyed by content hash of normalized text."""

    def __init__(self, vectors_path: str | Path, index_path: str | Path):
        self._rows = read_vector_file(vectors_path)
        self._index = read_vector_index(index_path, self._rows.shape[0])
        self.dim = int(self._rows.shape[1])

    def embed(self, text: str) -> EmbeddingVector:
        key = content_hash(text)
        row = self._index.get(key)
        if row is None:
            raise EmbeddingLookupError(f"no stored vector for content hash {key}")
        return EmbeddingVector(self._rows[row])


def file_provider(vectors_path: str | Path, index_path: str | Path) -> FileProvider:
    return FileProvider(vectors_path, index_path)
