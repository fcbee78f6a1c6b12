"""Reader and writer for the interop vector file and its sidecar index.

Layout per FORMATS.md, little-endian: 8-byte magic ``EKFVEC01``, uint32
dim, uint32 row count, then count rows of dim float32 values.  The index
is a text file of ``row<TAB>content_hash`` lines.  The pipeline's file
provider reads exactly this pair.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable

import numpy as np

VECTOR_MAGIC = b"EKFVEC01"
_U32_MAX = 2**32 - 1


def write_vector_file(
    vectors_path: str | Path,
    index_path: str | Path,
    rows: np.ndarray,
    hashes: Iterable[str],
) -> None:
    arr = np.asarray(rows)
    if arr.ndim != 2:
        raise ValueError("rows must be a 2-d array")
    count, dim = arr.shape
    # Bounds check before any copy: a too-large array must fail, not OOM.
    if count > _U32_MAX or dim > _U32_MAX:
        raise ValueError("row count or dim overflows the 32-bit header")
    hash_list = list(hashes)
    if len(hash_list) != count:
        raise ValueError(f"{count} rows but {len(hash_list)} index entries")
    payload = np.ascontiguousarray(arr, dtype="<f4")
    with open(vectors_path, "wb") as fh:
        fh.write(VECTOR_MAGIC)
        fh.write(struct.pack("<II", dim, count))
        fh.write(payload.tobytes())
    with open(index_path, "w", encoding="utf-8", newline="\n") as fh:
        for row, h in enumerate(hash_list):
            fh.write(f"{row}\t{h}\n")


def read_vector_file(vectors_path: str | Path) -> np.ndarray:
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
