"""Sentence encoder protocol and the pretrained-model implementation.

The heavy dependency is imported lazily so the package (and every test
that injects a stub encoder) works without sentence-transformers
installed or a model checkpoint available.
"""

from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np


class EncoderLoadError(RuntimeError):
    """The requested embedding model could not be loaded."""


class Encoder(Protocol):
    dim: int

    def encode(self, texts: Sequence[str]) -> np.ndarray: ...


class SentenceEncoder:
    """Multilingual paraphrase-model encoder via sentence-transformers."""

    def __init__(self, model_id: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderLoadError(
                "sentence-transformers is not installed; "
                "install the 'model' extra to use a pretrained encoder"
            ) from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise EncoderLoadError(f"cannot load model {model_id!r}: {exc}") from exc
        dim = self._model.get_sentence_embedding_dimension()
        if not dim:  # some models only reveal the dim by encoding
            dim = int(np.asarray(self._model.encode(["probe"])).shape[1])
        self.dim = int(dim)

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        out = self._model.encode(
            list(texts),
            batch_size=max(1, len(texts)),
            convert_to_numpy=True,
            show_progress_bar=False,
        )
        return np.asarray(out, dtype=np.float32)


def load_encoder(model_id: str) -> SentenceEncoder:
    return SentenceEncoder(model_id)
