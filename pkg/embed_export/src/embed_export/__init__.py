"""Offline exporter of multilingual sentence embeddings.

Consumes the pipeline's mention records, encodes each unique normalized
text with a pretrained paraphrase model, and writes the unit-normalized
vectors plus a content-hash index in the interop format the pipeline's
file provider reads.  The two components share only FORMATS.md.
"""

from .encoder import Encoder, EncoderLoadError, SentenceEncoder, load_encoder
from .export import ExportError, ExportRequest, export_embeddings, read_mention_texts, unique_normalized
from .textnorm import content_hash, normalize_text
from .vecfile import VECTOR_MAGIC, read_vector_file, read_vector_index, write_vector_file

__all__ = [
    "Encoder",
    "EncoderLoadError",
    "SentenceEncoder",
    "load_encoder",
    "ExportError",
    "ExportRequest",
    "export_embeddings",
    "read_mention_texts",
    "unique_normalized",
    "content_hash",
    "normalize_text",
    "VECTOR_MAGIC",
    "read_vector_file",
    "read_vector_index",
    "write_vector_file",
]
