"""Command-line entry point for the embedding exporter.

Exit codes match the pipeline CLI: 0 on success, 1 for validation or
model-loading errors, 2 for unexpected runtime failures.  Diagnostics go
to stderr.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable

from .encoder import Encoder, EncoderLoadError, load_encoder
from .export import ExportError, ExportRequest, export_embeddings


class CliError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage errors must exit 1 like every other validation failure.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="embed-export",
        description="Compute sentence embeddings for mention records and "
        "write them in the interop vector format.",
    )
    parser.add_argument("--input", required=True, help="mention records, JSONL")
    parser.add_argument(
        "--model", required=True, help="sentence-transformers model identifier"
    )
    parser.add_argument("--out-vectors", required=True, help="output vector file")
    parser.add_argument("--out-index", required=True, help="output index file")
    parser.add_argument(
        "--batch-size", type=int, default=32, help="texts per inference batch"
    )
    return parser


def main(
    argv: list[str] | None = None,
    encoder_factory: Callable[[str], Encoder] = load_encoder,
) -> int:
    try:
        args = build_parser().parse_args(argv)
        req = ExportRequest(
            input=args.input,
            model=args.model,
            out_vectors=args.out_vectors,
            out_index=args.out_index,
            batch_size=args.batch_size,
        )
        count, dim = export_embeddings(req, encoder_factory(req.model))
        print(f"export: {count} vectors of dim {dim} -> {req.out_vectors}", file=sys.stderr)
    except (CliError, ExportError, EncoderLoadError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
