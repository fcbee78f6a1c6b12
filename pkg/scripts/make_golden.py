#!/usr/bin/env python3
"""Regenerate the golden files under tests/fixtures/golden.

Runs the real CLI twice: the quote chain (ingest, quotes, align, emit,
stats) freezes kg.nt and stats.tsv, then resolve plus a re-emit freezes
kg_full.nt, and eval freezes eval_report.tsv.  Also freezes mentions.jsonl
plus the shared interop vector file (mentions.vec / mentions.vec.idx) that
both components validate: hash-provider vectors for each unique normalized
mention text, rows sorted by text.  Run only after a deliberate fixture or
format change, then hand-review the diff before committing.
"""

import argparse
import json
import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from ekf.cli import (
    EVAL_FILE,
    KG_FILE,
    MENTIONS_FILE,
    OUTPUT_DIR_ENV,
    STATS_FILE,
    main as run_stage,
)
from ekf.embedding import hash_provider, write_vector_file
from ekf.textnorm import content_hash, normalize_text

GOLDEN_VECTOR_DIM = 16

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "tests" / "fixtures"
GOLDEN = FIXTURES / "golden"


def run(config: str, stage: str) -> None:
    status = run_stage(["-c", config, "--jobs", "1", stage])
    if status != 0:
        raise SystemExit(f"stage {stage} failed with exit code {status}")


def write_golden_vectors(mentions_path: Path, golden: Path) -> None:
    with open(mentions_path, encoding="utf-8") as fh:
        texts = sorted({normalize_text(json.loads(line)["text"]) for line in fh if line.strip()})
    provider = hash_provider(GOLDEN_VECTOR_DIM)
    rows = np.stack([provider.embed(t).values for t in texts])
    write_vector_file(
        golden / "mentions.vec",
        golden / "mentions.vec.idx",
        rows,
        [content_hash(t) for t in texts],
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(FIXTURES / "ekf.toml"))
    parser.add_argument("--golden-dir", default=str(GOLDEN))
    args = parser.parse_args()

    golden = Path(args.golden_dir)
    golden.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        os.environ[OUTPUT_DIR_ENV] = tmp
        out = Path(tmp)
        for stage in ("ingest", "quotes", "align", "emit", "stats"):
            run(args.config, stage)
        shutil.copyfile(out / KG_FILE, golden / "kg.nt")
        shutil.copyfile(out / STATS_FILE, golden / "stats.tsv")
        shutil.copyfile(out / MENTIONS_FILE, golden / "mentions.jsonl")
        write_golden_vectors(out / MENTIONS_FILE, golden)
        for stage in ("resolve", "emit", "eval"):
            run(args.config, stage)
        shutil.copyfile(out / KG_FILE, golden / "kg_full.nt")
        shutil.copyfile(out / EVAL_FILE, golden / "eval_report.tsv")
    names = (
        "kg.nt", "kg_full.nt", "stats.tsv", "eval_report.tsv",
        "mentions.jsonl", "mentions.vec", "mentions.vec.idx",
    )
    for name in names:
        print(f"wrote {golden / name}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
