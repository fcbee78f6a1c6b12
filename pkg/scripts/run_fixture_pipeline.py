#!/usr/bin/env python3
"""Run the full pipeline on the bundled fixture corpus.

Convenience wrapper over the stage CLI: every stage in order, one output
directory, first failure stops the run with that stage's exit code.
"""

import argparse
import os
import sys
from pathlib import Path

from ekf.cli import OUTPUT_DIR_ENV, main as run_stage

REPO = Path(__file__).resolve().parent.parent
STAGES = ("ingest", "quotes", "align", "resolve", "emit", "stats", "eval")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--config",
        default=str(REPO / "tests" / "fixtures" / "ekf.toml"),
        help="pipeline config (default: fixture config)",
    )
    parser.add_argument("--output-dir", default="out", help="artifact directory")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    args = parser.parse_args()

    os.environ[OUTPUT_DIR_ENV] = args.output_dir
    for stage in STAGES:
        status = run_stage(["-c", args.config, "--jobs", str(args.jobs), stage])
        if status != 0:
            print(f"stage {stage} failed with exit code {status}", file=sys.stderr)
            return status
    print(f"pipeline complete; artifacts in {args.output_dir}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
