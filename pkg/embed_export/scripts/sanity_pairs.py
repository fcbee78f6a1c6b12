"""Sanity-check a real encoder on a small translation-pair set.

For each of ten short sentences with a translation, the cosine between
the pair should beat the mean cosine between unrelated sentences.  This
needs a downloaded checkpoint, so it is a manual script, not a test:

    python3 scripts/sanity_pairs.py --model <sentence-transformers id>

Prints the per-pair margins and exits 1 if the ranking fails.
"""

from __future__ import annotations

import argparse
import itertools
import sys

import numpy as np

from embed_export.encoder import load_encoder

PAIRS = [
    ("The weather is nice today.", "Das Wetter ist heute schön."),
    ("Where is the train station?", "Où est la gare ?"),
    ("I would like a cup of coffee.", "Chciałbym filiżankę kawy."),
    ("The meeting starts at nine.", "La reunión empieza a las nueve."),
    ("He closed the door quietly.", "Er schloss leise die Tür."),
    ("The river flows to the sea.", "La rivière coule vers la mer."),
    ("She is reading an old book.", "Ona czyta starą książkę."),
    ("We bought fresh bread.", "Compramos pan fresco."),
    ("The children play in the garden.", "Die Kinder spielen im Garten."),
    ("This song is very famous.", "Cette chanson est très célèbre."),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", required=True)
    args = parser.parse_args()

    encoder = load_encoder(args.model)
    texts = [t for pair in PAIRS for t in pair]
    rows = np.asarray(encoder.encode(texts), dtype=np.float64)
    rows /= np.sqrt((rows * rows).sum(axis=1))[:, np.newaxis]

    def cos(i: int, j: int) -> float:
        return float(rows[i] @ rows[j])

    unrelated = [
        cos(2 * i, 2 * j + 1) for i, j in itertools.permutations(range(len(PAIRS)), 2)
    ]
    baseline = float(np.mean(unrelated))
    print(f"unrelated-pair mean cosine: {baseline:.4f}")

    failures = 0
    for i, (a, b) in enumerate(PAIRS):
        same = cos(2 * i, 2 * i + 1)
        verdict = "ok" if same > baseline else "FAIL"
        if same <= baseline:
            failures += 1
        print(f"{verdict}  {same:.4f}  {a!r} / {b!r}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
