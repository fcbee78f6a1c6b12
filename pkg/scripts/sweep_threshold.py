#!/usr/bin/env python3
"""Sweep the alignment threshold and report cluster structure per theta.

With min_community_size=1 the greedy partition is monotone in theta:
raising it only splits clusters.  The sweep makes that visible on a real
corpus and helps pick an operating point.
"""

import argparse
import sys
from collections import Counter
from pathlib import Path

from ekf.alignment import AlignmentConfig, cluster_corpus
from ekf.embedding import hash_provider
from ekf.quote_extract import extract_mentions, group_persons, load_stop_sections
from ekf.wiki_ingest import PageKind, load_corpus, parse_wikitext

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "tests" / "fixtures"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", default=str(FIXTURES / "corpus.jsonl"))
    parser.add_argument("--stop-sections", default=str(FIXTURES / "stop_sections.txt"))
    parser.add_argument("--dim", type=int, default=384, help="hash provider dimension")
    parser.add_argument(
        "--thetas",
        default="0.5,0.6,0.7,0.8,0.9,0.95",
        help="comma-separated thresholds to sweep",
    )
    parser.add_argument("--min-community-size", type=int, default=1)
    args = parser.parse_args()

    pages = [parse_wikitext(raw) for raw in load_corpus(args.corpus)]
    person_pages = [p for p in pages if p.page_kind is PageKind.PERSON]
    persons = group_persons(person_pages)
    stop = load_stop_sections(args.stop_sections)
    by_key = {(p.title, p.language): p for p in person_pages}
    mentions = []
    for person in persons:
        for language in sorted(person.page_titles):
            page = by_key[(person.page_titles[language], language)]
            mentions.extend(extract_mentions(page, person, stop))
    print(f"{len(persons)} persons, {len(mentions)} mentions", file=sys.stderr)

    provider = hash_provider(args.dim)
    print("theta\tclusters\tmulti_member\tlargest\tsizes")
    for raw in args.thetas.split(","):
        theta = float(raw)
        cfg = AlignmentConfig(threshold=theta, min_community_size=args.min_community_size)
        clusters = cluster_corpus(mentions, provider, cfg)
        sizes = Counter(len(c.members) for c in clusters)
        multi = sum(n for size, n in sizes.items() if size > 1)
        largest = max(sizes) if sizes else 0
        shape = ",".join(f"{size}x{n}" for size, n in sorted(sizes.items(), reverse=True))
        print(f"{theta}\t{len(clusters)}\t{multi}\t{largest}\t{shape}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
