"""Cross-lingual quote alignment by threshold community detection.

One person's mentions are clustered greedily: every mention's
theta-neighbourhood (cosine similarity >= theta, self included) is a
candidate community; candidates of at least ``min_community_size`` members
are emitted largest-first, restricted to still-unassigned mentions, and
whatever remains becomes singleton clusters.  Mentions are canonically
pre-sorted so the outcome is independent of input order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingProvider
from .quote_extract import Mention
from .textnorm import stable_hash


@dataclass(frozen=True)
class AlignmentConfig:
    threshold: float = 0.8
    min_community_size: int = 2

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.min_community_size < 1:
            raise ValueError("min_community_size must be >= 1")


@dataclass(frozen=True)
class QuoteCluster:
    """One aligned quote: a set of mentions plus its seed and representative."""

    cluster_id: str
    person: str
    members: tuple[str, ...]
    seed: str
    representative: str

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("cluster must have members")
        if len(set(self.members)) != len(self.members):
            raise ValueError("cluster members must be distinct")
        if self.seed not in self.members or self.representative not in self.members:
            raise ValueError("seed and representative must be members")


def canonical_order(mentions: list[Mention]) -> list[Mention]:
    return sorted(mentions, key=lambda m: (m.language, m.text, m.mention_id))


def select_representative(member_ids: tuple[str, ...], mentions_by_id: dict[str, Mention]) -> str:
    """Most contexts wins; ties prefer English, then canonical sort order."""
    members = [mentions_by_id[mid] for mid in member_ids]

    def key(m: Mention):
        return (-len(m.contexts), 0 if m.language == "en" else 1, m.language, m.text, m.mention_id)

    return min(members, key=key).mention_id


def cluster_person(
    mentions: list[Mention],
    provider: EmbeddingProvider,
    cfg: AlignmentConfig,
) -> list[QuoteCluster]:
    """Partition one person's mentions into QuoteClusters."""
    if not mentions:
        return []
    persons = {m.person for m in mentions}
    if len(persons) != 1:
        raise ValueError(f"cluster_person got mentions of {len(persons)} persons")
    person = persons.pop()

    ordered = canonical_order(mentions)
    n = len(ordered)
    matrix = np.empty((n, provider.dim), dtype=np.float64)
    for i, mention in enumerate(ordered):
        matrix[i] = provider.embed(mention.text).values.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", matrix, matrix))
    if np.any(norms == 0.0):
        raise ValueError("cosine is undefined for the zero vector")
    sims = np.clip((matrix @ matrix.T) / np.outer(norms, norms), -1.0, 1.0)
    np.fill_diagonal(sims, 1.0)  # self always belongs to its own neighbourhood

    neighbourhoods = [np.flatnonzero(sims[i] >= cfg.threshold) for i in range(n)]
    candidates = sorted(range(n), key=lambda i: (-len(neighbourhoods[i]), i))

    assigned: set[int] = set()
    raw_clusters: list[tuple[int, list[int]]] = []
    for seed in candidates:
        if len(neighbourhoods[seed]) < cfg.min_community_size:
            continue
        if seed in assigned:
            continue
        members = [int(j) for j in neighbourhoods[seed] if j not in assigned]
        raw_clusters.append((seed, members))
        assigned.update(members)
    for i in range(n):
        if i not in assigned:
            raw_clusters.append((i, [i]))
            assigned.add(i)

    mentions_by_id = {m.mention_id: m for m in ordered}
    clusters = []
    for seed_idx, member_idx in raw_clusters:
        member_ids = tuple(ordered[j].mention_id for j in member_idx)
        clusters.append(
            QuoteCluster(
                cluster_id=stable_hash("cluster", person, *sorted(member_ids)),
                person=person,
                members=member_ids,
                seed=ordered[seed_idx].mention_id,
                representative=select_representative(member_ids, mentions_by_id),
            )
        )
    return clusters


def cluster_corpus(
    mentions: list[Mention],
    provider: EmbeddingProvider,
    cfg: AlignmentConfig,
) -> list[QuoteCluster]:
    """Cluster every person separately; persons in sorted order."""
    by_person: dict[str, list[Mention]] = {}
    for mention in mentions:
        by_person.setdefault(mention.person, []).append(mention)
    clusters: list[QuoteCluster] = []
    for person in sorted(by_person):
        clusters.extend(cluster_person(by_person[person], provider, cfg))
    return clusters


# Stage artifact helpers


def cluster_to_dict(c: QuoteCluster) -> dict:
    return {
        "id": c.cluster_id,
        "person": c.person,
        "members": list(c.members),
        "seed": c.seed,
        "representative": c.representative,
    }


def cluster_from_dict(data: dict) -> QuoteCluster:
    return QuoteCluster(
        cluster_id=data["id"],
        person=data["person"],
        members=tuple(data["members"]),
        seed=data["seed"],
        representative=data["representative"],
    )
