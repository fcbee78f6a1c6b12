"""RDF materialization and statistics.

Clusters, mentions, persons and resolved sub-events become triples over a
schema.org-based vocabulary: quotes are ``so:Quotation`` nodes linked to
their creator and mentions, mentions carry language-tagged text plus
context literals, sub-events are typed by their resolved Wikidata class
and attached to the named event page they came from.  Serialization is
canonical N-Triples: sorted, escaped, byte-identical across runs.

Instance IRIs are minted under ``https://example.org/ekf/`` from content
hashes; the two extension terms (``hasMention``, ``mentionContext``) and
``sourceSentence`` live in the project vocabulary namespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .alignment import QuoteCluster
from .quote_extract import Mention, PersonId, count_contextful
from .resolver import SubEventNode
from .textnorm import stable_hash

EKF_NS = "https://example.org/ekf/"
EKF_VOCAB = "https://example.org/ekf/vocab#"
SCHEMA_NS = "https://schema.org/"
WIKIDATA_NS = "http://www.wikidata.org/entity/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_SCHEME = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")
_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|\\^`\x7f]')


@dataclass(frozen=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not _SCHEME.match(self.value):
            raise ValueError(f"not an absolute IRI: {self.value!r}")
        if _IRI_FORBIDDEN.search(self.value):
            raise ValueError(f"IRI contains forbidden characters: {self.value!r}")


@dataclass(frozen=True)
class Literal:
    text: str
    lang: str | None = None
    datatype: str | None = None

    def __post_init__(self) -> None:
        if self.lang is not None and self.datatype is not None:
            raise ValueError("literal cannot have both language tag and datatype")


Term = Union[Iri, Literal]


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    obj: Term


@dataclass(frozen=True)
class TripleSet:
    triples: frozenset[Triple]

    @classmethod
    def from_iterable(cls, triples: Iterable[Triple]) -> "TripleSet":
        return cls(frozenset(triples))

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self.triples


@dataclass(frozen=True)
class LanguageStats:
    language: str
    persons: int
    quotes: int
    mentions: int
    mentions_with_contexts: int


def person_iri(canonical_name: str) -> Iri:
    return Iri(EKF_NS + "person/" + stable_hash("person", canonical_name))


def quote_iri(cluster_id: str) -> Iri:
    return Iri(EKF_NS + "quote/" + cluster_id)


def mention_iri(mention_id: str) -> Iri:
    return Iri(EKF_NS + "mention/" + mention_id)


def entity_iri(target_title: str) -> Iri:
    return Iri(EKF_NS + "entity/" + stable_hash("entity", target_title))


def named_event_iri(page_title: str) -> Iri:
    return Iri(EKF_NS + "event/" + stable_hash("namedevent", page_title))


def subevent_iri(node: SubEventNode) -> Iri:
    m = node.mention
    return Iri(
        EKF_NS
        + "event/"
        + stable_hash("subevent", m.page, str(m.paragraph), m.sentence, m.event_type, m.trigger)
    )


def build_kg(
    clusters: list[QuoteCluster],
    mentions: list[Mention],
    persons: list[PersonId],
    subevents: list[SubEventNode] = (),
) -> TripleSet:
    """Materialize the knowledge graph from the pipeline stage outputs."""
    mentions_by_id = {m.mention_id: m for m in mentions}
    person_names = {p.canonical_name for p in persons}
    triples: set[Triple] = set()

    so_person = Iri(SCHEMA_NS + "Person")
    so_quotation = Iri(SCHEMA_NS + "Quotation")
    so_name = Iri(SCHEMA_NS + "name")
    so_creator = Iri(SCHEMA_NS + "creator")
    so_text = Iri(SCHEMA_NS + "text")
    so_mentions = Iri(SCHEMA_NS + "mentions")
    so_is_part_of = Iri(SCHEMA_NS + "isPartOf")
    rdf_type = Iri(RDF_TYPE)
    has_mention = Iri(EKF_VOCAB + "hasMention")
    mention_context = Iri(EKF_VOCAB + "mentionContext")
    source_sentence = Iri(EKF_VOCAB + "sourceSentence")

    for person in persons:
        node = person_iri(person.canonical_name)
        triples.add(Triple(node, rdf_type, so_person))
        triples.add(Triple(node, so_name, Literal(person.canonical_name)))

    for cluster in clusters:
        if cluster.person not in person_names:
            raise ValueError(f"cluster {cluster.cluster_id} references unknown person {cluster.person!r}")
        qnode = quote_iri(cluster.cluster_id)
        triples.add(Triple(qnode, rdf_type, so_quotation))
        triples.add(Triple(qnode, so_creator, person_iri(cluster.person)))
        for mention_id in cluster.members:
            mention = mentions_by_id.get(mention_id)
            if mention is None:
                raise ValueError(f"cluster {cluster.cluster_id} references unknown mention {mention_id}")
            mnode = mention_iri(mention_id)
            triples.add(Triple(qnode, has_mention, mnode))
            triples.add(Triple(mnode, so_text, Literal(mention.text, lang=mention.language)))
            for context in mention.contexts:
                triples.add(Triple(mnode, mention_context, Literal(context, lang=mention.language)))
            for link in mention.linked_entities:
                enode = entity_iri(link.target)
                triples.add(Triple(mnode, so_mentions, enode))
                triples.add(Triple(enode, so_name, Literal(link.target)))

    for node in subevents:
        snode = subevent_iri(node)
        triples.add(Triple(snode, rdf_type, Iri(WIKIDATA_NS + node.resolved_qid)))
        triples.add(Triple(snode, source_sentence, Literal(node.mention.sentence)))
        if node.mention.page:
            parent = named_event_iri(node.mention.page)
            triples.add(Triple(snode, so_is_part_of, parent))
            triples.add(Triple(parent, so_name, Literal(node.mention.page)))

    return TripleSet.from_iterable(triples)


# ---------------------------------------------------------------------------
# Canonical N-Triples serialization.

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def render_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    rendered = f'"{_escape_literal(term.text)}"'
    if term.lang is not None:
        return f"{rendered}@{term.lang}"
    if term.datatype is not None:
        return f"{rendered}^^<{term.datatype}>"
    return rendered


def serialize_ntriples(kg: TripleSet) -> bytes:
    """Sorted, escaped, LF-terminated N-Triples; empty set gives empty bytes."""
    rows = sorted(
        (render_term(t.subject), render_term(t.predicate), render_term(t.obj)) for t in kg
    )
    return "".join(f"{s} {p} {o} .\n" for s, p, o in rows).encode("utf-8")


_UNESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_LINE = re.compile(
    r"^<(?P<s>[^<>\s]*)>\s+<(?P<p>[^<>\s]*)>\s+(?P<o>.+?)\s*\.$"
)
_LITERAL_OBJ = re.compile(
    r'^"(?P<text>(?:[^"\\]|\\.)*)"(?:@(?P<lang>[A-Za-z0-9\-]+)|\^\^<(?P<dt>[^<>\s]*)>)?$'
)


def _unescape_literal(text: str) -> str:
    def sub(match: re.Match) -> str:
        u4, u8, plain = match.groups()
        if u4 is not None:
            return chr(int(u4, 16))
        if u8 is not None:
            return chr(int(u8, 16))
        return {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(plain, plain)

    return _UNESCAPE.sub(sub, text)


def parse_ntriples(data: bytes) -> TripleSet:
    """Parse N-Triples produced by this pipeline back into a TripleSet."""
    triples: set[Triple] = set()
    for lineno, line in enumerate(data.decode("utf-8").split("\n"), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        match = _LINE.match(line)
        if match is None:
            raise ValueError(f"line {lineno}: not a valid triple line")
        obj_text = match.group("o")
        obj: Term
        if obj_text.startswith("<") and obj_text.endswith(">"):
            obj = Iri(obj_text[1:-1])
        else:
            literal = _LITERAL_OBJ.match(obj_text)
            if literal is None:
                raise ValueError(f"line {lineno}: bad object term {obj_text!r}")
            obj = Literal(
                _unescape_literal(literal.group("text")),
                lang=literal.group("lang"),
                datatype=literal.group("dt"),
            )
        triples.add(Triple(Iri(match.group("s")), Iri(match.group("p")), obj))
    return TripleSet.from_iterable(triples)


# ---------------------------------------------------------------------------
# Statistics.

STATS_COLUMNS = ("Language", "Persons", "Quotes", "Mentions", "Mentions with Contexts")
TOTAL_LABEL = "All Languages"


def compute_stats(
    clusters: list[QuoteCluster],
    mentions: list[Mention],
) -> tuple[list[LanguageStats], LanguageStats]:
    """Per-language rows (language code order) plus the deduplicated total."""
    by_language: dict[str, list[Mention]] = {}
    for mention in mentions:
        by_language.setdefault(mention.language, []).append(mention)
    language_of = {m.mention_id: m.language for m in mentions}

    rows = []
    for language in sorted(by_language):
        group = by_language[language]
        quotes = sum(
            1 for c in clusters if any(language_of.get(mid) == language for mid in c.members)
        )
        rows.append(
            LanguageStats(
                language=language,
                persons=len({m.person for m in group}),
                quotes=quotes,
                mentions=len(group),
                mentions_with_contexts=count_contextful(group),
            )
        )
    total = LanguageStats(
        language=TOTAL_LABEL,
        persons=len({m.person for m in mentions}),
        quotes=len(clusters),
        mentions=len(mentions),
        mentions_with_contexts=count_contextful(mentions),
    )
    return rows, total


def stats_to_tsv(rows: list[LanguageStats], total: LanguageStats) -> str:
    lines = ["\t".join(STATS_COLUMNS)]
    for row in rows + [total]:
        lines.append(
            f"{row.language}\t{row.persons}\t{row.quotes}\t{row.mentions}\t{row.mentions_with_contexts}"
        )
    return "\n".join(lines) + "\n"
