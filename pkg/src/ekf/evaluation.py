"""Sub-event evaluation harness.

Gold records are generated from event pages: every sentence linking to an
item of the frozen gold snapshot (a local extract of event items and their
properties) becomes one record.  Predictions are scored micro-averaged:
the resolved class against the gold type (optionally credited for any
class in the gold type's subclass closure) and argument values against the
gold property map, exact on normalized values.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from pathlib import Path

from .ontology import ClassGraph, TypeMapping, UnknownClassError, subclass_closure
from .resolver import (
    DEFAULT_QUESTION_TEMPLATES,
    DEFAULT_SCORE_FLOOR,
    EventMention,
    QaScorer,
    SubEventNode,
    resolve,
    resolve_direct_baseline,
)
from .sentences import split_sentences
from .wiki_ingest import BlockKind, Section, WikiPage

_QID = re.compile(r"Q[0-9]+")
_WORD = re.compile(r"\w+", re.UNICODE)


@dataclass(frozen=True)
class GoldItem:
    """One snapshot row: an event item with its type and properties."""

    qid: str
    type_qid: str
    properties: dict[str, str] = field(hash=False, default_factory=dict)


@dataclass(frozen=True)
class GoldRecord:
    """One evaluation case: a sentence linking to a known event item."""

    page: str
    paragraph_index: int
    sentence_index: int
    sentence: str
    linked_event_qid: str
    gold_type_qid: str
    gold_properties: dict[str, str] = field(hash=False, default_factory=dict)

    @property
    def key(self) -> tuple[str, int]:
        return (self.page, self.sentence_index)


@dataclass(frozen=True)
class Prediction:
    """A resolved sub-event keyed to its page sentence."""

    page: str
    sentence_index: int
    node: SubEventNode

    @property
    def key(self) -> tuple[str, int]:
        return (self.page, self.sentence_index)

    @property
    def properties(self) -> dict[str, str]:
        return {role.strip(): value.strip() for role, value in self.node.mention.arguments}


@dataclass(frozen=True)
class MetricCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class EvalReport:
    method: str
    type_counts: MetricCounts
    property_counts: dict[str, MetricCounts] = field(hash=False, default_factory=dict)


def load_gold_snapshot(path: str | Path) -> dict[str, GoldItem]:
    """Read the snapshot TSV: ``page_title<TAB>qid<TAB>type_qid<TAB>prop=value;...``."""
    snapshot: dict[str, GoldItem] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (3, 4):
                raise ValueError(f"{path}: line {lineno}: expected 3 or 4 tab-separated fields")
            title, qid, type_qid = parts[0], parts[1].strip(), parts[2].strip()
            if not title or not _QID.fullmatch(qid) or not _QID.fullmatch(type_qid):
                raise ValueError(f"{path}: line {lineno}: bad snapshot row")
            if title in snapshot:
                raise ValueError(f"{path}: line {lineno}: duplicate title {title!r}")
            properties: dict[str, str] = {}
            if len(parts) == 4 and parts[3].strip():
                for pair in parts[3].split(";"):
                    pair = pair.strip()
                    if not pair:
                        continue
                    if "=" not in pair:
                        raise ValueError(f"{path}: line {lineno}: bad property {pair!r}")
                    prop, value = pair.split("=", 1)
                    properties[prop.strip()] = value.strip()
            snapshot[title] = GoldItem(qid, type_qid, properties)
    return snapshot


def _paragraphs(page: WikiPage):
    def walk(section: Section):
        for block in section.blocks:
            if block.kind is BlockKind.PARAGRAPH:
                yield block
        for child in section.children:
            yield from walk(child)

    yield from walk(page.root)


def generate_testset(
    event_pages: list[WikiPage],
    gold_snapshot: dict[str, GoldItem],
) -> list[GoldRecord]:
    """One GoldRecord per sentence whose first qualifying link hits the snapshot."""
    records: list[GoldRecord] = []
    for page in event_pages:
        sentence_index = 0
        for paragraph_index, block in enumerate(_paragraphs(page)):
            sentences = split_sentences(block.text)
            # Sentence character ranges in the block text locate each link.
            ranges = []
            cursor = 0
            for sentence in sentences:
                start = block.text.index(sentence, cursor)
                ranges.append((start, start + len(sentence)))
                cursor = start + len(sentence)
            for (start, end), sentence in zip(ranges, sentences):
                item = None
                for link in block.links:
                    if start <= link.span[0] < end and link.target in gold_snapshot:
                        item = gold_snapshot[link.target]
                        break
                if item is not None:
                    records.append(
                        GoldRecord(
                            page=page.title,
                            paragraph_index=paragraph_index,
                            sentence_index=sentence_index,
                            sentence=sentence,
                            linked_event_qid=item.qid,
                            gold_type_qid=item.type_qid,
                            gold_properties=dict(item.properties),
                        )
                    )
                sentence_index += 1
    return records


def _first_trigger(sentence: str, lexicon: dict[str, str]) -> tuple[str, str] | None:
    for word in _WORD.findall(sentence):
        event_type = lexicon.get(word.casefold())
        if event_type is not None:
            return word, event_type
    return None


def build_predictions(
    event_pages: list[WikiPage],
    lexicon: dict[str, str],
    graph: ClassGraph,
    mapping: TypeMapping,
    scorer: QaScorer,
    templates: tuple[str, ...] = DEFAULT_QUESTION_TEMPLATES,
    max_depth: int = 5,
    score_floor: float = DEFAULT_SCORE_FLOOR,
    method: str = "qa",
    scope: str = "sentence",
) -> list[Prediction]:
    """Run the resolver over every trigger-bearing sentence of the pages.

    One prediction per sentence (the first trigger wins), keyed the same
    way the testset generator keys gold records, so sentences with a
    trigger but no gold link surface as false positives.
    """
    if method not in ("qa", "direct_baseline"):
        raise ValueError(f"unknown resolution method {method!r}")
    predictions: list[Prediction] = []
    for page in event_pages:
        sentence_index = 0
        for paragraph_index, block in enumerate(_paragraphs(page)):
            for sentence in split_sentences(block.text):
                found = _first_trigger(sentence, lexicon)
                if found is not None:
                    word, event_type = found
                    mention = EventMention(
                        sentence=sentence,
                        event_type=event_type,
                        trigger=word,
                        page=page.title,
                        paragraph=paragraph_index,
                        paragraph_text=block.text,
                    )
                    if method == "direct_baseline":
                        node = resolve_direct_baseline(mention, mapping, graph)
                    else:
                        node = resolve(
                            mention,
                            graph,
                            mapping,
                            scorer,
                            templates,
                            max_depth=max_depth,
                            score_floor=score_floor,
                            scope=scope,
                        )
                    predictions.append(Prediction(page.title, sentence_index, node))
                sentence_index += 1
    return predictions


def _type_correct(
    resolved_qid: str,
    gold_type_qid: str,
    graph: ClassGraph | None,
    strict: bool,
    max_depth: int,
) -> bool:
    if resolved_qid == gold_type_qid:
        return True
    if strict or graph is None:
        return False
    try:
        return resolved_qid in subclass_closure(graph, gold_type_qid, max_depth)
    except UnknownClassError:
        return False


def evaluate(
    predictions: list[Prediction],
    gold: list[GoldRecord],
    graph: ClassGraph | None = None,
    strict: bool = False,
    max_depth: int = 5,
    method: str = "qa",
) -> EvalReport:
    """Micro-averaged precision/recall/F1 for types and per-property values."""
    gold_by_key: dict[tuple[str, int], GoldRecord] = {}
    for record in gold:
        if record.key in gold_by_key:
            raise ValueError(f"duplicate gold key {record.key}")
        gold_by_key[record.key] = record

    seen_keys: set[tuple[str, int]] = set()
    type_tp = type_fp = 0
    prop_tp: dict[str, int] = {}
    prop_fp: dict[str, int] = {}
    prop_fn: dict[str, int] = {}
    matched_props: dict[tuple[str, int], set[str]] = {}

    for prediction in predictions:
        if prediction.key in seen_keys:
            raise ValueError(f"duplicate prediction key {prediction.key}")
        seen_keys.add(prediction.key)
        record = gold_by_key.get(prediction.key)
        if record is not None and _type_correct(
            prediction.node.resolved_qid, record.gold_type_qid, graph, strict, max_depth
        ):
            type_tp += 1
        else:
            type_fp += 1
        for prop, value in prediction.properties.items():
            if record is not None and record.gold_properties.get(prop) == value:
                prop_tp[prop] = prop_tp.get(prop, 0) + 1
                matched_props.setdefault(prediction.key, set()).add(prop)
            else:
                prop_fp[prop] = prop_fp.get(prop, 0) + 1
    for record in gold:
        for prop in record.gold_properties:
            if prop not in matched_props.get(record.key, set()):
                prop_fn[prop] = prop_fn.get(prop, 0) + 1

    properties = {}
    for prop in sorted(set(prop_tp) | set(prop_fp) | set(prop_fn)):
        properties[prop] = MetricCounts(
            tp=prop_tp.get(prop, 0), fp=prop_fp.get(prop, 0), fn=prop_fn.get(prop, 0)
        )
    return EvalReport(
        method=method,
        type_counts=MetricCounts(tp=type_tp, fp=type_fp, fn=len(gold) - type_tp),
        property_counts=properties,
    )


def report_to_tsv(report: EvalReport) -> str:
    lines = ["metric\tmethod\ttp\tfp\tfn\tprecision\trecall\tf1"]

    def row(name: str, counts: MetricCounts) -> str:
        return (
            f"{name}\t{report.method}\t{counts.tp}\t{counts.fp}\t{counts.fn}"
            f"\t{counts.precision:.4f}\t{counts.recall:.4f}\t{counts.f1:.4f}"
        )

    lines.append(row("type", report.type_counts))
    for prop, counts in report.property_counts.items():
        lines.append(row(f"property:{prop}", counts))
    return "\n".join(lines) + "\n"


def report_summary(report: EvalReport) -> str:
    t = report.type_counts
    lines = [
        f"method={report.method}",
        f"type: P={t.precision:.4f} R={t.recall:.4f} F1={t.f1:.4f} (tp={t.tp} fp={t.fp} fn={t.fn})",
    ]
    for prop, counts in report.property_counts.items():
        lines.append(
            f"{prop}: P={counts.precision:.4f} R={counts.recall:.4f} F1={counts.f1:.4f} "
            f"(tp={counts.tp} fp={counts.fp} fn={counts.fn})"
        )
    return "\n".join(lines)


# Gold record files, so hand-annotated sets flow through the same path.


def gold_record_to_dict(record: GoldRecord) -> dict:
    return {
        "page": record.page,
        "paragraph_index": record.paragraph_index,
        "sentence_index": record.sentence_index,
        "sentence": record.sentence,
        "linked_event_qid": record.linked_event_qid,
        "gold_type_qid": record.gold_type_qid,
        "gold_properties": dict(sorted(record.gold_properties.items())),
    }


def gold_record_from_dict(data: dict) -> GoldRecord:
    return GoldRecord(
        page=data["page"],
        paragraph_index=data["paragraph_index"],
        sentence_index=data["sentence_index"],
        sentence=data["sentence"],
        linked_event_qid=data["linked_event_qid"],
        gold_type_qid=data["gold_type_qid"],
        gold_properties=dict(data["gold_properties"]),
    )


def load_gold_records(path: str | Path) -> list[GoldRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(gold_record_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}: line {lineno}: bad gold record: {exc}") from exc
    return records
