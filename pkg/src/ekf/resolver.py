"""Sub-event resolution against the class taxonomy.

An event mention (sentence, extractor event type, trigger) is resolved to
the most specific taxonomy class: the mapped root class's subclass closure
supplies the candidates, question templates are instantiated per candidate,
a pluggable QA scorer rates each question against the sentence, and the
best mean score wins.  Ties prefer shallower then numerically smaller
classes; a best score under the floor falls back to the root class.

The upstream neural extractor stays out of scope: mentions arrive from an
input file, or from the rule-based trigger lexicon that exists to exercise
the pipeline end to end.
"""

from __future__ import annotations

import enum
import json
import re
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

from .ontology import ClassGraph, TypeMapping, subclass_closure
from .sentences import split_sentences
from .wiki_ingest import BlockKind, Section, WikiPage

DEFAULT_SCORE_FLOOR = 0.1

DEFAULT_QUESTION_TEMPLATES = (
    "Does the text describe a {label}?",
    "Is the {trigger} event an instance of {label}?",
    "Did a {label} take place?",
)

_ALLOWED_PLACEHOLDERS = {"label", "trigger"}

_TOKEN = re.compile(r"\w+", re.UNICODE)


class TemplateError(ValueError):
    """A question template uses an unknown placeholder."""


class ResolutionMethod(str, enum.Enum):
    QA = "qa"
    DIRECT_BASELINE = "direct_baseline"


@dataclass(frozen=True)
class EventMention:
    """One extracted event occurrence in a source sentence."""

    sentence: str
    event_type: str
    trigger: str
    arguments: tuple[tuple[str, str], ...] = ()
    page: str = ""
    paragraph: int = 0
    paragraph_text: str | None = None

    def __post_init__(self) -> None:
        if not self.sentence:
            raise ValueError("event mention sentence must be nonempty")
        if self.trigger not in self.sentence:
            raise ValueError(f"trigger {self.trigger!r} does not occur in the sentence")


@dataclass(frozen=True)
class SubEventNode:
    """A resolved sub-event: mention plus the chosen taxonomy class."""

    mention: EventMention
    resolved_qid: str
    resolved_label: str
    score: float
    candidates_considered: int
    method: ResolutionMethod

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


class QaScorer(Protocol):
    def score(self, question: str, passage: str) -> float: ...


def _validate_template(template: str) -> None:
    try:
        fields = [f for _, f, _, _ in string.Formatter().parse(template) if f is not None]
    except ValueError as exc:
        raise TemplateError(f"unparseable template {template!r}: {exc}") from exc
    for name in fields:
        if name not in _ALLOWED_PLACEHOLDERS:
            raise TemplateError(f"template {template!r} uses unknown placeholder {{{name or ''}}}")


def load_templates(path: str | Path) -> tuple[str, ...]:
    """Read question templates, one per line; placeholder check at load."""
    templates = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            _validate_template(line)
            templates.append(line)
    return tuple(templates)


def generate_questions(
    label: str,
    trigger: str,
    templates: Iterable[str] = DEFAULT_QUESTION_TEMPLATES,
) -> list[str]:
    """Instantiate every template with the candidate label and trigger."""
    questions = []
    for template in templates:
        _validate_template(template)
        questions.append(template.format(label=label, trigger=trigger))
    return questions


def _clamp01(value: float) -> float:
    return max(0.0, min(1.0, float(value)))


def resolve(
    mention: EventMention,
    graph: ClassGraph,
    mapping: TypeMapping,
    scorer: QaScorer,
    templates: tuple[str, ...] = DEFAULT_QUESTION_TEMPLATES,
    max_depth: int = 5,
    score_floor: float = DEFAULT_SCORE_FLOOR,
    scope: str = "sentence",
) -> SubEventNode:
    """Pick the best-scoring candidate class for one event mention."""
    if scope not in ("sentence", "paragraph"):
        raise ValueError(f"unknown question scope {scope!r}")
    passage = mention.sentence
    if scope == "paragraph" and mention.paragraph_text:
        passage = mention.paragraph_text
    base_qid = mapping.map_event_type(mention.event_type)
    candidates = subclass_closure(graph, base_qid, max_depth)

    scores: dict[str, float] = {}
    best_qid = base_qid
    best_score = -1.0
    # Candidates arrive ordered by (depth, numeric qid); keeping the first
    # strict maximum therefore implements the tie-break rule.
    for qid in candidates:
        questions = generate_questions(graph.label(qid), mention.trigger, templates)
        if questions:
            value = sum(_clamp01(scorer.score(q, passage)) for q in questions) / len(questions)
        else:
            value = 0.0
        scores[qid] = value
        if value > best_score:
            best_score = value
            best_qid = qid
    if best_score < score_floor:
        chosen = base_qid
    else:
        chosen = best_qid
    return SubEventNode(
        mention=mention,
        resolved_qid=chosen,
        resolved_label=graph.label(chosen),
        score=scores[chosen],
        candidates_considered=len(candidates),
        method=ResolutionMethod.QA,
    )


def resolve_direct_baseline(
    mention: EventMention,
    mapping: TypeMapping,
    graph: ClassGraph,
) -> SubEventNode:
    """Ablation: skip question answering, take the mapped class directly."""
    qid = mapping.map_event_type(mention.event_type)
    return SubEventNode(
        mention=mention,
        resolved_qid=qid,
        resolved_label=graph.label(qid),
        score=1.0,
        candidates_considered=1,
        method=ResolutionMethod.DIRECT_BASELINE,
    )


class ConstantScorer:
    """Returns one fixed value for every question; mainly for tests."""

    def __init__(self, value: float):
        self.value = _clamp01(value)

    def score(self, question: str, passage: str) -> float:
        return self.value


class KeywordOverlapScorer:
    """Deterministic stand-in for the QA model.

    Recovers the candidate label from the question by reverse-matching the
    known templates, then scores the fraction of label tokens present in
    the passage (lowercased, exact match).  The optional prefix table maps
    a label-token prefix to a passage-token prefix, so that morphological
    variants like detention/detained can be made to match; naive prefix
    truncation alone cannot ("detent-" is not a prefix of "detained"),
    which is why the table is configuration, not a built-in rule.
    """

    def __init__(
        self,
        templates: tuple[str, ...] = DEFAULT_QUESTION_TEMPLATES,
        prefix_map: dict[str, str] | None = None,
        prefix_len: int = 6,
    ):
        self._patterns = [self._template_pattern(t) for t in templates]
        self._prefix_map = dict(prefix_map) if prefix_map is not None else None
        self._prefix_len = prefix_len

    @staticmethod
    def _template_pattern(template: str) -> re.Pattern:
        _validate_template(template)
        pattern = ""
        for literal, fieldname, _, _ in string.Formatter().parse(template):
            pattern += re.escape(literal)
            if fieldname is not None:
                pattern += f"(?P<{fieldname}>.+?)" if fieldname == "label" else "(?:.+?)"
        return re.compile(pattern + r"\Z")

    def _label_tokens(self, question: str) -> list[str]:
        for pattern in self._patterns:
            match = pattern.match(question)
            if match and "label" in pattern.groupindex:
                return [t.lower() for t in _TOKEN.findall(match.group("label"))]
        return [t.lower() for t in _TOKEN.findall(question)]

    def _token_matches(self, token: str, passage_tokens: set[str]) -> bool:
        if token in passage_tokens:
            return True
        if self._prefix_map is None:
            return False
        prefix = token[: self._prefix_len]
        prefix = self._prefix_map.get(prefix, prefix)
        return any(p.startswith(prefix) for p in passage_tokens)

    def score(self, question: str, passage: str) -> float:
        label_tokens = self._label_tokens(question)
        if not label_tokens:
            return 0.0
        passage_tokens = {t.lower() for t in _TOKEN.findall(passage)}
        hits = sum(1 for t in label_tokens if self._token_matches(t, passage_tokens))
        return hits / len(label_tokens)


def keyword_stub_scorer(
    templates: tuple[str, ...] = DEFAULT_QUESTION_TEMPLATES,
    prefix_map: dict[str, str] | None = None,
) -> KeywordOverlapScorer:
    return KeywordOverlapScorer(templates=templates, prefix_map=prefix_map)


def load_prefix_map(path: str | Path) -> dict[str, str]:
    """Read the morphological prefix table: ``label_prefix<TAB>passage_prefix``."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise ValueError(f"{path}: line {lineno}: expected 2 tab-separated fields")
            table[parts[0].strip()] = parts[1].strip()
    return table


# ---------------------------------------------------------------------------
# Rule-based trigger lexicon (pipeline exercise only; a neural extractor
# would replace this and feed the same input format).


def load_trigger_lexicon(path: str | Path) -> dict[str, str]:
    """Read ``trigger<TAB>event_type`` rows into a casefolded lookup."""
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise ValueError(f"{path}: line {lineno}: expected 2 tab-separated fields")
            lexicon[parts[0].strip().casefold()] = parts[1].strip()
    return lexicon


def _paragraph_blocks(page: WikiPage):
    def walk(section: Section):
        for block in section.blocks:
            if block.kind is BlockKind.PARAGRAPH:
                yield block
        for child in section.children:
            yield from walk(child)

    yield from walk(page.root)


def extract_event_mentions(page: WikiPage, lexicon: dict[str, str]) -> list[EventMention]:
    """Scan a page's paragraphs for lexicon triggers, one mention per
    (sentence, trigger word) pair, in document order."""
    mentions: list[EventMention] = []
    for paragraph_index, block in enumerate(_paragraph_blocks(page)):
        for sentence in split_sentences(block.text):
            seen: set[str] = set()
            for word in _TOKEN.findall(sentence):
                key = word.casefold()
                if key in lexicon and key not in seen:
                    seen.add(key)
                    mentions.append(
                        EventMention(
                            sentence=sentence,
                            event_type=lexicon[key],
                            trigger=word,
                            page=page.title,
                            paragraph=paragraph_index,
                            paragraph_text=block.text,
                        )
                    )
    return mentions


# Stage artifact helpers


def event_mention_to_dict(m: EventMention) -> dict:
    record = {
        "sentence": m.sentence,
        "event_type": m.event_type,
        "trigger": m.trigger,
        "arguments": [list(arg) for arg in m.arguments],
        "page": m.page,
        "paragraph": m.paragraph,
    }
    if m.paragraph_text is not None:
        record["paragraph_text"] = m.paragraph_text
    return record


def event_mention_from_dict(data: dict) -> EventMention:
    return EventMention(
        sentence=data["sentence"],
        event_type=data["event_type"],
        trigger=data["trigger"],
        arguments=tuple((role, surface) for role, surface in data.get("arguments", [])),
        page=data.get("page", ""),
        paragraph=data.get("paragraph", 0),
        paragraph_text=data.get("paragraph_text"),
    )


def load_event_mentions(path: str | Path) -> list[EventMention]:
    mentions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                mentions.append(event_mention_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}: line {lineno}: bad event mention: {exc}") from exc
    return mentions


def subevent_to_dict(node: SubEventNode) -> dict:
    record = event_mention_to_dict(node.mention)
    record.update(
        {
            "resolved_qid": node.resolved_qid,
            "resolved_label": node.resolved_label,
            "score": node.score,
            "candidates_considered": node.candidates_considered,
            "method": node.method.value,
        }
    )
    return record


def subevent_from_dict(data: dict) -> SubEventNode:
    return SubEventNode(
        mention=event_mention_from_dict(data),
        resolved_qid=data["resolved_qid"],
        resolved_label=data["resolved_label"],
        score=data["score"],
        candidates_considered=data["candidates_considered"],
        method=ResolutionMethod(data["method"]),
    )
