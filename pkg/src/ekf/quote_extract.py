"""Quote mention extraction from parsed person pages.

Walks the section tree of a person page and turns every quote block in an
attributed section into a Mention.  Sections whose normalized heading is on
the stop list (misattributed / disputed / about, plus per-language entries
from config) are skipped together with their subtrees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .textnorm import normalize_text, stable_hash
from .wiki_ingest import BlockKind, InternalLink, PageKind, Section, WikiPage

MIN_MENTION_CHARS = 2

DEFAULT_STOP_SECTIONS = frozenset({"misattributed", "disputed", "about"})


@dataclass(frozen=True)
class PersonId:
    """A person across language editions: canonical name plus page titles."""

    canonical_name: str
    page_titles: dict[str, str] = field(hash=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self.canonical_name:
            raise ValueError("canonical_name must be nonempty")
        if not self.page_titles:
            raise ValueError("person needs at least one page title")


@dataclass(frozen=True)
class Mention:
    """One occurrence of a quote in one language."""

    mention_id: str
    person: str  # canonical name
    language: str
    text: str
    contexts: tuple[str, ...]
    linked_entities: tuple[InternalLink, ...]
    section_path: tuple[str, ...]

    @property
    def has_context(self) -> bool:
        return bool(self.contexts) or bool(self.linked_entities)


def _normalize_heading(heading: str) -> str:
    return re.sub(r"\s+", " ", heading).strip().casefold()


def load_stop_sections(path: str | Path) -> frozenset[str]:
    """Read extra stop-list headings: one per line, ``#`` comments."""
    entries = set(DEFAULT_STOP_SECTIONS)
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                entries.add(_normalize_heading(line))
    return frozenset(entries)


def mention_id_for(person: str, language: str, text: str, section_path: tuple[str, ...]) -> str:
    return stable_hash("mention", person, language, text, "\x1e".join(section_path))


def extract_mentions(
    page: WikiPage,
    person: PersonId,
    stop_sections: frozenset[str] = DEFAULT_STOP_SECTIONS,
) -> list[Mention]:
    """Collect the page's quote blocks as Mentions, in document order."""
    if page.page_kind is not PageKind.PERSON:
        raise ValueError(f"page {page.title!r} is not a person page")
    mentions: list[Mention] = []

    def walk(section: Section, path: tuple[str, ...]) -> None:
        if section.heading and _normalize_heading(section.heading) in stop_sections:
            return
        if section.heading:
            path = path + (section.heading,)
        for block in section.blocks:
            if block.kind is not BlockKind.QUOTE_ITEM:
                continue
            text = normalize_text(block.text)
            if len(text) < MIN_MENTION_CHARS:
                continue
            contexts = tuple(c for c in (ctx.strip() for ctx in block.sub_items) if c)
            mentions.append(
                Mention(
                    mention_id=mention_id_for(person.canonical_name, page.language, text, path),
                    person=person.canonical_name,
                    language=page.language,
                    text=text,
                    contexts=contexts,
                    linked_entities=tuple(block.links),
                    section_path=path,
                )
            )
        for child in section.children:
            walk(child, path)

    walk(page.root, ())
    return mentions


def count_contextful(mentions: list[Mention]) -> int:
    """Mentions carrying at least one context line or linked entity."""
    return sum(1 for m in mentions if m.has_context)


def group_persons(pages: list[WikiPage]) -> list[PersonId]:
    """Group person pages into PersonIds by exact title across languages.

    Person page titles coincide across Wikiquote language editions for the
    corpus subset handled here; an alias table can be layered on later if a
    corpus needs it.  Output is sorted by canonical name.
    """
    by_title: dict[str, dict[str, str]] = {}
    for page in pages:
        if page.page_kind is not PageKind.PERSON:
            continue
        by_title.setdefault(page.title, {})[page.language] = page.title
    return [PersonId(title, langs) for title, langs in sorted(by_title.items())]


# Stage artifact helpers


def mention_to_dict(m: Mention) -> dict:
    return {
        "id": m.mention_id,
        "person": m.person,
        "lang": m.language,
        "text": m.text,
        "contexts": list(m.contexts),
        "links": [{"target": l.target, "surface": l.surface, "span": list(l.span)} for l in m.linked_entities],
        "section_path": list(m.section_path),
    }


def mention_from_dict(data: dict) -> Mention:
    return Mention(
        mention_id=data["id"],
        person=data["person"],
        language=data["lang"],
        text=data["text"],
        contexts=tuple(data["contexts"]),
        linked_entities=tuple(
            InternalLink(l["target"], l["surface"], tuple(l["span"])) for l in data["links"]
        ),
        section_path=tuple(data["section_path"]),
    )
