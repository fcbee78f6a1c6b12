"""Wiki-markup ingestion.

Parses the pragmatic markup subset found on quote and event pages into a
section tree: headings open sections, ``*`` items become quote blocks with
``**`` sub-bullets attached, ``[[...]]`` links are extracted with their
character spans, and templates / comments / refs / tables are dropped.
Malformed markup degrades to plain paragraph text; parsing never raises on
any input string.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

MAX_TEMPLATE_DEPTH = 16

_HEADING = re.compile(r"^(=+)(.*?)(=+)\s*$")
_COMMENT = re.compile(r"<!--.*?-->", re.S)
_COMMENT_OPEN = re.compile(r"<!--.*\Z", re.S)
_REF_SELFCLOSED = re.compile(r"<ref\b[^<>]*?/>", re.I)
_REF_PAIR = re.compile(r"<ref\b[^<>]*?>.*?</ref\s*>", re.I | re.S)
_APOSTROPHE_RUN = re.compile(r"''+")

# Link targets in these namespaces carry no prose and are dropped outright.
_DROPPED_NAMESPACES = ("file:", "image:", "category:", "media:")


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus files."""


class PageKind(str, enum.Enum):
    PERSON = "person"
    EVENT = "event"


class BlockKind(str, enum.Enum):
    PARAGRAPH = "paragraph"
    QUOTE_ITEM = "quote_item"


@dataclass(frozen=True)
class RawPage:
    """One unparsed corpus record."""

    title: str
    language: str
    wikitext: str
    page_kind: PageKind

    def __post_init__(self) -> None:
        if not self.title:
            raise ValueError("page title must be nonempty")
        if not re.fullmatch(r"[a-z]{2,3}", self.language):
            raise ValueError(f"bad language code: {self.language!r}")


@dataclass(frozen=True)
class InternalLink:
    """A wiki link with its span in the cleaned block text."""

    target: str
    surface: str
    span: tuple[int, int]


@dataclass
class Block:
    kind: BlockKind
    text: str
    sub_items: list[str] = field(default_factory=list)
    links: list[InternalLink] = field(default_factory=list)


@dataclass
class Section:
    heading: str
    heading_level: int
    blocks: list[Block] = field(default_factory=list)
    children: list["Section"] = field(default_factory=list)


@dataclass
class WikiPage:
    title: str
    language: str
    page_kind: PageKind
    root: Section


def _strip_emphasis(text: str) -> str:
    # Runs of two or more apostrophes are bold/italic markers.
    return _APOSTROPHE_RUN.sub(lambda m: "" if len(m.group()) >= 2 else m.group(), text)


def _find_link_end(text: str, start: int) -> int | None:
    """Index just past the ``]]`` matching the ``[[`` at *start*, or None."""
    depth = 0
    i = start
    n = len(text)
    while i < n:
        if text.startswith("[[", i):
            depth += 1
            i += 2
        elif text.startswith("]]", i):
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    return None


def extract_links(block_text: str) -> tuple[str, list[InternalLink]]:
    """Strip inline markup from one block, collecting internal links.

    Returns the cleaned text and the links in order of appearance; each
    link's span indexes the cleaned text, so ``cleaned[s:e] == surface``.
    Unclosed ``[[`` stays literal; File/Image/Category links are dropped.
    """
    out: list[str] = []
    out_len = 0
    links: list[InternalLink] = []
    i = 0
    n = len(block_text)
    while i < n:
        if block_text.startswith("[[", i):
            end = _find_link_end(block_text, i)
            if end is None:
                out.append(block_text[i : i + 2])
                out_len += 2
                i += 2
                continue
            inner = block_text[i + 2 : end - 2]
            i = end
            target, sep, rest = inner.partition("|")
            target = target.strip()
            if target.lower().startswith(_DROPPED_NAMESPACES):
                continue
            surface = _strip_emphasis(rest if sep else target).strip()
            if not surface:
                surface = target
            if not target:
                if surface:
                    out.append(surface)
                    out_len += len(surface)
                continue
            links.append(InternalLink(target, surface, (out_len, out_len + len(surface))))
            out.append(surface)
            out_len += len(surface)
        elif block_text[i] == "'" and block_text.startswith("''", i):
            run = i
            while run < n and block_text[run] == "'":
                run += 1
            i = run
        else:
            out.append(block_text[i])
            out_len += 1
            i += 1
    return "".join(out), links


def _match_template(text: str, start: int, max_depth: int) -> int | None:
    depth = 0
    i = start
    n = len(text)
    while i < n:
        if text.startswith("{{", i):
            depth += 1
            if depth > max_depth:
                return None
            i += 2
        elif text.startswith("}}", i):
            depth -= 1
            i += 2
            if depth <= 0:
                return i
        else:
            i += 1
    return None


def strip_templates(text: str, max_depth: int = MAX_TEMPLATE_DEPTH) -> str:
    """Remove balanced ``{{...}}`` spans; unbalanced or over-deep braces stay."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("{{", i):
            end = _match_template(text, i, max_depth)
            if end is None:
                out.append("{{")
                i += 2
            else:
                i = end
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _drop_tables(lines: list[str]) -> list[str]:
    kept = []
    in_table = False
    for line in lines:
        s = line.lstrip()
        if in_table:
            if s.startswith("|}"):
                in_table = False
            continue
        if s.startswith("{|"):
            in_table = True
            # A dropped table still separates the paragraphs around it.
            kept.append("")
            continue
        kept.append(line)
    return kept


def _parse_heading(line: str) -> tuple[int, str] | None:
    m = _HEADING.match(line.strip())
    if m is None:
        return None
    level = min(len(m.group(1)), len(m.group(3)), 6)
    title, _ = extract_links(m.group(2).strip())
    return level, title.strip()


def parse_wikitext(raw: RawPage) -> WikiPage:
    """Parse one page into its section tree. Deterministic, never raises."""
    text = raw.wikitext.replace("\r\n", "\n").replace("\r", "\n")
    text = _COMMENT.sub("", text)
    text = _COMMENT_OPEN.sub("", text)
    text = _REF_PAIR.sub("", text)
    text = _REF_SELFCLOSED.sub("", text)
    text = strip_templates(text)

    root = Section(heading="", heading_level=0)
    stack = [root]
    para_buf: list[str] = []
    current_quote: Block | None = None

    def flush_para() -> None:
        nonlocal para_buf
        if para_buf:
            cleaned, links = extract_links(" ".join(para_buf))
            cleaned = cleaned.strip()
            if cleaned:
                stack[-1].blocks.append(Block(BlockKind.PARAGRAPH, cleaned, [], links))
        para_buf = []

    for line in _drop_tables(text.split("\n")):
        heading = _parse_heading(line)
        if heading is not None:
            level, title = heading
            flush_para()
            current_quote = None
            while stack[-1].heading_level >= level:
                stack.pop()
            section = Section(heading=title, heading_level=level)
            stack[-1].children.append(section)
            stack.append(section)
            continue
        stripped = line.strip()
        if not stripped:
            flush_para()
            current_quote = None
            continue
        if stripped.startswith("*"):
            flush_para()
            stars = len(stripped) - len(stripped.lstrip("*"))
            cleaned, links = extract_links(stripped[stars:].strip())
            cleaned = cleaned.strip()
            if not cleaned:
                if stars == 1:
                    current_quote = None
                continue
            if stars == 1:
                block = Block(BlockKind.QUOTE_ITEM, cleaned, [], links)
                stack[-1].blocks.append(block)
                current_quote = block
            elif current_quote is not None:
                current_quote.sub_items.append(cleaned)
            else:
                # sub-bullet without a parent bullet degrades to a paragraph
                stack[-1].blocks.append(Block(BlockKind.PARAGRAPH, cleaned, [], links))
            continue
        para_buf.append(stripped)
    flush_para()
    return WikiPage(raw.title, raw.language, raw.page_kind, root)


def load_corpus(path: str | Path) -> list[RawPage]:
    """Read a line-delimited corpus file into RawPages, preserving order."""
    pages: list[RawPage] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: not a valid record: {exc}") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"line {lineno}: record is not an object")
            try:
                title = record["title"]
                lang = record["lang"]
                kind = record["kind"]
                wikitext = record["wikitext"]
            except KeyError as exc:
                raise CorpusError(f"line {lineno}: missing field {exc.args[0]}") from exc
            try:
                page = RawPage(title, lang, wikitext, PageKind(kind))
            except ValueError as exc:
                raise CorpusError(f"line {lineno}: {exc}") from exc
            key = (page.title, page.language)
            if key in seen:
                raise CorpusError(f"line {lineno}: duplicate page {key}")
            seen.add(key)
            pages.append(page)
    return pages


# ---------------------------------------------------------------------------
# Stage artifact (de)serialization.  Key order is fixed so identical pages
# always serialize to identical bytes.


def _link_to_dict(link: InternalLink) -> dict:
    return {"target": link.target, "surface": link.surface, "span": list(link.span)}


def _block_to_dict(block: Block) -> dict:
    return {
        "kind": block.kind.value,
        "text": block.text,
        "sub_items": block.sub_items,
        "links": [_link_to_dict(l) for l in block.links],
    }


def _section_to_dict(section: Section) -> dict:
    return {
        "heading": section.heading,
        "level": section.heading_level,
        "blocks": [_block_to_dict(b) for b in section.blocks],
        "children": [_section_to_dict(c) for c in section.children],
    }


def page_to_dict(page: WikiPage) -> dict:
    return {
        "title": page.title,
        "lang": page.language,
        "kind": page.page_kind.value,
        "root": _section_to_dict(page.root),
    }


def page_to_json(page: WikiPage) -> str:
    return json.dumps(page_to_dict(page), ensure_ascii=False, sort_keys=True)


def _section_from_dict(data: dict) -> Section:
    return Section(
        heading=data["heading"],
        heading_level=data["level"],
        blocks=[
            Block(
                BlockKind(b["kind"]),
                b["text"],
                list(b["sub_items"]),
                [InternalLink(l["target"], l["surface"], tuple(l["span"])) for l in b["links"]],
            )
            for b in data["blocks"]
        ],
        children=[_section_from_dict(c) for c in data["children"]],
    )


def page_from_dict(data: dict) -> WikiPage:
    return WikiPage(
        title=data["title"],
        language=data["lang"],
        page_kind=PageKind(data["kind"]),
        root=_section_from_dict(data["root"]),
    )
