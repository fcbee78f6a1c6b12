"""Class taxonomy store and event-type mapping.

Holds a Wikidata-style class graph (qid, label, subclass-of parents) loaded
from a static tab-separated extract, answers depth-bounded subclass-closure
queries, and maps upstream extractor event types (ACE-style names) onto
root classes.  Cycles in the taxonomy are tolerated: closure traversal
visits every class at most once.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from pathlib import Path

DEFAULT_MAX_DEPTH = 5

_QID = re.compile(r"Q[0-9]+")


class TaxonomyError(ValueError):
    """Malformed or inconsistent taxonomy / mapping file."""


class UnknownClassError(KeyError):
    """A queried qid is not present in the class graph."""


class UnmappedTypeError(KeyError):
    """An event type has no entry in the type mapping."""

    def __init__(self, type_name: str):
        super().__init__(type_name)
        self.type_name = type_name


@dataclass(frozen=True)
class OntologyClass:
    qid: str
    label: str
    parents: tuple[str, ...]


class ClassGraph:
    """Immutable class taxonomy with a children index for closure queries."""

    def __init__(self, classes: dict[str, OntologyClass]):
        for cls in classes.values():
            for parent in cls.parents:
                if parent not in classes:
                    raise TaxonomyError(f"class {cls.qid} has dangling parent {parent}")
        self._classes = dict(classes)
        children: dict[str, list[str]] = {qid: [] for qid in classes}
        for cls in classes.values():
            for parent in cls.parents:
                children[parent].append(cls.qid)
        self._children = {qid: tuple(sorted(kids, key=_qid_number)) for qid, kids in children.items()}

    def __contains__(self, qid: str) -> bool:
        return qid in self._classes

    def __len__(self) -> int:
        return len(self._classes)

    def get(self, qid: str) -> OntologyClass:
        try:
            return self._classes[qid]
        except KeyError:
            raise UnknownClassError(qid) from None

    def label(self, qid: str) -> str:
        return self.get(qid).label

    def children(self, qid: str) -> tuple[str, ...]:
        if qid not in self._classes:
            raise UnknownClassError(qid)
        return self._children[qid]

    def qids(self) -> list[str]:
        return sorted(self._classes, key=_qid_number)


def _qid_number(qid: str) -> int:
    return int(qid[1:])


def load_class_graph(path: str | Path) -> ClassGraph:
    """Load a taxonomy extract: ``qid<TAB>label<TAB>parent1,parent2,...``."""
    classes: dict[str, OntologyClass] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            # Root classes may omit the parents field entirely.
            parts = line.split("\t")
            if len(parts) == 2:
                parts.append("")
            if len(parts) != 3:
                raise TaxonomyError(f"{path}: line {lineno}: expected 2 or 3 tab-separated fields")
            qid, label, parents_field = parts
            if not _QID.fullmatch(qid):
                raise TaxonomyError(f"{path}: line {lineno}: bad qid {qid!r}")
            if not label.strip():
                raise TaxonomyError(f"{path}: line {lineno}: empty label for {qid}")
            if qid in classes:
                raise TaxonomyError(f"{path}: line {lineno}: duplicate qid {qid}")
            parents = tuple(p.strip() for p in parents_field.split(",") if p.strip())
            for parent in parents:
                if not _QID.fullmatch(parent):
                    raise TaxonomyError(f"{path}: line {lineno}: bad parent qid {parent!r}")
            classes[qid] = OntologyClass(qid, label.strip(), parents)
    return ClassGraph(classes)


def subclass_closure(graph: ClassGraph, root_qid: str, max_depth: int = DEFAULT_MAX_DEPTH) -> list[str]:
    """Classes reachable from *root_qid* via inverse subclass-of edges.

    Breadth-first, the root itself at depth 0, each class visited once,
    depth capped at *max_depth*; ordered by (depth, numeric qid).
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if root_qid not in graph:
        raise UnknownClassError(root_qid)
    out = [root_qid]
    seen = {root_qid}
    frontier = deque([root_qid])
    for _ in range(max_depth):
        if not frontier:
            break
        level: list[str] = []
        for _ in range(len(frontier)):
            qid = frontier.popleft()
            for child in graph.children(qid):
                if child not in seen:
                    seen.add(child)
                    level.append(child)
        level.sort(key=_qid_number)
        out.extend(level)
        frontier.extend(level)
    return out


def closure_depths(graph: ClassGraph, root_qid: str, max_depth: int = DEFAULT_MAX_DEPTH) -> dict[str, int]:
    """Minimal depth for every class in the closure (root at 0)."""
    if root_qid not in graph:
        raise UnknownClassError(root_qid)
    depths = {root_qid: 0}
    frontier = deque([root_qid])
    for depth in range(1, max_depth + 1):
        if not frontier:
            break
        for _ in range(len(frontier)):
            qid = frontier.popleft()
            for child in graph.children(qid):
                if child not in depths:
                    depths[child] = depth
                    frontier.append(child)
    return depths


class TypeMapping:
    """Event-type name (extractor vocabulary) to taxonomy root class."""

    def __init__(self, entries: dict[str, str], graph: ClassGraph):
        for type_name, qid in entries.items():
            if qid not in graph:
                raise TaxonomyError(f"mapping target {qid} for {type_name!r} not in class graph")
        self._entries = dict(entries)

    def __contains__(self, type_name: str) -> bool:
        return type_name in self._entries

    def types(self) -> list[str]:
        return sorted(self._entries)

    def map_event_type(self, type_name: str) -> str:
        try:
            return self._entries[type_name]
        except KeyError:
            raise UnmappedTypeError(type_name) from None


def map_event_type(mapping: TypeMapping, type_name: str) -> str:
    return mapping.map_event_type(type_name)


def load_type_mapping(path: str | Path, graph: ClassGraph) -> TypeMapping:
    """Load ``event_type<TAB>qid`` rows; ``#`` comments allowed."""
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise TaxonomyError(f"{path}: line {lineno}: expected 2 tab-separated fields")
            type_name, qid = parts[0].strip(), parts[1].strip()
            if not type_name:
                raise TaxonomyError(f"{path}: line {lineno}: empty event type")
            if not _QID.fullmatch(qid):
                raise TaxonomyError(f"{path}: line {lineno}: bad qid {qid!r}")
            if type_name in entries:
                raise TaxonomyError(f"{path}: line {lineno}: duplicate event type {type_name!r}")
            entries[type_name] = qid
    return TypeMapping(entries, graph)
