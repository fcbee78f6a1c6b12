"""Command-line pipeline driver.

Each subcommand runs one batch stage and exchanges data with the others
through files in the output directory, so stages can be rerun, inspected,
or fed hand-made inputs independently.  All artifacts are deterministic:
rerunning a stage on the same inputs produces byte-identical files.

Exit codes: 0 on success, 1 for configuration or input validation errors,
2 for unexpected runtime failures.  Diagnostics go to stderr; stdout
carries only the stats table and the evaluation summary.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import alignment, embedding, evaluation, kg, ontology, quote_extract, resolver, wiki_ingest

PAGES_FILE = "pages.jsonl"
PERSONS_FILE = "persons.jsonl"
MENTIONS_FILE = "mentions.jsonl"
CLUSTERS_FILE = "clusters.jsonl"
SUBEVENTS_FILE = "subevents.jsonl"
KG_FILE = "kg.nt"
STATS_FILE = "stats.tsv"
EVAL_FILE = "eval_report.tsv"

OUTPUT_DIR_ENV = "EKF_OUTPUT_DIR"

_PATH_KEYS = (
    "corpus",
    "taxonomy",
    "type_mapping",
    "templates",
    "stop_sections",
    "trigger_lexicon",
    "prefix_map",
    "gold_snapshot",
    "gold_records",
    "vectors",
    "vectors_index",
    "output_dir",
)


class ConfigError(ValueError):
    """Bad configuration or missing prerequisite input."""


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str = ""
    taxonomy: str = ""
    type_mapping: str = ""
    templates: str = ""
    stop_sections: str = ""
    trigger_lexicon: str = ""
    prefix_map: str = ""
    gold_snapshot: str = ""
    gold_records: str = ""
    provider: str = "hash"
    provider_dim: int = 384
    vectors: str = ""
    vectors_index: str = ""
    threshold: float = 0.8
    min_community_size: int = 2
    max_depth: int = 5
    score_floor: float = 0.1
    scorer: str = "keyword"
    scorer_constant: float = 1.0
    method: str = "qa"
    question_scope: str = "sentence"
    strict_eval: bool = False
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if self.provider not in ("hash", "file"):
            raise ConfigError(f"provider must be 'hash' or 'file', got {self.provider!r}")
        if self.scorer not in ("keyword", "constant"):
            raise ConfigError(f"scorer must be 'keyword' or 'constant', got {self.scorer!r}")
        if self.method not in ("qa", "direct_baseline"):
            raise ConfigError(f"method must be 'qa' or 'direct_baseline', got {self.method!r}")
        if self.question_scope not in ("sentence", "paragraph"):
            raise ConfigError(f"question_scope must be 'sentence' or 'paragraph'")
        if not 0.0 < self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.min_community_size < 1:
            raise ConfigError("min_community_size must be >= 1")
        if self.max_depth < 0:
            raise ConfigError("max_depth must be >= 0")
        if not 0.0 <= self.score_floor <= 1.0:
            raise ConfigError(f"score_floor must be in [0, 1], got {self.score_floor}")
        if self.provider_dim < 8:
            raise ConfigError("provider_dim must be >= 8")


def load_config(path: str | Path) -> PipelineConfig:
    """Parse the flat TOML config; relative paths resolve against its directory."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    known = {f.name: f for f in fields(PipelineConfig)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
    values = {}
    for name, value in data.items():
        expected = known[name].type
        if expected == "float" and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        type_ok = {
            "str": lambda v: isinstance(v, str),
            "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
            "float": lambda v: isinstance(v, float),
            "bool": lambda v: isinstance(v, bool),
        }[expected]
        if not type_ok(value):
            raise ConfigError(f"{path}: key {name!r} must be of type {expected}")
        values[name] = value
    base = path.parent
    for key in _PATH_KEYS:
        if values.get(key):
            values[key] = str((base / values[key]))
    return PipelineConfig(**values)


def resolve_output_dir(cfg: PipelineConfig) -> Path:
    override = os.environ.get(OUTPUT_DIR_ENV)
    out = Path(override) if override else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(cfg: PipelineConfig, key: str) -> str:
    value = getattr(cfg, key)
    if not value:
        raise ConfigError(f"config key {key!r} is required for this stage")
    return value


def _write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: bad JSON: {exc}") from exc
    return records


def _artifact(out_dir: Path, name: str) -> Path:
    path = out_dir / name
    if not path.exists():
        raise ConfigError(f"{path} not found; run the producing stage first")
    return path


def _parallel_map(func, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (jobs * 4))))


def _cluster_group(task):
    group, provider, acfg = task
    return alignment.cluster_person(group, provider, acfg)


def _load_pages(out_dir: Path) -> list[wiki_ingest.WikiPage]:
    return [wiki_ingest.page_from_dict(d) for d in _read_jsonl(_artifact(out_dir, PAGES_FILE))]


def _event_pages(pages: list[wiki_ingest.WikiPage]) -> list[wiki_ingest.WikiPage]:
    events = [p for p in pages if p.page_kind is wiki_ingest.PageKind.EVENT]
    return sorted(events, key=lambda p: (p.title, p.language))


def _load_mentions(out_dir: Path) -> list[quote_extract.Mention]:
    return [
        quote_extract.mention_from_dict(d) for d in _read_jsonl(_artifact(out_dir, MENTIONS_FILE))
    ]


def _load_clusters(out_dir: Path) -> list[alignment.QuoteCluster]:
    return [
        alignment.cluster_from_dict(d) for d in _read_jsonl(_artifact(out_dir, CLUSTERS_FILE))
    ]


def _load_persons(out_dir: Path) -> list[quote_extract.PersonId]:
    return [
        quote_extract.PersonId(d["name"], dict(d["pages"]))
        for d in _read_jsonl(_artifact(out_dir, PERSONS_FILE))
    ]


def _build_provider(cfg: PipelineConfig) -> embedding.EmbeddingProvider:
    if cfg.provider == "hash":
        return embedding.hash_provider(cfg.provider_dim)
    return embedding.file_provider(_require(cfg, "vectors"), _require(cfg, "vectors_index"))


def _load_templates(cfg: PipelineConfig) -> tuple[str, ...]:
    if cfg.templates:
        return resolver.load_templates(cfg.templates)
    return resolver.DEFAULT_QUESTION_TEMPLATES


def _build_scorer(cfg: PipelineConfig, templates: tuple[str, ...]) -> resolver.QaScorer:
    if cfg.scorer == "constant":
        return resolver.ConstantScorer(cfg.scorer_constant)
    prefix_map = resolver.load_prefix_map(cfg.prefix_map) if cfg.prefix_map else None
    return resolver.keyword_stub_scorer(templates, prefix_map)


def _load_graph_and_mapping(cfg: PipelineConfig):
    graph = ontology.load_class_graph(_require(cfg, "taxonomy"))
    mapping = ontology.load_type_mapping(_require(cfg, "type_mapping"), graph)
    return graph, mapping


def cmd_ingest(cfg: PipelineConfig, out_dir: Path, args: argparse.Namespace) -> None:
    raws = wiki_ingest.load_corpus(_require(cfg, "corpus"))
    pages = _parallel_map(wiki_ingest.parse_wikitext, raws, args.jobs)
    pages.sort(key=lambda p: (p.title, p.language))
    _write_jsonl(out_dir / PAGES_FILE, [wiki_ingest.page_to_dict(p) for p in pages])
    print(f"ingest: {len(pages)} pages -> {out_dir / PAGES_FILE}", file=sys.stderr)


def cmd_quotes(cfg: PipelineConfig, out_dir: Path, args: argparse.Namespace) -> None:
    pages = _load_pages(out_dir)
    persons = quote_extract.group_persons(pages)
    stop = (
        quote_extract.load_stop_sections(cfg.stop_sections)
        if cfg.stop_sections
        else quote_extract.DEFAULT_STOP_SECTIONS
    )
    by_key = {(p.title, p.language): p for p in pages}
    mentions: list[quote_extract.Mention] = []
    for person in persons:
        for language in sorted(person.page_titles):
            page = by_key[(person.page_titles[language], language)]
            mentions.extend(quote_extract.extract_mentions(page, person, stop))
    _write_jsonl(
        out_dir / PERSONS_FILE,
        [{"name": p.canonical_name, "pages": dict(sorted(p.page_titles.items()))} for p in persons],
    )
    _write_jsonl(out_dir / MENTIONS_FILE, [quote_extract.mention_to_dict(m) for m in mentions])
    contextful = quote_extract.count_contextful(mentions)
    print(
        f"quotes: {len(persons)} persons, {len(mentions)} mentions "
        f"({contextful} with contexts) -> {out_dir / MENTIONS_FILE}",
        file=sys.stderr,
    )


def cmd_align(cfg: PipelineConfig, out_dir: Path, args: argparse.Namespace) -> None:
    mentions = _load_mentions(out_dir)
    provider = _build_provider(cfg)
    acfg = alignment.AlignmentConfig(cfg.threshold, cfg.min_community_size)
    by_person: dict[str, list[quote_extract.Mention]] = {}
    for mention in mentions:
        by_person.setdefault(mention.person, []).append(mention)
    tasks = [(by_person[person], provider, acfg) for person in sorted(by_person)]
    clusters: list[alignment.QuoteCluster] = []
    for group in _parallel_map(_cluster_group, tasks, args.jobs):
        clusters.extend(group)
    _write_jsonl(out_dir / CLUSTERS_FILE, [alignment.cluster_to_dict(c) for c in clusters])
    print(f"align: {len(clusters)} clusters -> {out_dir / CLUSTERS_FILE}", file=sys.stderr)


def cmd_resolve(cfg: PipelineConfig, out_dir: Path, args: argparse.Namespace) -> None:
    pages = _event_pages(_load_pages(out_dir))
    lexicon = resolver.load_trigger_lexicon(_require(cfg, "trigger_lexicon"))
    graph, mapping = _load_graph_and_mapping(cfg)
    templates = _load_templates(cfg)
    scorer = _build_scorer(cfg, templates)
    nodes: list[resolver.SubEventNode] = []
    for page in pages:
        for mention in resolver.extract_event_mentions(page, lexicon):
            if cfg.method == "direct_baseline":
                nodes.append(resolver.resolve_direct_baseline(mention, mapping, graph))
            else:
                nodes.append(
                    resolver.resolve(
                        mention,
                        graph,
                        mapping,
                        scorer,
                        templates,
                        max_depth=cfg.max_depth,
                        score_floor=cfg.score_floor,
                        scope=cfg.question_scope,
                    )
                )
    _write_jsonl(out_dir / SUBEVENTS_FILE, [resolver.subevent_to_dict(n) for n in nodes])
    print(f"resolve: {len(nodes)} sub-events -> {out_dir / SUBEVENTS_FILE}", file=sys.stderr)


def cmd_emit(cfg: PipelineConfig, out_dir: Path, args: argparse.Namespace) -> None:
    persons = _load_persons(out_dir)
    mentions = _load_mentions(out_dir)
    clusters = _load_clusters(out_dir)
    subevents_path = out_dir / SUBEVENTS_FILE
    subevents = (
        [resolver.subevent_from_dict(d) for d in _read_jsonl(subevents_path)]
        if subevents_path.exists()
        else []
    )
    graph = kg.build_kg(clusters, mentions, persons, subevents)
    payload = kg.serialize_ntriples(graph)
    (out_dir / KG_FILE).write_bytes(payload)
    print(f"emit: {len(graph)} triples -> {out_dir / KG_FILE}", file=sys.stderr)


def cmd_stats(cfg: PipelineConfig, out_dir: Path, args: argparse.Namespace) -> None:
    mentions = _load_mentions(out_dir)
    clusters = _load_clusters(out_dir)
    rows, total = kg.compute_stats(clusters, mentions)
    table = kg.stats_to_tsv(rows, total)
    with open(out_dir / STATS_FILE, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table)
    sys.stdout.write(table)
    print(f"stats: {len(rows)} languages -> {out_dir / STATS_FILE}", file=sys.stderr)


def cmd_eval(cfg: PipelineConfig, out_dir: Path, args: argparse.Namespace) -> None:
    pages = _event_pages(_load_pages(out_dir))
    if cfg.gold_records:
        gold = evaluation.load_gold_records(cfg.gold_records)
    else:
        snapshot = evaluation.load_gold_snapshot(_require(cfg, "gold_snapshot"))
        gold = evaluation.generate_testset(pages, snapshot)
    lexicon = resolver.load_trigger_lexicon(_require(cfg, "trigger_lexicon"))
    graph, mapping = _load_graph_and_mapping(cfg)
    templates = _load_templates(cfg)
    scorer = _build_scorer(cfg, templates)
    predictions = evaluation.build_predictions(
        pages,
        lexicon,
        graph,
        mapping,
        scorer,
        templates,
        max_depth=cfg.max_depth,
        score_floor=cfg.score_floor,
        method=cfg.method,
        scope=cfg.question_scope,
    )
    report = evaluation.evaluate(
        predictions,
        gold,
        graph=graph,
        strict=cfg.strict_eval,
        max_depth=cfg.max_depth,
        method=cfg.method,
    )
    with open(out_dir / EVAL_FILE, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(evaluation.report_to_tsv(report))
    print(evaluation.report_summary(report))
    print(
        f"eval: {len(gold)} gold records, {len(predictions)} predictions "
        f"-> {out_dir / EVAL_FILE}",
        file=sys.stderr,
    )


COMMANDS = {
    "ingest": cmd_ingest,
    "quotes": cmd_quotes,
    "align": cmd_align,
    "resolve": cmd_resolve,
    "emit": cmd_emit,
    "stats": cmd_stats,
    "eval": cmd_eval,
}


class _Parser(argparse.ArgumentParser):
    # Usage errors must exit 1 like every other validation failure.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ekf", description="Quote and event knowledge graph pipeline.")

    def add_shared(target: argparse.ArgumentParser, default_config, default_jobs) -> None:
        target.add_argument("-c", "--config", default=default_config, help="TOML config file")
        target.add_argument(
            "--jobs", type=int, default=default_jobs, help="worker processes for batch stages"
        )

    add_shared(parser, "ekf.toml", os.cpu_count() or 1)
    sub = parser.add_subparsers(dest="command", required=True, metavar="stage")
    for name, handler in COMMANDS.items():
        stage = sub.add_parser(name, help=handler.__doc__)
        # The shared flags are valid after the stage name too; SUPPRESS keeps
        # the stage parser from clobbering values given before it.
        add_shared(stage, argparse.SUPPRESS, argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = load_config(args.config)
        out_dir = resolve_output_dir(cfg)
        COMMANDS[args.command](cfg, out_dir, args)
    except (ConfigError, wiki_ingest.CorpusError, ontology.TaxonomyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
