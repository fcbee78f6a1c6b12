"""Batch toolkit for building a quote- and event-centric knowledge graph
from wiki-markup corpora.

Pipeline stages: ingest wikitext, extract quote mentions per person,
cluster mentions across languages by embedding similarity, resolve event
sentences to ontology subclasses, emit RDF N-Triples with corpus
statistics, and evaluate against a gold snapshot.
"""

from .alignment import AlignmentConfig, QuoteCluster, cluster_corpus, cluster_person
from .embedding import (
    EmbeddingLookupError,
    EmbeddingVector,
    cosine,
    file_provider,
    hash_provider,
)
from .evaluation import EvalReport, GoldRecord, Prediction, evaluate, generate_testset
from .kg import LanguageStats, TripleSet, build_kg, compute_stats, parse_ntriples, serialize_ntriples
from .ontology import ClassGraph, TypeMapping, load_class_graph, load_type_mapping, subclass_closure
from .quote_extract import Mention, PersonId, extract_mentions, group_persons
from .resolver import EventMention, SubEventNode, resolve, resolve_direct_baseline
from .wiki_ingest import CorpusError, WikiPage, load_corpus, parse_wikitext

__all__ = [
    "AlignmentConfig",
    "ClassGraph",
    "CorpusError",
    "EmbeddingLookupError",
    "EmbeddingVector",
    "EvalReport",
    "EventMention",
    "GoldRecord",
    "LanguageStats",
    "Mention",
    "PersonId",
    "Prediction",
    "QuoteCluster",
    "SubEventNode",
    "TripleSet",
    "TypeMapping",
    "WikiPage",
    "build_kg",
    "cluster_corpus",
    "cluster_person",
    "compute_stats",
    "cosine",
    "evaluate",
    "extract_mentions",
    "file_provider",
    "generate_testset",
    "group_persons",
    "hash_provider",
    "load_class_graph",
    "load_corpus",
    "load_type_mapping",
    "parse_ntriples",
    "parse_wikitext",
    "resolve",
    "resolve_direct_baseline",
    "serialize_ntriples",
    "subclass_closure",
]

__version__ = "0.1.0"
