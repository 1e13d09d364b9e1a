"""Mapping table, ArkUI documentation corpus and retrieval."""

from pathlib import Path

from .bm25 import B, K1, BM25Index, tokenize
from .store import (
    AttributeRule,
    DocEntry,
    DomainKnowledge,
    EmbeddingBackend,
    Hit,
    KnowledgeBase,
    MappingEntry,
    RetrievalResult,
    attribute_lexicon,
    bm25_rank,
    enrich,
    load_corpus,
    load_mapping_table,
    load_stores,
    query_mapping,
    rerank,
    retrieve,
    write_mapping_table,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
SEED_MAPPING_PATH = DATA_DIR / "mapping_table.json"
SEED_CORPUS_PATH = DATA_DIR / "arkui_corpus.json"


def load_seed() -> KnowledgeBase:
    return load_stores(SEED_MAPPING_PATH, SEED_CORPUS_PATH)
