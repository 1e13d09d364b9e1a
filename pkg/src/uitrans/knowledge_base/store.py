"""UI mapping table and ArkUI documentation corpus, with BM25 + rerank retrieval."""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import jsonschema

from ..errors import SchemaViolation
from .bm25 import BM25Index, tokenize

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
RERANK_POOL = 10
TOP_K = 3
DEFAULT_WEIGHTS = (0.5, 0.3, 0.2)  # exact tag, description Jaccard, normalized BM25

_ATTRIBUTE_RULE = {
    "type": "object",
    "required": ["android_attr", "arkui", "transform"],
    "properties": {
        "android_attr": {"type": "string", "minLength": 1},
        "arkui": {"type": "string"},
        "transform": {"type": "string", "minLength": 1},
    },
    "additionalProperties": False,
}

MAPPING_SCHEMA = {
    "type": "object",
    "required": ["entry_id", "source_tag", "target_component", "description",
                 "source_example", "target_example", "attribute_map", "provenance"],
    "properties": {
        "entry_id": {"type": "string", "minLength": 1},
        "source_tag": {"type": "string", "minLength": 1},
        "target_component": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "source_example": {"type": "string"},
        "target_example": {"type": "string"},
        "attribute_map": {"type": "array", "items": _ATTRIBUTE_RULE},
        "provenance": {"enum": ["seeded", "learned"]},
        "condition": {
            "type": ["object", "null"],
            "required": ["attribute", "equals"],
            "properties": {
                "attribute": {"type": "string"},
                "equals": {"type": "string"},
                "or_absent": {"type": "boolean"},
            },
        },
        "default_args": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "additionalProperties": False,
}

DOC_SCHEMA = {
    "type": "object",
    "required": ["doc_id", "component_name", "functional_description", "attributes", "usage_example"],
    "properties": {
        "doc_id": {"type": "string", "minLength": 1},
        "component_name": {"type": "string", "minLength": 1},
        "functional_description": {"type": "string"},
        "attributes": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 3, "maxItems": 3},
        },
        "usage_example": {"type": "string"},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class AttributeRule:
    android_attr: str
    arkui: str        # chain method, "@arg" (positional ctor arg) or "@arg.<key>" (ctor object key)
    transform: str    # identity | strip_unit | color_hex | resource_ref | size | number | enum:<name> | ...


@dataclass
class MappingEntry:
    entry_id: str
    source_tag: str
    target_component: str
    description: str = ""
    source_example: str = ""
    target_example: str = ""
    attribute_map: list[AttributeRule] = field(default_factory=list)
    provenance: str = "seeded"
    condition: dict | None = None
    default_args: dict[str, str] = field(default_factory=dict)

    def rule_for(self, attr: str) -> AttributeRule | None:
        return next((r for r in self.attribute_map if r.android_attr == attr), None)

    def matches(self, attributes: dict[str, str]) -> bool:
        if not self.condition:
            return True
        attr = self.condition["attribute"]
        if attr not in attributes:
            return bool(self.condition.get("or_absent"))
        return attributes[attr] == self.condition["equals"]

    def index_text(self) -> str:
        attrs = " ".join(r.android_attr for r in self.attribute_map)
        return f"{self.source_tag} {self.target_component} {self.description} {attrs}"

    def to_dict(self) -> dict:
        d = {
            "entry_id": self.entry_id,
            "source_tag": self.source_tag,
            "target_component": self.target_component,
            "description": self.description,
            "source_example": self.source_example,
            "target_example": self.target_example,
            "attribute_map": [{"android_attr": r.android_attr, "arkui": r.arkui, "transform": r.transform}
                              for r in self.attribute_map],
            "provenance": self.provenance,
        }
        if self.condition:
            d["condition"] = dict(self.condition)
        if self.default_args:
            d["default_args"] = dict(self.default_args)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> MappingEntry:
        return cls(
            entry_id=d["entry_id"], source_tag=d["source_tag"], target_component=d["target_component"],
            description=d["description"], source_example=d["source_example"],
            target_example=d["target_example"],
            attribute_map=[AttributeRule(**r) for r in d["attribute_map"]],
            provenance=d["provenance"], condition=d.get("condition"),
            default_args=dict(d.get("default_args") or {}),
        )


@dataclass
class DocEntry:
    doc_id: str
    component_name: str
    functional_description: str = ""
    attributes: list[tuple[str, str, str]] = field(default_factory=list)
    usage_example: str = ""

    def index_text(self) -> str:
        attrs = " ".join(a[0] for a in self.attributes)
        return f"{self.component_name} {self.functional_description} {attrs}"

    def to_dict(self) -> dict:
        return {"doc_id": self.doc_id, "component_name": self.component_name,
                "functional_description": self.functional_description,
                "attributes": [list(a) for a in self.attributes], "usage_example": self.usage_example}

    @classmethod
    def from_dict(cls, d: dict) -> DocEntry:
        return cls(d["doc_id"], d["component_name"], d["functional_description"],
                   [tuple(a) for a in d["attributes"]], d["usage_example"])


@dataclass(frozen=True)
class Hit:
    id: str
    bm25_score: float
    rerank_score: float


@dataclass
class RetrievalResult:
    hits: list[Hit] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.hits)

    def ids(self) -> list[str]:
        return [h.id for h in self.hits]


class EmbeddingBackend(Protocol):
    """Optional dense retrieval. Absent by default; retrieval is then BM25 only."""

    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


@dataclass
class DomainKnowledge:
    query: str
    mapping_hits: list[tuple[MappingEntry, Hit]] = field(default_factory=list)
    doc_hits: list[tuple[DocEntry, Hit]] = field(default_factory=list)
    resolved: bool = False
    nested: dict[str, list[MappingEntry]] = field(default_factory=dict)
    lexicon: list[AttributeRule] = field(default_factory=list)  # inference path only

    def best_entry(self, tag: str, attributes: dict[str, str]) -> MappingEntry | None:
        """Highest-ranked hit for ``tag`` whose condition matches the node."""
        for entry, _ in self.mapping_hits:
            if entry.source_tag == tag and entry.matches(attributes):
                return entry
        return None

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "resolved": self.resolved,
            "mapping_hits": [{"entry": e.to_dict(), "bm25": h.bm25_score, "rerank": h.rerank_score}
                             for e, h in self.mapping_hits],
            "doc_hits": [{"doc": d.to_dict(), "bm25": h.bm25_score, "rerank": h.rerank_score}
                         for d, h in self.doc_hits],
            "nested": {tag: [e.to_dict() for e in entries] for tag, entries in self.nested.items()},
            "lexicon": [[r.android_attr, r.arkui, r.transform] for r in self.lexicon],
        }

    @classmethod
    def from_dict(cls, d: dict) -> DomainKnowledge:
        return cls(
            query=d["query"],
            mapping_hits=[(MappingEntry.from_dict(x["entry"]), Hit(x["entry"]["entry_id"], x["bm25"], x["rerank"]))
                          for x in d["mapping_hits"]],
            doc_hits=[(DocEntry.from_dict(x["doc"]), Hit(x["doc"]["doc_id"], x["bm25"], x["rerank"]))
                      for x in d["doc_hits"]],
            resolved=d["resolved"],
            nested={t: [MappingEntry.from_dict(e) for e in es] for t, es in d.get("nested", {}).items()},
            lexicon=[AttributeRule(*r) for r in d.get("lexicon", [])],
        )


class KnowledgeBase:
    def __init__(self, mappings: list[MappingEntry] = (), docs: list[DocEntry] = (),
                 weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
                 embedding: EmbeddingBackend | None = None):
        self.mappings: dict[str, MappingEntry] = {}
        self.docs: dict[str, DocEntry] = {}
        self.mapping_index = BM25Index()
        self.doc_index = BM25Index()
        self.weights = weights
        self.embedding = embedding
        self._vectors: dict[str, dict[str, list[float]]] = {}
        for e in mappings:
            self._add_mapping(e)
        for d in docs:
            self.docs[d.doc_id] = d
            self.doc_index.add(d.doc_id, tokenize(d.index_text()))

    def _add_mapping(self, entry: MappingEntry) -> None:
        self.mappings[entry.entry_id] = entry
        self.mapping_index.add(entry.entry_id, tokenize(entry.index_text()))
        self._vectors.pop("mapping", None)

    def find_pair(self, source_tag: str, target_component: str) -> MappingEntry | None:
        return next((e for e in self.mappings.values()
                     if e.source_tag == source_tag and e.target_component == target_component), None)

    def entries_for_tag(self, tag: str) -> list[MappingEntry]:
        return [e for e in self.mappings.values() if e.source_tag == tag]

    def store(self, name: str) -> tuple[dict, BM25Index]:
        if name == "mapping":
            return self.mappings, self.mapping_index
        if name == "docs":
            return self.docs, self.doc_index
        raise ValueError(f"unknown store {name!r}")

    def dense_rank(self, query: str, store: str, k: int) -> list[tuple[str, float]]:
        if self.embedding is None:
            return []
        items, _ = self.store(store)
        if not items:
            return []
        if store not in self._vectors:
            ids = list(items)
            vecs = self.embedding.embed([items[i].index_text() for i in ids])
            self._vectors[store] = dict(zip(ids, vecs))
        (qv,) = self.embedding.embed([query])
        scored = [(i, _cosine(qv, v)) for i, v in self._vectors[store].items()]
        return sorted(scored, key=lambda kv: (-kv[1], kv[0]))[:k]


def _cosine(a: Sequence[float], b: Sequence[float]) -> float:
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0 or nb == 0:
        return 0.0
    return sum(x * y for x, y in zip(a, b)) / (na * nb)


# -- loading -----------------------------------------------------------------

def _read_items(path: str | Path, key: str) -> list:
    path = str(path)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation(path, f"line {exc.lineno}", exc.msg) from None
    if isinstance(data, list):
        return data
    if not isinstance(data, dict):
        raise SchemaViolation(path, "$", "expected an array or an object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaViolation(path, "schema_version", f"expected {SCHEMA_VERSION}, got {data.get('schema_version')!r}")
    items = data.get(key)
    if not isinstance(items, list):
        raise SchemaViolation(path, key, "missing or not an array")
    return items


def _validate(items: list, schema: dict, path: str, id_field: str) -> None:
    seen: set[str] = set()
    for i, item in enumerate(items):
        try:
            jsonschema.validate(item, schema)
        except jsonschema.ValidationError as exc:
            parts = [str(p) for p in exc.absolute_path]
            if exc.validator == "required":
                parts.append(exc.message.split("'")[1])
            raise SchemaViolation(path, f"[{i}]" + "".join(f"/{p}" for p in parts), exc.message) from None
        ident = item[id_field]
        if ident in seen:
            raise SchemaViolation(path, f"[{i}]/{id_field}", f"duplicate {id_field} {ident!r}")
        seen.add(ident)


def load_mapping_table(path: str | Path) -> list[MappingEntry]:
    items = _read_items(path, "entries")
    _validate(items, MAPPING_SCHEMA, str(path), "entry_id")
    entries = [MappingEntry.from_dict(d) for d in items]
    pairs: set[tuple[str, str]] = set()
    for i, e in enumerate(entries):
        if (e.source_tag, e.target_component) in pairs:
            raise SchemaViolation(str(path), f"[{i}]/target_component",
                                  f"duplicate mapping {e.source_tag} -> {e.target_component}")
        pairs.add((e.source_tag, e.target_component))
    return entries


def load_corpus(path: str | Path) -> list[DocEntry]:
    items = _read_items(path, "docs")
    _validate(items, DOC_SCHEMA, str(path), "doc_id")
    return [DocEntry.from_dict(d) for d in items]


def load_stores(mapping_path: str | Path, corpus_path: str | Path, **kwargs) -> KnowledgeBase:
    return KnowledgeBase(load_mapping_table(mapping_path), load_corpus(corpus_path), **kwargs)


def write_mapping_table(entries: list[MappingEntry], path: str | Path) -> None:
    """Write the table atomically: temp file in the same directory, fsync, rename."""
    path = Path(path)
    text = json.dumps({"schema_version": SCHEMA_VERSION, "entries": [e.to_dict() for e in entries]},
                      indent=2, ensure_ascii=False) + "\n"
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- retrieval ---------------------------------------------------------------

def bm25_rank(query: str, kb: KnowledgeBase, k: int = RERANK_POOL, store: str = "mapping") -> list[tuple[str, float]]:
    _, index = kb.store(store)
    return index.rank(query, k)


def jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def rerank(query: str, candidates: list[tuple[str, float]], kb: KnowledgeBase,
           store: str = "mapping", tag: str | None = None, k: int = TOP_K) -> RetrievalResult:
    """Reorder a candidate pool and keep the top ``k``.

    score = w_tag * [candidate tag == queried tag] + w_jac * Jaccard(query, description)
            + w_bm25 * bm25 / max(bm25 in pool)

    The queried tag defaults to the first whitespace-separated word of the
    query. Ties go to exact-tag candidates, then to the lower id.
    """
    if not candidates:
        return RetrievalResult([])
    items, _ = kb.store(store)
    if tag is None:
        tag = query.split()[0] if query.split() else ""
    w_tag, w_jac, w_bm = kb.weights
    q_tokens = set(tokenize(query))
    top_bm25 = max(score for _, score in candidates)
    scored = []
    for cid, bm in candidates:
        item = items[cid]
        if store == "mapping":
            exact = 1.0 if item.source_tag == tag else 0.0
            desc = item.description
        else:
            exact = 1.0 if item.component_name == tag else 0.0
            desc = item.functional_description
        norm = bm / top_bm25 if top_bm25 > 0 else 0.0
        score = w_tag * exact + w_jac * jaccard(q_tokens, set(tokenize(desc))) + w_bm * norm
        scored.append((score, exact, cid, bm))
    scored.sort(key=lambda t: (-t[0], -t[1], t[2]))
    return RetrievalResult([Hit(cid, bm, score) for score, _, cid, bm in scored[:k]])


def retrieve(query: str, kb: KnowledgeBase, store: str = "mapping", tag: str | None = None,
             pool: int = RERANK_POOL, k: int = TOP_K, extra: list[str] = ()) -> RetrievalResult:
    """BM25 top-``pool`` (plus any dense and ``extra`` candidates), then rerank to top ``k``."""
    candidates = dict(bm25_rank(query, kb, pool, store)) if query.strip() else {}
    _, index = kb.store(store)
    tokens = tokenize(query)
    for cid, _ in kb.dense_rank(query, store, pool):
        candidates.setdefault(cid, index.score_doc(tokens, cid))
    for cid in extra:
        candidates.setdefault(cid, index.score_doc(tokens, cid))
    return rerank(query, sorted(candidates.items(), key=lambda kv: (-kv[1], kv[0])), kb, store, tag, k)


def build_query(unit) -> str:
    desc = unit.description
    parts = [unit.tag]
    if desc is not None:
        parts.append(desc.purpose)
        parts.extend(name for name, _ in desc.salient_attributes)
    return " ".join(p for p in parts if p)


def query_mapping(unit, kb: KnowledgeBase) -> DomainKnowledge:
    """Collect domain knowledge for one translation unit.

    Exact-tag table entries always join the rerank pool. Unresolved units
    additionally get up to three documentation hits for the inference path.
    """
    query = build_query(unit)
    exact = [e.entry_id for e in kb.entries_for_tag(unit.tag)]
    result = retrieve(query, kb, "mapping", tag=unit.tag, extra=exact)
    knowledge = DomainKnowledge(query, [(kb.mappings[h.id], h) for h in result.hits])
    knowledge.resolved = any(e.source_tag == unit.tag for e, _ in knowledge.mapping_hits)
    if not knowledge.resolved:
        docs = retrieve(query, kb, "docs", tag=unit.tag)
        knowledge.doc_hits = [(kb.docs[h.id], h) for h in docs.hits]
        knowledge.lexicon = attribute_lexicon(kb)
    for node in list(unit.root.walk())[1:]:
        if node.tag not in knowledge.nested:
            knowledge.nested[node.tag] = kb.entries_for_tag(node.tag)
    return knowledge


def attribute_lexicon(kb: KnowledgeBase) -> list[AttributeRule]:
    """Chain-call rules shared across the table, for translating unmapped components.

    Constructor-argument and consumed rules are component specific and left
    out. When entries disagree on an attribute the most common rule wins,
    then the first seen.
    """
    counts: dict[str, dict[AttributeRule, int]] = {}
    for entry in kb.mappings.values():
        for rule in entry.attribute_map:
            if rule.arkui.startswith("@arg") or rule.transform == "consumed":
                continue
            counts.setdefault(rule.android_attr, {}).setdefault(rule, 0)
            counts[rule.android_attr][rule] += 1
    lexicon = []
    for attr, rules in counts.items():
        best = max(rules.items(), key=lambda kv: kv[1])  # max keeps the first of equal counts
        lexicon.append(best[0])
    return lexicon


def enrich(entry: MappingEntry, kb: KnowledgeBase, table_path: str | Path | None) -> bool:
    """Insert a learned entry and persist the table; returns False for duplicates."""
    if entry.provenance != "learned":
        raise ValueError("only learned entries can be enriched")
    if kb.find_pair(entry.source_tag, entry.target_component) is not None:
        log.info("DuplicateEntry: %s -> %s already mapped", entry.source_tag, entry.target_component)
        return False
    base_id, n = entry.entry_id, 2
    while entry.entry_id in kb.mappings:
        entry.entry_id = f"{base_id}-{n}"
        n += 1
    kb._add_mapping(entry)
    if table_path is not None:
        try:
            write_mapping_table(list(kb.mappings.values()), table_path)
        except BaseException:
            _rollback(kb, entry.entry_id)
            raise
    return True


def _rollback(kb: KnowledgeBase, entry_id: str) -> None:
    entries = [e for e in kb.mappings.values() if e.entry_id != entry_id]
    kb.mappings = {}
    kb.mapping_index = BM25Index(kb.mapping_index.k1, kb.mapping_index.b)
    for e in entries:
        kb._add_mapping(e)
