"""Tokenizer and Okapi BM25 inverted index."""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Iterable

K1 = 1.2
B = 0.75

_WORD = re.compile(r"[^\W_]+")
_CAMEL = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+|[^\W\d_A-Za-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumerics and camelCase boundaries.

    >>> tokenize("android:layout_width TextView HTMLParser2")
    ['android', 'layout', 'width', 'text', 'view', 'html', 'parser', '2']
    """
    tokens: list[str] = []
    for word in _WORD.findall(text):
        tokens.extend(t.lower() for t in _CAMEL.findall(word))
    return tokens


class BM25Index:
    """Inverted index over tokenized documents.

    idf uses the non-negative form ``ln((N - df + 0.5) / (df + 0.5) + 1)``.
    Query terms are deduplicated before scoring.
    """

    def __init__(self, k1: float = K1, b: float = B):
        self.k1 = k1
        self.b = b
        self.postings: dict[str, dict[str, int]] = {}
        self.doc_len: dict[str, int] = {}
        self._total_len = 0

    def __len__(self) -> int:
        return len(self.doc_len)

    @property
    def vocabulary(self) -> set[str]:
        return set(self.postings)

    @property
    def avgdl(self) -> float:
        return self._total_len / len(self.doc_len) if self.doc_len else 0.0

    def add(self, doc_id: str, tokens: Iterable[str]) -> None:
        if doc_id in self.doc_len:
            raise KeyError(f"document {doc_id!r} already indexed")
        counts = Counter(tokens)
        length = sum(counts.values())
        self.doc_len[doc_id] = length
        self._total_len += length
        for term, tf in counts.items():
            self.postings.setdefault(term, {})[doc_id] = tf

    def idf(self, term: str) -> float:
        n = len(self.postings.get(term, ()))
        N = len(self.doc_len)
        return math.log((N - n + 0.5) / (n + 0.5) + 1.0)

    def scores(self, query_tokens: Iterable[str]) -> dict[str, float]:
        avgdl = self.avgdl
        out: dict[str, float] = {}
        for term in dict.fromkeys(query_tokens):
            posting = self.postings.get(term)
            if not posting:
                continue
            idf = self.idf(term)
            for doc_id, tf in posting.items():
                norm = 1.0 - self.b + self.b * self.doc_len[doc_id] / avgdl if avgdl else 1.0
                out[doc_id] = out.get(doc_id, 0.0) + idf * tf * (self.k1 + 1.0) / (tf + self.k1 * norm)
        return out

    def score_doc(self, query_tokens: Iterable[str], doc_id: str) -> float:
        return self.scores(query_tokens).get(doc_id, 0.0)

    def rank(self, query: str, k: int) -> list[tuple[str, float]]:
        if k < 1:
            raise ValueError("k must be >= 1")
        scored = self.scores(tokenize(query))
        return sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
