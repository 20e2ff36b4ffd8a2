"""Okapi-style BM25 scoring over normalized tokens.

score(q, d) = sum over query terms t of
    idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))
with idf(t) = ln(1 + (N + 0.5) / (df + 0.5)), k1 = 1.2, b = 0.75.

The idf form is pinned by the package's reference value for a
single-document corpus: query "cat" against the one document "cat"
scores exactly ln 2 = 0.6931...  Terms absent from a document
contribute 0 via tf = 0; the idf is positive for every term, so a
document scores above zero iff it contains at least one query term.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .types import normalize_sentence

K1 = 1.2
B = 0.75


def tokenize(text: str) -> list[str]:
    """Indexing tokenization: normalize_sentence then split on spaces."""
    normalized = normalize_sentence(text)
    return normalized.split() if normalized else []


@dataclass(frozen=True)
class CorpusStats:
    """Per-corpus statistics required by the scoring formula."""

    doc_count: int
    avg_doc_length: float
    doc_frequencies: Mapping[str, int]

    def df(self, term: str) -> int:
        return self.doc_frequencies.get(term, 0)


def idf(term: str, stats: CorpusStats) -> float:
    return math.log(1.0 + (stats.doc_count + 0.5) / (stats.df(term) + 0.5))


def bm25_score(
    query_terms: Sequence[str],
    doc_tokens: Sequence[str],
    stats: CorpusStats,
    k1: float = K1,
    b: float = B,
) -> float:
    """Score one document (as a token sequence) against the query terms."""
    doc_length = len(doc_tokens)
    counts = Counter(doc_tokens)
    if stats.avg_doc_length > 0:
        length_norm = 1.0 - b + b * doc_length / stats.avg_doc_length
    else:
        length_norm = 1.0
    score = 0.0
    for term in query_terms:
        tf = counts.get(term, 0)
        if tf == 0:
            continue
        score += idf(term, stats) * tf * (k1 + 1.0) / (tf + k1 * length_norm)
    return score
