"""Sentence-level evidence selection by embedding similarity.

Retrieved documents are split into sentences; each sentence is embedded
together with the query that retrieved the document (the claim for the
positive pass, the negation for the negative pass) and the most similar
sentences per document survive.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Protocol, Sequence

import numpy as np

from ._http import JsonHttpClient
from .errors import ConfigurationError, ProviderUnavailable, SelectionFailed, ZeroVector
from .sources import RetrievedDocument
from .types import PipelineConfig, SourceKind, normalize_sentence

log = logging.getLogger(__name__)

ENV_EMBED_URL = "EMBED_API_URL"
ENV_EMBED_KEY = "EMBED_API_KEY"

_TERMINATORS = ".!?"
_MIN_SENTENCE_CHARS = 3


class Polarity(Enum):
    """Which query surfaced a piece of evidence."""

    FROM_CLAIM = "claim"
    FROM_NEGATION = "negation"


@dataclass(frozen=True)
class EvidenceSentence:
    """A candidate evidence sentence with provenance and similarity.

    normalized is always recomputed from text, and similarity is clamped
    to [-1, 1] (values outside by more than 1e-9 are rejected).
    """

    text: str
    source: SourceKind
    doc_id: str
    polarity: Polarity
    similarity: float
    normalized: str = field(init=False, default="")

    def __post_init__(self):
        object.__setattr__(self, "normalized", normalize_sentence(self.text))
        sim = float(self.similarity)
        if sim < -1.0 - 1e-9 or sim > 1.0 + 1e-9:
            raise ValueError(f"similarity {sim} outside [-1, 1]")
        object.__setattr__(self, "similarity", min(1.0, max(-1.0, sim)))

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "normalized": self.normalized,
            "source": self.source.name,
            "doc_id": self.doc_id,
            "polarity": self.polarity.value,
            "similarity": self.similarity,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvidenceSentence":
        return cls(
            text=data["text"],
            source=SourceKind(data["source"]),
            doc_id=data["doc_id"],
            polarity=Polarity(data["polarity"]),
            similarity=data["similarity"],
        )


def split_sentences(body: str) -> list[str]:
    """Split text on . ! ? followed by whitespace or end of text.

    A period directly after a lone capital letter (an initial such as
    "J.") never splits.  Segments shorter than 3 characters after
    trimming are dropped.
    """
    sentences: list[str] = []
    start = 0
    n = len(body)
    for i, ch in enumerate(body):
        if ch not in _TERMINATORS:
            continue
        if i + 1 < n and not body[i + 1].isspace():
            continue
        if ch == "." and _is_initial(body, i):
            continue
        segment = body[start : i + 1].strip()
        if len(segment) >= _MIN_SENTENCE_CHARS:
            sentences.append(segment)
        start = i + 1
    tail = body[start:].strip()
    if len(tail) >= _MIN_SENTENCE_CHARS:
        sentences.append(tail)
    return sentences


def _is_initial(text: str, period_pos: int) -> bool:
    if period_pos == 0:
        return False
    prev = text[period_pos - 1]
    if not (prev.isalpha() and prev.isupper()):
        return False
    return period_pos < 2 or not text[period_pos - 2].isalnum()


def cosine_similarity(u, v) -> float:
    """u.v / (|u||v|); raises ZeroVector when either norm is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.dot(u, v) / (norm_u * norm_v))


class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


class HashedBowEmbedder:
    """Deterministic offline embedder: hashed bag-of-words counts.

    Tokens come from normalize_sentence; each token is hashed with a
    stable 64-bit digest into one of `dim` buckets and counted.  Two
    token-identical texts therefore embed identically (cosine 1.0), and
    lexical overlap translates directly into similarity.
    """

    def __init__(self, dim: int = 256):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim

    def _bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        vectors = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            for token in normalize_sentence(text).split():
                vectors[row, self._bucket(token)] += 1.0
        return vectors


class FixtureEmbedder:
    """Fixture-backed embedder: exact vectors per text."""

    def __init__(self, vectors: Mapping[str, Sequence[float]]):
        self._vectors = {text: np.asarray(vec, dtype=np.float64) for text, vec in vectors.items()}
        dims = {vec.shape for vec in self._vectors.values()}
        if len(dims) > 1:
            raise ValueError("fixture vectors must share one dimension")

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        try:
            return np.stack([self._vectors[text] for text in texts])
        except KeyError as exc:
            raise ProviderUnavailable(f"no fixture vector for {exc.args[0]!r}") from exc


class RemoteEmbedder:
    """HTTP embedding endpoint: request a list of strings, receive float arrays."""

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        *,
        client: JsonHttpClient | None = None,
    ):
        url = url or os.environ.get(ENV_EMBED_URL)
        if not url:
            raise ConfigurationError(f"remote embedding needs {ENV_EMBED_URL}")
        self._client = client or JsonHttpClient(url, api_key or os.environ.get(ENV_EMBED_KEY))

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        data = self._client.post({"input": list(texts)})
        try:
            vectors = data["embeddings"] if "embeddings" in data else data["data"]
        except (KeyError, TypeError) as exc:
            raise ProviderUnavailable(f"unexpected embedding payload: {exc}") from exc
        return np.asarray(vectors, dtype=np.float64)


def select_evidence(
    query_text: str,
    docs: Sequence[RetrievedDocument],
    embedder: EmbeddingProvider,
    cfg: PipelineConfig,
    polarity: Polarity = Polarity.FROM_CLAIM,
) -> list[EvidenceSentence]:
    """Keep the most query-similar sentences from the first selection_docs docs.

    Per document, all sentences are embedded alongside the query and the
    sentences_per_doc highest-similarity ones survive; ties prefer the
    earlier sentence.  Documents whose embedding fails are skipped (as
    SelectionFailed) while the others proceed; zero-vector sentences are
    skipped rather than scored.
    """
    selected: list[EvidenceSentence] = []
    for doc in docs[: cfg.selection_docs]:
        sentences = split_sentences(doc.body)
        if not sentences:
            continue
        try:
            vectors = embedder.embed([query_text] + sentences)
        except Exception as exc:  # provider-specific failures must not kill the stage
            failure = SelectionFailed(f"embedding failed for doc {doc.doc_id!r}: {exc}")
            log.warning("%s", failure)
            continue
        query_vec = vectors[0]
        scored: list[tuple[float, int, str]] = []
        for position, (sentence, vector) in enumerate(zip(sentences, vectors[1:])):
            try:
                sim = cosine_similarity(query_vec, vector)
            except ZeroVector:
                continue
            scored.append((sim, position, sentence))
        scored.sort(key=lambda item: (-item[0], item[1]))
        for sim, _, sentence in scored[: cfg.sentences_per_doc]:
            selected.append(
                EvidenceSentence(
                    text=sentence,
                    source=doc.source,
                    doc_id=doc.doc_id,
                    polarity=polarity,
                    similarity=sim,
                )
            )
    return selected
