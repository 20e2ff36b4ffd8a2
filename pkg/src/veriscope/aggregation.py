"""Evidence deduplication, segment merging, ranking, and cross-source union.

The positive and negative evidence sets for one source are combined by
symmetric difference on normalized text: a sentence surfaced by both the
claim and its negation is dropped entirely.  Survivors are fused where a
source split one sentence across segments, re-ranked against the
original claim, truncated to the per-source budget, and finally unioned
across sources into the evidence set handed to the verifier.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import RankingFailed, ZeroVector
from .selection import EmbeddingProvider, EvidenceSentence, Polarity, cosine_similarity
from .types import SourceKind, source_order_key

log = logging.getLogger(__name__)

SEGMENT_MARKER = "[SEP]"
_TERMINAL_PUNCTUATION = (".", "!", "?")


@dataclass(frozen=True)
class EvidenceBundle:
    """Per-claim, per-source staged evidence sets.

    positive/negative are the selection outputs for the claim and its
    negation; candidates is the deduplicated+merged pool; final is the
    ranked, truncated evidence actually used for the verdict.
    """

    claim_id: str
    source: SourceKind
    positive: tuple[EvidenceSentence, ...] = ()
    negative: tuple[EvidenceSentence, ...] = ()
    candidates: tuple[EvidenceSentence, ...] = ()
    final: tuple[EvidenceSentence, ...] = ()

    def __post_init__(self):
        for name in ("positive", "negative", "candidates", "final"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "source": self.source.name,
            "positive": [s.to_dict() for s in self.positive],
            "negative": [s.to_dict() for s in self.negative],
            "candidates": [s.to_dict() for s in self.candidates],
            "final": [s.to_dict() for s in self.final],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvidenceBundle":
        return cls(
            claim_id=data["claim_id"],
            source=SourceKind(data["source"]),
            positive=tuple(EvidenceSentence.from_dict(d) for d in data["positive"]),
            negative=tuple(EvidenceSentence.from_dict(d) for d in data["negative"]),
            candidates=tuple(EvidenceSentence.from_dict(d) for d in data["candidates"]),
            final=tuple(EvidenceSentence.from_dict(d) for d in data["final"]),
        )


@dataclass(frozen=True)
class AggregatedEvidence:
    """The cross-source evidence union fed to the verifier, with provenance."""

    claim_id: str
    sentences: tuple[EvidenceSentence, ...]
    per_source: Mapping[SourceKind, EvidenceBundle]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        object.__setattr__(self, "per_source", dict(self.per_source))

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "sentences": [s.to_dict() for s in self.sentences],
            "per_source": {
                kind.name: bundle.to_dict()
                for kind, bundle in sorted(self.per_source.items(), key=lambda kv: source_order_key(kv[0]))
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AggregatedEvidence":
        return cls(
            claim_id=data["claim_id"],
            sentences=tuple(EvidenceSentence.from_dict(d) for d in data["sentences"]),
            per_source={
                SourceKind(name): EvidenceBundle.from_dict(bundle)
                for name, bundle in data["per_source"].items()
            },
        )


def dedup_by_normalized(sentences: Iterable[EvidenceSentence]) -> list[EvidenceSentence]:
    """Collapse sentences sharing a normalized form to the first occurrence."""
    seen: set[str] = set()
    kept: list[EvidenceSentence] = []
    for sentence in sentences:
        if sentence.normalized in seen:
            continue
        seen.add(sentence.normalized)
        kept.append(sentence)
    return kept


def symmetric_difference_dedup(
    positive: Sequence[EvidenceSentence],
    negative: Sequence[EvidenceSentence],
) -> list[EvidenceSentence]:
    """Symmetric difference of the two evidence lists, keyed by normalized text.

    A normalized form present in both lists is dropped entirely; within
    each surviving side, duplicates collapse to the first occurrence.
    Output order: positives in original order, then negatives.
    """
    positive_keys = {s.normalized for s in positive}
    negative_keys = {s.normalized for s in negative}
    contested = positive_keys & negative_keys
    out: list[EvidenceSentence] = []
    seen: set[str] = set()
    for sentence in list(positive) + list(negative):
        key = sentence.normalized
        if key in contested or key in seen:
            continue
        seen.add(key)
        out.append(sentence)
    return out


def _joinable(left_text: str, right_text: str, dangling_merge: bool) -> bool:
    left = left_text.rstrip()
    right = right_text.lstrip()
    if left.endswith(SEGMENT_MARKER) or right.startswith(SEGMENT_MARKER):
        return True
    if not dangling_merge:
        return False
    return bool(left) and bool(right) and not left.endswith(_TERMINAL_PUNCTUATION) and right[:1].islower()


def _join_texts(left_text: str, right_text: str) -> str:
    left = left_text.rstrip()
    right = right_text.lstrip()
    if left.endswith(SEGMENT_MARKER):
        left = left[: -len(SEGMENT_MARKER)].rstrip()
    if right.startswith(SEGMENT_MARKER):
        right = right[len(SEGMENT_MARKER) :].lstrip()
    return f"{left} {right}"


def merge_segments(
    candidates: Sequence[EvidenceSentence],
    dangling_merge: bool = True,
) -> list[EvidenceSentence]:
    """Fuse adjacent same-document candidates that are fragments of one sentence.

    Fragments are joined when they carry an explicit segment marker
    ("[SEP]") or, with dangling_merge enabled, when the left piece lacks
    terminal punctuation and the right piece starts lowercase.  A fused
    sentence keeps the highest similarity among its parts.
    """
    merged: list[EvidenceSentence] = []
    for candidate in candidates:
        if merged:
            previous = merged[-1]
            if previous.doc_id == candidate.doc_id and _joinable(
                previous.text, candidate.text, dangling_merge
            ):
                merged[-1] = dataclasses.replace(
                    previous,
                    text=_join_texts(previous.text, candidate.text),
                    similarity=max(previous.similarity, candidate.similarity),
                )
                continue
        merged.append(candidate)
    return merged


def rank_and_truncate(
    candidates: Sequence[EvidenceSentence],
    claim_text: str,
    embedder: EmbeddingProvider,
    p: int,
) -> list[EvidenceSentence]:
    """Re-rank candidates by similarity to the original claim; keep the top p.

    Similarities are recomputed against the claim regardless of which
    query surfaced a candidate.  Ties prefer claim-derived evidence, then
    the earlier original position.  Zero-vector candidates are skipped;
    embedding failures raise RankingFailed.
    """
    if not candidates:
        return []
    try:
        vectors = embedder.embed([claim_text] + [c.text for c in candidates])
    except Exception as exc:
        raise RankingFailed(f"embedding failed while ranking: {exc}") from exc
    claim_vec = vectors[0]
    rescored: list[tuple[float, int, int, EvidenceSentence]] = []
    for position, (candidate, vector) in enumerate(zip(candidates, vectors[1:])):
        try:
            sim = cosine_similarity(claim_vec, vector)
        except ZeroVector as exc:
            if position == 0 and _norm_is_zero(claim_vec):
                raise RankingFailed("claim embedded to a zero vector") from exc
            continue
        polarity_rank = 0 if candidate.polarity is Polarity.FROM_CLAIM else 1
        rescored.append((sim, polarity_rank, position, candidate))
    rescored.sort(key=lambda item: (-item[0], item[1], item[2]))
    return [
        dataclasses.replace(candidate, similarity=sim)
        for sim, _, _, candidate in rescored[:p]
    ]


def _norm_is_zero(vector) -> bool:
    return float(np.linalg.norm(np.asarray(vector, dtype=np.float64))) == 0.0


def aggregate_sources(
    bundles: Mapping[SourceKind, EvidenceBundle],
    claim_id: str | None = None,
) -> AggregatedEvidence:
    """Union the per-source final evidence sets, deduplicated by normalized text.

    Sources are visited in the fixed order wikipedia, pubmed, web, then
    others by name; the first source contributing a normalized form wins
    provenance.
    """
    ids = {bundle.claim_id for bundle in bundles.values()}
    if len(ids) > 1:
        raise ValueError(f"bundles mix claim ids: {sorted(ids)}")
    if ids:
        inferred = next(iter(ids))
        if claim_id is not None and claim_id != inferred:
            raise ValueError(f"claim_id {claim_id!r} does not match bundles ({inferred!r})")
        claim_id = inferred
    if claim_id is None:
        raise ValueError("claim_id required when no bundles are given")

    sentences: list[EvidenceSentence] = []
    seen: set[str] = set()
    for kind in sorted(bundles, key=source_order_key):
        for sentence in bundles[kind].final:
            if sentence.normalized in seen:
                continue
            seen.add(sentence.normalized)
            sentences.append(sentence)
    return AggregatedEvidence(claim_id=claim_id, sentences=tuple(sentences), per_source=bundles)


def write_aggregated_jsonl(items: Iterable[AggregatedEvidence], path: Path) -> None:
    """Serialize aggregated evidence, one claim per line, with full provenance."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for item in items:
            handle.write(json.dumps(item.to_dict(), sort_keys=True) + "\n")


def read_aggregated_jsonl(path: Path) -> list[AggregatedEvidence]:
    path = Path(path)
    items = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                items.append(AggregatedEvidence.from_dict(json.loads(line)))
    return items
