"""Local inverted index: the offline stand-in for a hosted search cluster.

Documents come from JSONL files (one object per line with doc_id, title
and body).  Only the body is indexed; web-style adapters fold titles
into the body before they reach this layer.  The persisted layout is a
directory of manifest.json + postings.json + docs.jsonl, written with
sorted keys so identical corpora always produce identical bytes.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .bm25 import CorpusStats, bm25_score, tokenize
from .errors import EmptyCorpus, MalformedDocument

log = logging.getLogger(__name__)

FORMAT_TAG = "veriscope-index/1"

MANIFEST_FILE = "manifest.json"
POSTINGS_FILE = "postings.json"
DOCS_FILE = "docs.jsonl"


@dataclass(frozen=True)
class StoredDocument:
    doc_id: str
    title: str
    body: str
    length: int


class LocalIndex:
    """Read-only after construction; safe for concurrent retrieval."""

    def __init__(
        self,
        documents: dict[str, StoredDocument],
        postings: dict[str, dict[str, int]],
        skipped: int = 0,
    ):
        self._documents = documents
        self._postings = postings
        self.skipped = skipped
        total_length = sum(doc.length for doc in documents.values())
        self.stats = CorpusStats(
            doc_count=len(documents),
            avg_doc_length=total_length / len(documents) if documents else 0.0,
            doc_frequencies={term: len(entry) for term, entry in postings.items()},
        )

    @property
    def doc_count(self) -> int:
        return self.stats.doc_count

    @property
    def term_count(self) -> int:
        return len(self._postings)

    def document(self, doc_id: str) -> StoredDocument:
        return self._documents[doc_id]

    @classmethod
    def from_documents(cls, docs: Iterable[tuple[str, str, str]], skipped: int = 0) -> "LocalIndex":
        """Build from (doc_id, title, body) triples; raises EmptyCorpus on none."""
        documents: dict[str, StoredDocument] = {}
        postings: dict[str, dict[str, int]] = {}
        for doc_id, title, body in docs:
            tokens = tokenize(body)
            documents[doc_id] = StoredDocument(doc_id, title, body, len(tokens))
            for term, tf in Counter(tokens).items():
                postings.setdefault(term, {})[doc_id] = tf
        if not documents:
            raise EmptyCorpus("no valid documents to index")
        return cls(documents, postings, skipped=skipped)

    def ranked(self, query_text: str) -> list[tuple[StoredDocument, float]]:
        """Full BM25 ranking of every document matching at least one query term.

        Matches brute-force scoring of the whole corpus, with ties broken
        by ascending doc_id.
        """
        terms = tokenize(query_text)
        candidates: set[str] = set()
        for term in terms:
            candidates.update(self._postings.get(term, ()))
        scored = []
        for doc_id in candidates:
            doc = self._documents[doc_id]
            tokens = self._doc_tokens(doc_id)
            scored.append((bm25_score(terms, tokens, self.stats), doc))
        scored.sort(key=lambda pair: (-pair[0], pair[1].doc_id))
        return [(doc, score) for score, doc in scored]

    def _doc_tokens(self, doc_id: str) -> list[str]:
        # Reconstruct the token multiset from postings so that loaded and
        # freshly built indexes score identically without re-tokenizing.
        tokens: list[str] = []
        for term, entry in self._postings.items():
            tf = entry.get(doc_id)
            if tf:
                tokens.extend([term] * tf)
        return tokens

    def save(self, out_dir: Path) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "format": FORMAT_TAG,
            "doc_count": self.stats.doc_count,
            "avg_doc_length": self.stats.avg_doc_length,
            "term_count": self.term_count,
        }
        (out_dir / MANIFEST_FILE).write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        postings = {
            term: sorted(entry.items()) for term, entry in sorted(self._postings.items())
        }
        (out_dir / POSTINGS_FILE).write_text(
            json.dumps(postings, sort_keys=True, separators=(",", ":")) + "\n",
            encoding="utf-8",
        )
        with (out_dir / DOCS_FILE).open("w", encoding="utf-8") as handle:
            for doc_id in sorted(self._documents):
                doc = self._documents[doc_id]
                record = {
                    "doc_id": doc.doc_id,
                    "title": doc.title,
                    "body": doc.body,
                    "length": doc.length,
                }
                handle.write(json.dumps(record, sort_keys=True) + "\n")

    @classmethod
    def load(cls, index_dir: Path) -> "LocalIndex":
        index_dir = Path(index_dir)
        manifest = json.loads((index_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
        if manifest.get("format") != FORMAT_TAG:
            raise ValueError(f"unsupported index format: {manifest.get('format')!r}")
        postings_raw = json.loads((index_dir / POSTINGS_FILE).read_text(encoding="utf-8"))
        postings = {term: dict(entry) for term, entry in postings_raw.items()}
        documents: dict[str, StoredDocument] = {}
        with (index_dir / DOCS_FILE).open(encoding="utf-8") as handle:
            for line in handle:
                record = json.loads(line)
                documents[record["doc_id"]] = StoredDocument(
                    record["doc_id"], record["title"], record["body"], record["length"]
                )
        return cls(documents, postings)


def _parse_record(lineno: int, line: str) -> tuple[str, str, str]:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(lineno, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(record, dict):
        raise MalformedDocument(lineno, "record is not an object")
    for field in ("doc_id", "title", "body"):
        if field not in record:
            raise MalformedDocument(lineno, f"missing field {field!r}")
        if not isinstance(record[field], str):
            raise MalformedDocument(lineno, f"field {field!r} is not a string")
    if not record["doc_id"]:
        raise MalformedDocument(lineno, "empty doc_id")
    return record["doc_id"], record["title"], record["body"]


def build_local_index(corpus_path: Path, out_dir: Path | None = None) -> LocalIndex:
    """Index a JSONL corpus; optionally persist to out_dir.

    Malformed lines are logged with their line number and skipped;
    duplicate doc_ids are rejected the same way.  Raises EmptyCorpus when
    nothing valid remains.  Identical input always yields identical
    persisted bytes.
    """
    corpus_path = Path(corpus_path)
    if not corpus_path.exists():
        raise FileNotFoundError(f"corpus not found: {corpus_path}")
    files = sorted(corpus_path.glob("*.jsonl")) if corpus_path.is_dir() else [corpus_path]
    triples: list[tuple[str, str, str]] = []
    seen_ids: set[str] = set()
    skipped = 0
    lineno = 0
    for file in files:
        with file.open(encoding="utf-8") as handle:
            for line in handle:
                lineno += 1
                if not line.strip():
                    continue
                try:
                    doc_id, title, body = _parse_record(lineno, line)
                    if doc_id in seen_ids:
                        raise MalformedDocument(lineno, f"duplicate doc_id {doc_id!r}")
                except MalformedDocument as exc:
                    log.warning("skipping corpus %s: %s", file.name, exc)
                    skipped += 1
                    continue
                seen_ids.add(doc_id)
                triples.append((doc_id, title, body))
    index = LocalIndex.from_documents(triples, skipped=skipped)
    if out_dir is not None:
        index.save(Path(out_dir))
    return index
