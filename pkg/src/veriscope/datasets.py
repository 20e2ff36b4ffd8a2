"""Claims-file ingestion for the benchmark datasets.

A dataset is a JSONL file of records carrying at least a claim sentence
and a gold label; the descriptor names the fields and the label scheme.
Records that fail validation are logged with their line number and
counted, never silently dropped.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyDataset
from .types import ClaimPair, LabelScheme

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DatasetDescriptor:
    name: str
    scheme: LabelScheme
    path: Path
    claim_field: str = "claim"
    label_field: str = "label"
    id_field: str = "id"


def load_dataset(desc: DatasetDescriptor) -> list[ClaimPair]:
    """Load claims in file order; every kept record's gold label is in-scheme.

    Raises FileNotFoundError for a missing file and EmptyDataset when no
    valid record remains.  Re-loading the same file yields the same list.
    """
    path = Path(desc.path)
    if not path.exists():
        raise FileNotFoundError(f"claims file not found: {path}")
    claims: list[ClaimPair] = []
    rejected = 0
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            reason = None
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                record, reason = None, f"invalid JSON ({exc.msg})"
            if reason is None:
                text = str(record.get(desc.claim_field, "") or "")
                label = record.get(desc.label_field)
                if not text.strip():
                    reason = f"missing or empty {desc.claim_field!r}"
                elif label not in desc.scheme.labels:
                    reason = f"label {label!r} not in scheme {desc.scheme.name!r}"
            if reason is not None:
                rejected += 1
                log.warning("%s line %d rejected: %s", path.name, lineno, reason)
                continue
            claim_id = str(record.get(desc.id_field) or f"{desc.name}-{lineno:05d}")
            claims.append(ClaimPair(id=claim_id, text=text.strip(), gold_label=label))
    if not claims:
        raise EmptyDataset(f"{path}: no valid records ({rejected} rejected)")
    log.info("loaded %d claims from %s (%d rejected)", len(claims), path.name, rejected)
    return claims
