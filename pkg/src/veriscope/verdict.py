"""Zero-shot veracity prediction via single-token option choice.

A verdict provider receives a prompt (claim + numbered evidence +
lettered options) and returns log-probabilities over the option
letters.  The chosen label's log-softmax value doubles as the
confidence score used downstream for disagreement analysis.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

import numpy as np

from ._http import JsonHttpClient
from .aggregation import AggregatedEvidence, EvidenceBundle
from .errors import ConfigurationError, NoValidOption, ProviderUnavailable, TemplateMissingPlaceholder
from .selection import EvidenceSentence
from .types import MERGED, ClaimPair, LabelScheme, SourceKind

ENV_LLM_URL = "LLM_API_URL"
ENV_LLM_KEY = "LLM_API_KEY"
ENV_LLM_MODEL = "LLM_MODEL"

#: Log-probability assigned to option letters the provider never surfaced.
DEFAULT_LOGPROB_FLOOR = -20.0

#: Label recorded when no option letter received any probability.
ABSTAIN_LABEL = "abstain"

_PLACEHOLDERS = ("{claim}", "{evidence}", "{options}")
_EMPTY_EVIDENCE_BLOCK = "No evidence retrieved."


@dataclass(frozen=True)
class LabelLogits:
    """Per-option scores in scheme order; always finite and complete."""

    scheme: LabelScheme
    logits: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "logits", tuple(float(x) for x in self.logits))
        if len(self.logits) != self.scheme.m:
            raise ValueError(f"expected {self.scheme.m} logits, got {len(self.logits)}")
        if not all(math.isfinite(x) for x in self.logits):
            raise ValueError("logits must be finite")

    def to_dict(self) -> dict:
        return {"scheme": self.scheme.to_dict(), "logits": list(self.logits)}

    @classmethod
    def from_dict(cls, data: dict) -> "LabelLogits":
        return cls(LabelScheme.from_dict(data["scheme"]), tuple(data["logits"]))


@dataclass(frozen=True)
class VeracityVerdict:
    """Predicted label with its log-softmax confidence and full logits."""

    claim_id: str
    source: SourceKind
    label: str
    confidence: float
    logits: LabelLogits
    abstained: bool = False

    def __post_init__(self):
        if self.confidence > 0.0:
            raise ValueError("confidence is a log-probability and cannot exceed 0")
        if not self.abstained and self.label not in self.logits.scheme.labels:
            raise ValueError(f"label {self.label!r} not in scheme {self.logits.scheme.name!r}")

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "source": self.source.name,
            "label": self.label,
            "confidence": self.confidence,
            "logits": self.logits.to_dict(),
            "abstained": self.abstained,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VeracityVerdict":
        return cls(
            claim_id=data["claim_id"],
            source=SourceKind(data["source"]),
            label=data["label"],
            confidence=data["confidence"],
            logits=LabelLogits.from_dict(data["logits"]),
            abstained=data.get("abstained", False),
        )


class VerdictProvider(Protocol):
    def choose(self, prompt: str, scheme: LabelScheme) -> LabelLogits: ...


def logits_from_letter_logprobs(
    scheme: LabelScheme,
    letter_logprobs: Mapping[str, float],
    floor: float = DEFAULT_LOGPROB_FLOOR,
) -> LabelLogits:
    """Assemble full logits from a (possibly partial) letter->logprob map.

    Missing letters receive the floor; raises NoValidOption when no
    scheme letter appears in the map at all.
    """
    if not any(letter in letter_logprobs for letter in scheme.option_letters):
        raise NoValidOption(f"no valid option letter among {sorted(letter_logprobs)}")
    return LabelLogits(
        scheme,
        tuple(float(letter_logprobs.get(letter, floor)) for letter in scheme.option_letters),
    )


def _evidence_sentences(evidence) -> Sequence[EvidenceSentence]:
    if isinstance(evidence, AggregatedEvidence):
        return evidence.sentences
    if isinstance(evidence, EvidenceBundle):
        return evidence.final
    return tuple(evidence)


def build_prompt(
    claim_text: str,
    evidence,
    scheme: LabelScheme,
    template: str,
) -> str:
    """Render the verdict prompt; deterministic for identical inputs.

    evidence may be AggregatedEvidence, an EvidenceBundle (its final set
    is used), or any sequence of EvidenceSentence.  Evidence renders as
    numbered lines, options as "A) <label>" lines in scheme order.
    """
    missing = [p for p in _PLACEHOLDERS if p not in template]
    if missing:
        raise TemplateMissingPlaceholder(f"template lacks {', '.join(missing)}")
    sentences = _evidence_sentences(evidence)
    if sentences:
        evidence_block = "\n".join(f"{i}. {s.text}" for i, s in enumerate(sentences, start=1))
    else:
        evidence_block = _EMPTY_EVIDENCE_BLOCK
    options_block = "\n".join(
        f"{letter}) {label}" for letter, label in zip(scheme.option_letters, scheme.labels)
    )
    return (
        template.replace("{claim}", claim_text)
        .replace("{evidence}", evidence_block)
        .replace("{options}", options_block)
    )


def _log_sum_exp(values: np.ndarray) -> float:
    peak = float(values.max())
    return peak + math.log(float(np.sum(np.exp(values - peak))))


def confidence_from_logits(label_logits: LabelLogits) -> tuple[str, float]:
    """Argmax label and its log-softmax value (max-subtraction stabilized).

    Ties resolve to the lowest option index; the result is invariant
    under adding any constant to all logits.
    """
    values = np.asarray(label_logits.logits, dtype=np.float64)
    best = int(np.argmax(values))
    confidence = float(values[best] - _log_sum_exp(values))
    return label_logits.scheme.labels[best], confidence


def abstain_verdict(
    claim_id: str,
    source: SourceKind,
    scheme: LabelScheme,
    floor: float = DEFAULT_LOGPROB_FLOOR,
) -> VeracityVerdict:
    """Verdict recorded when a provider yields no usable option probability."""
    return VeracityVerdict(
        claim_id=claim_id,
        source=source,
        label=ABSTAIN_LABEL,
        confidence=floor,
        logits=LabelLogits(scheme, (floor,) * scheme.m),
        abstained=True,
    )


def predict_verdict(
    claim: ClaimPair,
    evidence,
    provider: VerdictProvider,
    scheme: LabelScheme,
    template: str,
    source: SourceKind = MERGED,
    floor: float = DEFAULT_LOGPROB_FLOOR,
) -> VeracityVerdict:
    """Prompt the provider and map its letter probabilities to a verdict.

    The label is the argmax over valid option letters only, so an
    off-scheme top token cannot leak through.  When no letter received
    probability (NoValidOption) the verdict is an abstention at the
    confidence floor.  ProviderUnavailable propagates to the caller.
    """
    prompt = build_prompt(claim.text, evidence, scheme, template)
    try:
        label_logits = provider.choose(prompt, scheme)
    except NoValidOption:
        return abstain_verdict(claim.id, source, scheme, floor)
    label, confidence = confidence_from_logits(label_logits)
    return VeracityVerdict(
        claim_id=claim.id,
        source=source,
        label=label,
        confidence=confidence,
        logits=label_logits,
    )


def _stable_unit_hash(text: str) -> float:
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") / float(2**64)


class RuleVerdictProvider:
    """Deterministic offline provider driven by substring rules.

    Rules are (claim_marker, evidence_marker, option_letter) triples
    checked in order: a rule fires when the claim block contains
    claim_marker (empty string matches any claim) and the evidence block
    contains evidence_marker.  Blocks are located via the "Claim:" /
    "Evidence:" / "Answer options" headers of the bundled template; when
    those headers are absent the whole prompt is searched.  The first
    match wins; without a match the default letter (last option when
    unset) is chosen.  The chosen letter's log-probability varies
    deterministically with the evidence text so that agreeing sources
    still show distinct confidences.
    """

    def __init__(
        self,
        rules: Sequence[tuple[str, str, str]] = (),
        default_letter: str | None = None,
    ):
        self._rules = list(rules)
        self._default_letter = default_letter

    @staticmethod
    def _claim_block(prompt: str) -> str:
        _, marker, rest = prompt.partition("Claim:")
        if not marker:
            return prompt
        block, _, _ = rest.partition("Evidence:")
        return block

    @staticmethod
    def _evidence_block(prompt: str) -> str:
        _, marker, rest = prompt.partition("Evidence:")
        if not marker:
            return prompt
        block, _, _ = rest.partition("Answer options")
        return block

    def choose(self, prompt: str, scheme: LabelScheme) -> LabelLogits:
        claim_block = self._claim_block(prompt)
        block = self._evidence_block(prompt)
        letter = None
        for claim_marker, evidence_marker, rule_letter in self._rules:
            if claim_marker and claim_marker not in claim_block:
                continue
            if evidence_marker in block:
                letter = rule_letter
                break
        if letter is None:
            letter = self._default_letter or scheme.option_letters[-1]
        if letter not in scheme.option_letters:
            raise NoValidOption(f"rule letter {letter!r} not in scheme {scheme.name!r}")
        # Emit true log-probabilities: chosen mass in (0.88, 0.98), the
        # remainder split evenly, so log-softmax equals the raw values.
        chosen_prob = 0.98 - 0.1 * _stable_unit_hash(block)
        rest_prob = (1.0 - chosen_prob) / (scheme.m - 1)
        logits = tuple(
            math.log(chosen_prob) if option == letter else math.log(rest_prob)
            for option in scheme.option_letters
        )
        return LabelLogits(scheme, logits)


class FixtureVerdictProvider:
    """Fixture-backed provider: exact letter log-probabilities per prompt key.

    Keys are substrings matched against the full prompt, useful for
    pinning behavior per claim in tests.
    """

    def __init__(self, by_key: Mapping[str, Mapping[str, float]], floor: float = DEFAULT_LOGPROB_FLOOR):
        self._by_key = {key: dict(val) for key, val in by_key.items()}
        self._floor = floor

    def choose(self, prompt: str, scheme: LabelScheme) -> LabelLogits:
        for key, letter_logprobs in self._by_key.items():
            if key in prompt:
                return logits_from_letter_logprobs(scheme, letter_logprobs, self._floor)
        raise NoValidOption("no fixture entry matched the prompt")


class RemoteVerdictProvider:
    """Chat-completion endpoint with top-token log-probabilities enabled.

    Reads LLM_API_URL / LLM_API_KEY / LLM_MODEL unless configured
    explicitly.  The response's top_logprobs entries are matched to
    option letters (a token like " A" or "A)" counts as letter A,
    keeping the best log-probability per letter).
    """

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        *,
        floor: float = DEFAULT_LOGPROB_FLOOR,
        top_logprobs: int = 20,
        max_in_flight: int = 4,
        client: JsonHttpClient | None = None,
    ):
        url = url or os.environ.get(ENV_LLM_URL)
        if not url:
            raise ConfigurationError(f"remote verdicts need {ENV_LLM_URL}")
        self.model = model or os.environ.get(ENV_LLM_MODEL, "")
        self._floor = floor
        self._top_logprobs = top_logprobs
        self._client = client or JsonHttpClient(
            url, api_key or os.environ.get(ENV_LLM_KEY), max_in_flight=max_in_flight
        )

    @staticmethod
    def _letter_of(token: str, letters: Sequence[str]) -> str | None:
        stripped = token.strip()
        if not stripped:
            return None
        head, tail = stripped[0], stripped[1:]
        if head in letters and (not tail or not tail[0].isalnum()):
            return head
        return None

    def choose(self, prompt: str, scheme: LabelScheme) -> LabelLogits:
        payload = {
            "model": self.model,
            "temperature": 0,
            "max_tokens": 1,
            "logprobs": True,
            "top_logprobs": self._top_logprobs,
            "messages": [{"role": "user", "content": prompt}],
        }
        data = self._client.post(payload)
        try:
            entries = data["choices"][0]["logprobs"]["content"][0]["top_logprobs"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderUnavailable(f"completion lacked top_logprobs: {exc}") from exc
        letter_logprobs: dict[str, float] = {}
        for entry in entries:
            letter = self._letter_of(str(entry.get("token", "")), scheme.option_letters)
            if letter is None:
                continue
            logprob = float(entry["logprob"])
            if letter not in letter_logprobs or logprob > letter_logprobs[letter]:
                letter_logprobs[letter] = logprob
        return logits_from_letter_logprobs(scheme, letter_logprobs, self._floor)
