import unicodedata

import pytest
from hypothesis import given
from hypothesis import strategies as st

from veriscope.types import (
    MERGED,
    PUBMED,
    WEB,
    WIKIPEDIA,
    ClaimPair,
    LabelScheme,
    PipelineConfig,
    SourceKind,
    normalize_sentence,
    source_order_key,
)


class TestNormalizeSentence:
    def test_strips_punctuation_and_lowercases(self):
        assert normalize_sentence("Hello, World!") == "hello world"

    def test_empty(self):
        assert normalize_sentence("") == ""

    def test_unicode_punctuation_and_whitespace_collapse(self):
        # Ellipsis is Unicode punctuation; the double space collapses.
        assert normalize_sentence("A  B…C") == "a bc"

    def test_all_punctuation_becomes_empty(self):
        assert normalize_sentence("!?...;;") == ""

    @given(st.text(max_size=200))
    def test_idempotent(self, text):
        once = normalize_sentence(text)
        assert normalize_sentence(once) == once

    @given(st.text(max_size=200))
    def test_no_uppercase_no_punctuation(self, text):
        out = normalize_sentence(text)
        # Characters without a lowercase mapping (e.g. math alphanumerics)
        # survive str.lower(); the guarantee is that lowercasing is a fixed
        # point, not that isupper() is false for every exotic code point.
        assert out == out.lower()
        assert not any(unicodedata.category(ch).startswith("P") for ch in out)


class TestClaimPair:
    def test_requires_nonempty_text(self):
        with pytest.raises(ValueError):
            ClaimPair(id="x", text="   ")

    def test_negation_must_differ_after_normalization(self):
        with pytest.raises(ValueError):
            ClaimPair(id="x", text="The sky is blue.", negated_text="the sky is blue")

    def test_with_negation_keeps_text(self):
        claim = ClaimPair(id="x", text="The sky is blue.")
        negated = claim.with_negation("The sky is not blue.")
        assert negated.text == claim.text
        assert negated.negated_text == "The sky is not blue."
        assert claim.negated_text is None


class TestLabelScheme:
    def test_valid(self, scheme3):
        assert scheme3.m == 3
        assert scheme3.label_for_letter("B") == "Refuted"
        assert scheme3.letter_for_label("Supported") == "A"

    @pytest.mark.parametrize(
        "labels,letters",
        [
            (("Only",), ("A",)),
            (("A", "B"), ("A",)),
            (("A", "A"), ("A", "B")),
            (("X", "Y"), ("A", "A")),
            (("X", "Y"), ("A", "BB")),
        ],
    )
    def test_invalid(self, labels, letters):
        with pytest.raises(ValueError):
            LabelScheme(name="bad", labels=labels, option_letters=letters)

    def test_round_trip(self, scheme3):
        assert LabelScheme.from_dict(scheme3.to_dict()) == scheme3


class TestPipelineConfig:
    def test_defaults_valid(self):
        cfg = PipelineConfig()
        assert cfg.selection_docs <= cfg.retrieval_depth

    def test_selection_docs_bounded_by_depth(self):
        with pytest.raises(ValueError):
            PipelineConfig(retrieval_depth=2, selection_docs=3)

    def test_counts_positive(self):
        with pytest.raises(ValueError):
            PipelineConfig(final_top_p=0)

    def test_round_trip(self):
        cfg = PipelineConfig(retrieval_depth=7, selection_docs=3, seed=11)
        assert PipelineConfig.from_dict(cfg.to_dict()) == cfg


class TestSourceKind:
    def test_fixed_order(self):
        kinds = [MERGED, WEB, SourceKind("custom"), PUBMED, WIKIPEDIA]
        ordered = sorted(kinds, key=source_order_key)
        assert ordered[:3] == [WIKIPEDIA, PUBMED, WEB]
        assert [k.name for k in ordered[3:]] == ["custom", "merged"]

    def test_nonempty_name(self):
        with pytest.raises(ValueError):
            SourceKind("  ")
