import numpy as np
import pytest

from conftest import make_doc
from veriscope.errors import ProviderUnavailable, ZeroVector
from veriscope.selection import (
    EvidenceSentence,
    FixtureEmbedder,
    HashedBowEmbedder,
    Polarity,
    cosine_similarity,
    select_evidence,
    split_sentences,
)
from veriscope.types import PUBMED, PipelineConfig, normalize_sentence


class TestSplitSentences:
    def test_two_sentences(self):
        assert split_sentences("A cat. A dog.") == ["A cat.", "A dog."]

    def test_empty(self):
        assert split_sentences("") == []

    def test_abbreviation_guard(self):
        assert split_sentences("J. Smith wrote it. It sold.") == [
            "J. Smith wrote it.",
            "It sold.",
        ]

    def test_chained_initials(self):
        assert split_sentences("U.S.A. rocks. Yes.") == ["U.S.A. rocks.", "Yes."]

    def test_exclamation_and_question(self):
        assert split_sentences("Really? Yes! Fine.") == ["Really?", "Yes!", "Fine."]

    def test_short_segments_dropped(self):
        # "x." is only two characters after trimming (and lowercase, so the
        # initial guard does not apply)
        assert split_sentences("x. This stays.") == ["This stays."]

    def test_no_terminator_tail_kept(self):
        assert split_sentences("no punctuation here") == ["no punctuation here"]

    def test_terminator_without_space_does_not_split(self):
        assert split_sentences("pH7.4 is normal.") == ["pH7.4 is normal."]


class TestCosineSimilarity:
    def test_identical_vectors(self):
        assert cosine_similarity([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_value(self):
        assert cosine_similarity([1.0, 2.0], [2.0, 1.0]) == pytest.approx(0.8, abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            cosine_similarity([0.0, 0.0], [1.0, 2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine_similarity([1.0], [1.0, 2.0])


class TestHashedBowEmbedder:
    def test_shape_and_determinism(self):
        embedder = HashedBowEmbedder(dim=64)
        a = embedder.embed(["the cat sat", "dogs bark"])
        b = embedder.embed(["the cat sat", "dogs bark"])
        assert a.shape == (2, 64)
        assert np.array_equal(a, b)

    def test_token_identical_texts_embed_identically(self):
        embedder = HashedBowEmbedder()
        vecs = embedder.embed(["The CAT sat!", "the cat sat"])
        assert np.array_equal(vecs[0], vecs[1])
        assert cosine_similarity(vecs[0], vecs[1]) == pytest.approx(1.0, abs=1e-12)

    def test_counts_not_binary(self):
        embedder = HashedBowEmbedder(dim=8)
        vec = embedder.embed(["cat cat cat"])[0]
        assert vec.sum() == 3.0

    def test_empty_text_is_zero_vector(self):
        embedder = HashedBowEmbedder(dim=16)
        assert embedder.embed(["..."])[0].sum() == 0.0


class TestEvidenceSentence:
    def test_normalized_always_recomputed(self):
        sentence = EvidenceSentence(
            text="The CAT, sat.", source=PUBMED, doc_id="d", polarity=Polarity.FROM_CLAIM,
            similarity=0.5,
        )
        assert sentence.normalized == normalize_sentence("The CAT, sat.")

    def test_similarity_clamped_within_tolerance(self):
        sentence = EvidenceSentence(
            text="x y z", source=PUBMED, doc_id="d", polarity=Polarity.FROM_CLAIM,
            similarity=1.0 + 5e-10,
        )
        assert sentence.similarity == 1.0

    def test_similarity_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            EvidenceSentence(
                text="x y z", source=PUBMED, doc_id="d", polarity=Polarity.FROM_CLAIM,
                similarity=1.5,
            )

    def test_round_trip(self):
        sentence = EvidenceSentence(
            text="Cats sleep.", source=PUBMED, doc_id="d9", polarity=Polarity.FROM_NEGATION,
            similarity=-0.25,
        )
        assert EvidenceSentence.from_dict(sentence.to_dict()) == sentence


class TestRemoteEmbedder:
    def _client(self, payload):
        from veriscope._http import JsonHttpClient

        class _Session:
            def __init__(self):
                self.payloads = []

            def post(self, url, json=None, headers=None, timeout=None):
                self.payloads.append(json)

                class _Resp:
                    status_code = 200

                    def json(self):
                        return payload

                return _Resp()

        session = _Session()
        return JsonHttpClient("http://fake/embed", session=session, sleep=lambda s: None), session

    def test_parses_embeddings_field(self):
        from veriscope.selection import RemoteEmbedder

        client, session = self._client({"embeddings": [[1.0, 2.0], [3.0, 4.0]]})
        embedder = RemoteEmbedder(url="http://fake/embed", client=client)
        vectors = embedder.embed(["a", "b"])
        assert vectors.shape == (2, 2)
        assert session.payloads[0] == {"input": ["a", "b"]}

    def test_bad_payload_raises(self):
        from veriscope.selection import RemoteEmbedder

        client, _ = self._client(["not", "a", "dict"])
        embedder = RemoteEmbedder(url="http://fake/embed", client=client)
        with pytest.raises(ProviderUnavailable):
            embedder.embed(["a"])


def brute_force_best_sentences(query, body, embedder, n):
    """Oracle: score every sentence independently, keep the n best."""
    sentences = split_sentences(body)
    vectors = embedder.embed([query] + sentences)
    scored = []
    for pos, sent in enumerate(sentences):
        u, v = vectors[0], vectors[pos + 1]
        if np.linalg.norm(u) == 0 or np.linalg.norm(v) == 0:
            continue
        scored.append((float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))), pos, sent))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [s for _, _, s in scored[:n]]


class TestSelectEvidence:
    def test_empty_docs(self, embedder, cfg):
        assert select_evidence("claim", [], embedder, cfg) == []

    def test_identical_sentence_scores_one(self, embedder, cfg):
        doc = make_doc("d1", "The cat sat on the mat. Unrelated words here.", 1)
        out = select_evidence("The cat sat on the mat.", [doc], embedder, cfg)
        assert len(out) == 1
        assert out[0].text == "The cat sat on the mat."
        assert out[0].similarity == pytest.approx(1.0, abs=1e-9)

    def test_two_docs_three_sentences_oracle(self, embedder):
        cfg = PipelineConfig(retrieval_depth=2, selection_docs=2, sentences_per_doc=1)
        query = "zinc shortens colds"
        body1 = "Zinc shortens colds in trials. Copper does not. Iron is unrelated."
        body2 = "A cold lasts a week. Zinc lozenges may help colds. Vitamin C does little."
        docs = [make_doc("d1", body1, 1), make_doc("d2", body2, 2)]
        out = select_evidence(query, docs, embedder, cfg)
        expected = [
            brute_force_best_sentences(query, body1, embedder, 1)[0],
            brute_force_best_sentences(query, body2, embedder, 1)[0],
        ]
        assert [s.text for s in out] == expected

    def test_respects_selection_docs_budget(self, embedder):
        cfg = PipelineConfig(retrieval_depth=5, selection_docs=2, sentences_per_doc=2)
        docs = [
            make_doc(f"d{i}", "Cats sleep a lot. Cats also purr. Dogs differ.", i)
            for i in range(1, 5)
        ]
        out = select_evidence("cats sleep", docs, embedder, cfg)
        assert len(out) <= cfg.selection_docs * cfg.sentences_per_doc
        assert {s.doc_id for s in out} <= {"d1", "d2"}

    def test_polarity_and_provenance(self, embedder, cfg):
        doc = make_doc("d7", "Cats sleep.", 3, source=PUBMED)
        out = select_evidence("cats", [doc], embedder, cfg, polarity=Polarity.FROM_NEGATION)
        assert out[0].polarity is Polarity.FROM_NEGATION
        assert out[0].doc_id == "d7"
        assert out[0].source == PUBMED

    def test_duplicate_documents_choose_same_text(self, embedder, cfg):
        body = "Cats sleep long hours. Dogs bark at night."
        docs = [make_doc("a", body, 1), make_doc("b", body, 2)]
        out = select_evidence("cats sleep", docs, embedder, cfg)
        assert out[0].text == out[1].text
        assert [s.doc_id for s in out] == ["a", "b"]

    def test_failed_document_skipped_others_proceed(self, cfg, caplog):
        fixture = FixtureEmbedder(
            {
                "cats": [1.0, 0.0],
                "Cats sleep.": [1.0, 1.0],
            }
        )
        docs = [
            make_doc("bad", "Unknown sentence here.", 1),
            make_doc("good", "Cats sleep.", 2),
        ]
        with caplog.at_level("WARNING"):
            out = select_evidence("cats", docs, fixture, cfg)
        assert [s.doc_id for s in out] == ["good"]
        assert "bad" in caplog.text

    def test_zero_vector_sentences_skipped(self, embedder, cfg):
        doc = make_doc("d1", "Cats sleep. ... !!!", 1)
        out = select_evidence("cats", [doc], embedder, cfg)
        assert [s.text for s in out] == ["Cats sleep."]
