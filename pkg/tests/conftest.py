import pytest

from veriscope.selection import EvidenceSentence, HashedBowEmbedder, Polarity
from veriscope.sources import RetrievedDocument
from veriscope.types import PUBMED, WIKIPEDIA, LabelScheme, PipelineConfig


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {name}: {status}")
    elif report.when == "setup" and report.skipped:
        print(f"\nACCEPTANCE {name}: SKIP")


@pytest.fixture
def scheme3():
    return LabelScheme(
        name="scifact",
        labels=("Supported", "Refuted", "Not Enough Info"),
        option_letters=("A", "B", "C"),
    )


@pytest.fixture
def embedder():
    return HashedBowEmbedder(dim=256)


@pytest.fixture
def cfg():
    return PipelineConfig(retrieval_depth=5, selection_docs=5, sentences_per_doc=1, final_top_p=5)


def make_sentence(
    text,
    doc_id="d1",
    source=PUBMED,
    polarity=Polarity.FROM_CLAIM,
    similarity=0.5,
):
    return EvidenceSentence(
        text=text, source=source, doc_id=doc_id, polarity=polarity, similarity=similarity
    )


def make_doc(doc_id, body, rank, title="", source=WIKIPEDIA, score=None):
    return RetrievedDocument(
        doc_id=doc_id,
        source=source,
        title=title,
        body=body,
        rank=rank,
        score=score if score is not None else 1.0 / rank,
    )
