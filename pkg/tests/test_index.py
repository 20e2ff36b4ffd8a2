import json

import pytest

from veriscope.errors import EmptyCorpus
from veriscope.index import LocalIndex, build_local_index


def write_corpus(path, records):
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


GOOD = [
    {"doc_id": "d1", "title": "Cats", "body": "cat sat"},
    {"doc_id": "d2", "title": "Dogs", "body": "dog ran far"},
]


class TestBuildLocalIndex:
    def test_counts(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        write_corpus(corpus, [{"doc_id": "d1", "title": "", "body": "cat sat"}])
        index = build_local_index(corpus)
        assert index.doc_count == 1
        assert index.term_count == 2
        assert index.stats.avg_doc_length == 2.0

    def test_missing_path(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            build_local_index(tmp_path / "nope.jsonl")

    def test_empty_corpus(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text("")
        with pytest.raises(EmptyCorpus):
            build_local_index(corpus)

    def test_malformed_lines_skipped_with_lineno(self, tmp_path, caplog):
        corpus = tmp_path / "corpus.jsonl"
        lines = [
            json.dumps(GOOD[0]),
            "not json at all",
            json.dumps({"doc_id": "d3", "title": "x"}),  # missing body
            json.dumps({"doc_id": "", "title": "x", "body": "y"}),
            json.dumps(GOOD[1]),
            json.dumps(GOOD[0]),  # duplicate doc_id
        ]
        corpus.write_text("\n".join(lines) + "\n")
        with caplog.at_level("WARNING"):
            index = build_local_index(corpus)
        assert index.doc_count == 2
        assert index.skipped == 4
        assert "line 2" in caplog.text
        assert "line 3" in caplog.text
        assert "duplicate doc_id" in caplog.text

    def test_malformed_only_corpus_is_empty(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text("garbage\n{}\n")
        with pytest.raises(EmptyCorpus):
            build_local_index(corpus)

    def test_directory_of_jsonl_files(self, tmp_path):
        (tmp_path / "b.jsonl").write_text(json.dumps(GOOD[1]) + "\n")
        (tmp_path / "a.jsonl").write_text(json.dumps(GOOD[0]) + "\n")
        index = build_local_index(tmp_path)
        assert index.doc_count == 2


class TestPersistence:
    def test_round_trip(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        write_corpus(corpus, GOOD)
        index_dir = tmp_path / "index"
        built = build_local_index(corpus, index_dir)
        loaded = LocalIndex.load(index_dir)
        assert loaded.doc_count == built.doc_count
        assert loaded.stats.avg_doc_length == built.stats.avg_doc_length
        assert loaded.stats.doc_frequencies == dict(built.stats.doc_frequencies)
        # loaded index ranks identically
        for query in ("cat", "dog ran", "far cat"):
            got = [(d.doc_id, s) for d, s in loaded.ranked(query)]
            want = [(d.doc_id, s) for d, s in built.ranked(query)]
            assert got == want

    def test_reindexing_byte_identical(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        write_corpus(corpus, GOOD)
        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        build_local_index(corpus, dir_a)
        build_local_index(corpus, dir_b)
        for name in ("manifest.json", "postings.json", "docs.jsonl"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_load_save_byte_identical(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        write_corpus(corpus, GOOD)
        dir_a = tmp_path / "a"
        build_local_index(corpus, dir_a)
        dir_b = tmp_path / "b"
        LocalIndex.load(dir_a).save(dir_b)
        for name in ("manifest.json", "postings.json", "docs.jsonl"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_rejects_unknown_format(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        write_corpus(corpus, GOOD)
        index_dir = tmp_path / "index"
        build_local_index(corpus, index_dir)
        manifest = json.loads((index_dir / "manifest.json").read_text())
        manifest["format"] = "other/9"
        (index_dir / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(ValueError):
            LocalIndex.load(index_dir)
