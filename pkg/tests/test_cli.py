import json
import socket

import pytest
from click.testing import CliRunner

from veriscope.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def no_network(monkeypatch):
    """Any socket creation fails the test."""

    def _blow_up(*args, **kwargs):
        raise AssertionError("network access attempted in mock mode")

    monkeypatch.setattr(socket, "socket", _blow_up)


@pytest.fixture
def corpus(tmp_path):
    path = tmp_path / "corpus.jsonl"
    records = [
        {"doc_id": "d1", "title": "Cats", "body": "Cats purr. Cats sleep."},
        {"doc_id": "d2", "title": "Dogs", "body": "Dogs bark loudly."},
    ]
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    return path


class TestIndexCommand:
    def test_indexes_corpus(self, runner, corpus, tmp_path, no_network):
        result = runner.invoke(main, ["index", str(corpus), "--out", str(tmp_path / "idx")])
        assert result.exit_code == 0, result.output
        assert "indexed 2 documents" in result.output

    def test_missing_path_exit_2(self, runner, tmp_path):
        result = runner.invoke(main, ["index", str(tmp_path / "nope.jsonl"), "--out", "x"])
        assert result.exit_code == 2

    def test_deterministic_manifests(self, runner, corpus, tmp_path):
        runner.invoke(main, ["index", str(corpus), "--out", str(tmp_path / "a")])
        runner.invoke(main, ["index", str(corpus), "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "manifest.json").read_bytes() == (
            tmp_path / "b" / "manifest.json"
        ).read_bytes()

    def test_empty_corpus_nonzero_exit(self, runner, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        result = runner.invoke(main, ["index", str(empty), "--out", str(tmp_path / "idx")])
        assert result.exit_code != 0


class TestNegateCommand:
    def test_mock_fixture_negation(self, runner, no_network):
        result = runner.invoke(
            main,
            ["negate", "A deficiency of vitamin B12 increases homocysteine levels.", "--mock"],
        )
        assert result.exit_code == 0, result.output
        assert result.output.strip() == "A surplus of vitamin B12 decreases homocysteine levels."

    def test_mock_falls_back_to_rules(self, runner, no_network):
        result = runner.invoke(main, ["negate", "The sky is blue", "--mock"])
        assert result.exit_code == 0
        assert result.output.strip() == "The sky is not blue"

    def test_json_output(self, runner, no_network):
        result = runner.invoke(main, ["negate", "The sky is blue", "--mock", "--json"])
        data = json.loads(result.output)
        assert data == {"claim": "The sky is blue", "negation": "The sky is not blue"}

    def test_live_without_env_exit_3(self, runner, monkeypatch):
        monkeypatch.delenv("NEGATION_API_URL", raising=False)
        result = runner.invoke(main, ["negate", "The sky is blue"])
        assert result.exit_code == 3


class TestVerifyCommand:
    CLAIM = "A deficiency of vitamin B12 increases homocysteine levels."

    def test_mock_verify_text_output(self, runner, no_network):
        result = runner.invoke(main, ["verify", self.CLAIM, "--mock"])
        assert result.exit_code == 0, result.output
        assert "Per-source verdicts:" in result.output
        assert "Merged verdict:" in result.output
        assert "Agreement:" in result.output

    def test_json_output_parses(self, runner, no_network):
        result = runner.invoke(main, ["verify", self.CLAIM, "--mock", "--json"])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["claim"]["text"] == self.CLAIM
        assert set(data["verdicts"]) == {"wikipedia", "pubmed", "web", "merged"}

    def test_unknown_source_exit_2(self, runner):
        result = runner.invoke(main, ["verify", self.CLAIM, "--mock", "--sources", "bing"])
        assert result.exit_code == 2

    def test_source_subset(self, runner, no_network):
        result = runner.invoke(
            main, ["verify", self.CLAIM, "--mock", "--sources", "pubmed", "--json"]
        )
        data = json.loads(result.output)
        assert set(data["verdicts"]) == {"pubmed", "merged"}

    def test_deterministic(self, runner):
        a = runner.invoke(main, ["verify", self.CLAIM, "--mock", "--json"]).output
        b = runner.invoke(main, ["verify", self.CLAIM, "--mock", "--json"]).output
        assert a == b

    def test_original_only_condition(self, runner, no_network):
        result = runner.invoke(
            main, ["verify", self.CLAIM, "--mock", "--condition", "original", "--json"]
        )
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["claim"]["negated_text"] is None
        assert data["condition"] == "original"

    def test_live_without_env_exit_3(self, runner, monkeypatch):
        for var in ("LLM_API_URL", "NEGATION_API_URL", "EMBED_API_URL"):
            monkeypatch.delenv(var, raising=False)
        result = runner.invoke(main, ["verify", self.CLAIM])
        assert result.exit_code == 3


class TestEvaluateCommand:
    def test_mock_evaluate(self, runner, tmp_path, no_network):
        out = tmp_path / "run"
        result = runner.invoke(main, ["evaluate", "--mock", "--out", str(out)])
        assert result.exit_code == 0, result.output
        metrics = json.loads((out / "metrics.json").read_text())
        for report in metrics["per_source"].values():
            for key in ("accuracy", "macro_precision", "macro_recall", "macro_f1"):
                assert key in report
        assert "merged" in result.output

    def test_two_conditions_two_metric_files(self, runner, tmp_path, no_network):
        out_a = tmp_path / "orig"
        out_b = tmp_path / "dual"
        runner.invoke(main, ["evaluate", "--mock", "--condition", "original", "--out", str(out_a)])
        runner.invoke(
            main, ["evaluate", "--mock", "--condition", "original+negated", "--out", str(out_b)]
        )
        a = json.loads((out_a / "metrics.json").read_text())
        b = json.loads((out_b / "metrics.json").read_text())
        assert a["condition"] == "original"
        assert b["condition"] == "original+negated"
        assert a != b

    def test_limit_seed_reproducible(self, runner, tmp_path, no_network):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            result = runner.invoke(
                main,
                ["evaluate", "--mock", "--limit", "3", "--seed", "7", "--out", str(out)],
            )
            assert result.exit_code == 0, result.output
            outs.append(sorted(p.name for p in (out / "traces").glob("*.json")))
        assert outs[0] == outs[1]
        assert len(outs[0]) == 3

    def test_live_without_claims_usage_error(self, runner):
        result = runner.invoke(main, ["evaluate"])
        assert result.exit_code == 2

    def test_config_file_overrides_pipeline_knobs(self, runner, tmp_path, no_network):
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps({"retrieval_depth": 2, "selection_docs": 2, "final_top_p": 3, "seed": 1})
        )
        out = tmp_path / "run"
        result = runner.invoke(
            main, ["evaluate", "--mock", "--config", str(config), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "run-manifest.json").read_text())
        assert manifest["config"]["retrieval_depth"] == 2
        assert manifest["config"]["final_top_p"] == 3

    def test_partial_config_inherits_sane_defaults(self, runner, tmp_path, no_network):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"retrieval_depth": 2}))
        out = tmp_path / "run"
        result = runner.invoke(
            main, ["evaluate", "--mock", "--config", str(config), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "run-manifest.json").read_text())
        assert manifest["config"]["retrieval_depth"] == 2
        assert manifest["config"]["selection_docs"] == 2

    def test_invalid_config_values_usage_error(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"retrieval_depth": 0}))
        result = runner.invoke(
            main, ["evaluate", "--mock", "--config", str(config), "--out", str(tmp_path / "r")]
        )
        assert result.exit_code == 2

    def test_malformed_config_usage_error(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text("{not json")
        result = runner.invoke(
            main, ["evaluate", "--mock", "--config", str(config), "--out", str(tmp_path / "r")]
        )
        assert result.exit_code == 2

    def test_mock_rejects_remote_provider_request(self, runner, tmp_path, no_network):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"remote_embedder": True}))
        result = runner.invoke(
            main, ["evaluate", "--mock", "--config", str(config), "--out", str(tmp_path / "r")]
        )
        assert result.exit_code == 3

    def test_seed_flag_beats_config_file(self, runner, tmp_path, no_network):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"seed": 1}))
        out = tmp_path / "run"
        result = runner.invoke(
            main,
            ["evaluate", "--mock", "--config", str(config), "--seed", "9", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads((out / "run-manifest.json").read_text())
        assert manifest["config"]["seed"] == 9


class TestAnalyzeCommand:
    def _evaluated(self, runner, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(main, ["evaluate", "--mock", "--out", str(out)])
        assert result.exit_code == 0, result.output
        return out

    def test_analyze_writes_kde(self, runner, tmp_path, no_network):
        out = self._evaluated(runner, tmp_path)
        result = runner.invoke(main, ["analyze", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "kde.csv").exists()

    def test_missing_confidences_exit_2(self, runner, tmp_path):
        result = runner.invoke(main, ["analyze", str(tmp_path)])
        assert result.exit_code == 2

    def test_rerun_identical(self, runner, tmp_path, no_network):
        out = self._evaluated(runner, tmp_path)
        runner.invoke(main, ["analyze", str(out)])
        first = (out / "kde.csv").read_bytes()
        runner.invoke(main, ["analyze", str(out)])
        assert (out / "kde.csv").read_bytes() == first

    def test_svg_option(self, runner, tmp_path, no_network):
        out = self._evaluated(runner, tmp_path)
        result = runner.invoke(main, ["analyze", str(out), "--svg"])
        assert result.exit_code == 0
        assert (out / "kde.svg").read_text().startswith("<svg")

    def test_single_sample_groups_warned(self, runner, tmp_path, no_network):
        out = self._evaluated(runner, tmp_path)
        result = runner.invoke(main, ["analyze", str(out)])
        # the fixture run has an all-agree regime with a single claim
        assert "skipped regime=" in result.output or "curves" in result.output
