import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from itgkit.cli import main
from tests.conftest import FIXTURES


@pytest.fixture()
def runner():
    return CliRunner()


class TestIngest:
    def test_valid_jats(self, runner, tmp_path):
        result = runner.invoke(main, ["ingest", str(FIXTURES / "article_v1.xml"),
                                      "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "article_v1.json").exists()
        assert (tmp_path / "article_v1.report.json").exists()

    def test_malformed_xml_nonzero_exit(self, runner, tmp_path):
        bad = tmp_path / "bad.xml"
        bad.write_text("<article><body>")
        result = runner.invoke(main, ["ingest", str(bad), "--out", str(tmp_path)])
        assert result.exit_code != 0
        assert "malformed" in result.output

    def test_empty_input_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["ingest", "--out", str(tmp_path)])
        assert result.exit_code == 2
        assert "no input files" in result.output

    def test_review_ingestion(self, runner, tmp_path):
        result = runner.invoke(main, ["ingest", str(FIXTURES / "review1.txt"),
                                      "--kind", "review", "--out", str(tmp_path)])
        assert result.exit_code == 0
        graph = json.loads((tmp_path / "review1.json").read_text())
        kinds = {n["kind"] for n in graph["nodes"]}
        assert "review-report" in kinds


@pytest.fixture()
def ingested(tmp_path):
    """Graph JSON files for both paper versions and the review."""
    from itgkit.graph import serialize
    from itgkit.ingest import IngestOptions, ingest_review, parse_jats

    out = tmp_path / "graphs"
    out.mkdir()
    v1, _ = parse_jats((FIXTURES / "article_v1.xml").read_bytes(),
                       IngestOptions(doc_id="paper1", version=1))
    v2, _ = parse_jats((FIXTURES / "article_v2.xml").read_bytes(),
                       IngestOptions(doc_id="paper1", version=2))
    rev, _ = ingest_review((FIXTURES / "review1.txt").read_text("utf-8"), "rev1")
    (out / "paper_v1.json").write_bytes(serialize(v1))
    (out / "paper_v2.json").write_bytes(serialize(v2))
    (out / "rev1.json").write_bytes(serialize(rev))
    return out


class TestAlign:
    def test_identical_graphs_all_unchanged(self, runner, ingested, tmp_path):
        out = tmp_path / "align_out"
        result = runner.invoke(main, ["align", str(ingested / "paper_v1.json"),
                                      str(ingested / "paper_v1.json"),
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "modified 0, added 0, deleted 0" in result.output

    def test_document_id_mismatch(self, runner, ingested, tmp_path):
        result = runner.invoke(main, ["align", str(ingested / "paper_v1.json"),
                                      str(ingested / "rev1.json"),
                                      "--out", str(tmp_path)])
        assert result.exit_code != 0
        assert "mismatch" in result.output

    def test_revision_pair_with_overlap_metric(self, runner, ingested, tmp_path):
        out = tmp_path / "align_out"
        args = ["align", str(ingested / "paper_v1.json"),
                str(ingested / "paper_v2.json"),
                "--metric", "overlap", "--out", str(out)]
        assert runner.invoke(main, args).exit_code == 0
        first = (out / "paper1_v1_v2.alignment.json").read_bytes()
        a = json.loads(first)
        assert a["metric"] == "word-overlap"
        assert a["added"] and a["deleted"] and a["modified"]
        # byte-identical across repeated runs
        for _ in range(2):
            assert runner.invoke(main, args).exit_code == 0
            assert (out / "paper1_v1_v2.alignment.json").read_bytes() == first


class TestExtract:
    def test_joint_and_tsv(self, runner, ingested, tmp_path):
        out = tmp_path / "extract_out"
        result = runner.invoke(main, ["extract", "--paper", str(ingested / "paper_v1.json"),
                                      "--review", str(ingested / "rev1.json"),
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        joint = json.loads((out / "joint.json").read_text())
        explicit = [e for e in joint["edges"] if e.get("subtype") == "explicit"]
        assert explicit
        tsv = (out / "explicit_links.tsv").read_text()
        assert tsv.startswith("sentence\t")


class TestSuggest:
    def test_m_limit(self, runner, ingested, tmp_path):
        out = tmp_path / "suggest_out"
        args = ["suggest", "--paper", str(ingested / "paper_v1.json"),
                "--review", str(ingested / "rev1.json"),
                "--m", "5", "--out", str(out)]
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
        payload = json.loads((out / "rev1.suggestions.json").read_text())
        assert payload["suggestions"]
        for entry in payload["suggestions"]:
            assert len(entry["candidates"]) <= 5

    def test_byte_identical_across_runs(self, runner, ingested, tmp_path):
        out = tmp_path / "suggest_out"
        args = ["suggest", "--paper", str(ingested / "paper_v1.json"),
                "--review", str(ingested / "rev1.json"), "--out", str(out)]
        assert runner.invoke(main, args).exit_code == 0
        first = (out / "rev1.suggestions.json").read_bytes()
        for _ in range(2):
            assert runner.invoke(main, args).exit_code == 0
            assert (out / "rev1.suggestions.json").read_bytes() == first


class TestAgreement:
    def test_alpha_printed_and_written(self, runner, tmp_path):
        # the 4-item fixture with hand-computed alpha = 8/15
        log = tmp_path / "dual.jsonl"
        rows = [("s1", "A", "Todo"), ("s1", "B", "Todo"),
                ("s2", "A", "Todo"), ("s2", "B", "Recap"),
                ("s3", "A", "Recap"), ("s3", "B", "Recap"),
                ("s4", "A", "Recap"), ("s4", "B", "Recap")]
        with open(log, "w") as fh:
            for node, annotator, label in rows:
                fh.write(json.dumps({"node": node, "label": label,
                                     "annotator": annotator, "ts": 0.0}) + "\n")
        out = tmp_path / "agree_out"
        result = runner.invoke(main, ["agreement", str(log), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "alpha[pragmatics] = 0.5333" in result.output
        payload = json.loads((out / "agreement_pragmatics.json").read_text())
        assert payload["alpha"] == pytest.approx(8 / 15)

    def test_linking_layer(self, runner, tmp_path):
        log = tmp_path / "links.jsonl"
        with open(log, "w") as fh:
            for review, paper, verdict, annotator in [
                    ("r1", "p1", "linked", "A"), ("r1", "p1", "linked", "B"),
                    ("r1", "p2", "linked", "A"), ("r1", "p2", "not-linked", "B")]:
                fh.write(json.dumps({"review": review, "paper": paper,
                                     "verdict": verdict, "annotator": annotator,
                                     "ts": 0.0, "source": "suggested"}) + "\n")
        result = runner.invoke(main, ["agreement", str(log), "--layer", "linking",
                                      "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        payload = json.loads((tmp_path / "agreement_linking.json").read_text())
        assert payload["items"] == "labeled-pairs-only"


class TestStats:
    def test_full_project(self, runner, demo_project_dir, tmp_path):
        result = runner.invoke(main, ["stats", "--project", str(demo_project_dir),
                                      "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        payload = json.loads((tmp_path / "demo.stats.json").read_text())
        assert "change_given_links" in payload
        csv = (tmp_path / "demo.stats.csv").read_text()
        assert csv.startswith("statistic,key,channel,value")

    def test_missing_alignment_layer_named(self, runner, demo_project_dir, tmp_path):
        # a copy of the project with only one version
        import shutil
        clone = tmp_path / "one_version"
        shutil.copytree(demo_project_dir, clone)
        manifest = json.loads((clone / "project.json").read_text())
        manifest["versions"] = {"1": manifest["versions"]["1"]}
        (clone / "project.json").write_text(json.dumps(manifest))
        result = runner.invoke(main, ["stats", "--project", str(clone),
                                      "--out", str(tmp_path)])
        assert result.exit_code != 0
        assert "alignment" in result.output

    def test_missing_pragmatics_layer_named(self, runner, demo_project_dir, tmp_path):
        import shutil
        clone = tmp_path / "no_labels"
        shutil.copytree(demo_project_dir, clone)
        (clone / "pragmatics.jsonl").write_text("")
        result = runner.invoke(main, ["stats", "--project", str(clone),
                                      "--out", str(tmp_path)])
        assert result.exit_code != 0
        assert "pragmatics" in result.output


class TestConfig:
    def test_invalid_config_fails_fast(self, runner, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"metric": "cosine"}))
        monkeypatch.setenv("ITGKIT_CONFIG", str(cfg))
        result = runner.invoke(main, ["ingest", str(FIXTURES / "review1.txt"),
                                      "--out", str(tmp_path)])
        assert result.exit_code != 0
        assert "unknown metric" in result.output

    def test_unknown_keys_rejected(self, runner, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"metrc": "levenshtein"}))
        monkeypatch.setenv("ITGKIT_CONFIG", str(cfg))
        result = runner.invoke(main, ["ingest", str(FIXTURES / "review1.txt"),
                                      "--out", str(tmp_path)])
        assert result.exit_code != 0
        assert "unknown config keys" in result.output

    def test_config_supplies_defaults(self, runner, tmp_path, monkeypatch, ingested):
        cfg = tmp_path / "cfg.json"
        out = tmp_path / "cfg_out"
        cfg.write_text(json.dumps({"metric": "word-overlap", "out": str(out)}))
        monkeypatch.setenv("ITGKIT_CONFIG", str(cfg))
        result = runner.invoke(main, ["align", str(ingested / "paper_v1.json"),
                                      str(ingested / "paper_v2.json")])
        assert result.exit_code == 0, result.output
        payload = json.loads((out / "paper1_v1_v2.alignment.json").read_text())
        assert payload["metric"] == "word-overlap"
