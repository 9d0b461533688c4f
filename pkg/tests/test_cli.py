import csv
import json

import pytest

from citerank.cli import main
from citerank.config import parse_config
from citerank.errors import ParseError


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    rc = main(["ingest", "--synth", "600", "--mean-refs", "8",
               "--synth-years", "1980:2008", "--venues", "4",
               "--community-bias", "0.7", "--seed", "3",
               "--out-dir", str(out)])
    assert rc == 0
    return out


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestConfig:
    def test_parse_types(self):
        cfg = parse_config(
            'trials = 50\nd = 0.9\nname = "layered"\nverbose = true\n# comment\n\n')
        assert cfg == {"trials": 50, "d": 0.9, "name": "layered", "verbose": True}

    def test_bad_line_reports_number(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_config("a = 1\nnot a pair\n")

    def test_precedence_flag_over_config(self, corpus_dir, tmp_path, capsys):
        cfg = tmp_path / "cfg"
        cfg.write_text("trials = 4\nmin_refs = 5\nyear_lo = 1995\nyear_hi = 2005\n")
        rc = main(["scenario", "--kind", "hide_random", "--algo", "cocitation",
                   "--config", str(cfg), "--trials", "2",
                   "--data-dir", str(corpus_dir)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "over 2 trials" in out


class TestIngest:
    def test_synth_writes_corpus(self, corpus_dir):
        assert (corpus_dir / "meta.tsv").exists()
        assert (corpus_dir / "edges.tsv").exists()

    def test_summary_json(self, tmp_path, capsys):
        rc = main(["ingest", "--synth", "60", "--mean-refs", "3",
                   "--out-dir", str(tmp_path / "c")])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["documents"] == 60 and summary["edges"] > 0

    def test_tsv_import_path(self, corpus_dir, tmp_path, capsys):
        rc = main(["ingest", "--meta", str(corpus_dir / "meta.tsv"),
                   "--edges", str(corpus_dir / "edges.tsv"),
                   "--out-dir", str(tmp_path / "copy")])
        assert rc == 0

    def test_missing_inputs_error(self, tmp_path, capsys):
        rc = main(["ingest", "--out-dir", str(tmp_path / "x")])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_dblp_citeseer_path(self, tmp_path, capsys):
        xml = tmp_path / "d.xml"
        xml.write_text(
            "<dblp>"
            '<article key="a1"><title>alpha beta gamma</title><year>2000</year>'
            "<journal>J1</journal><author>Ada</author></article>"
            '<article key="a2"><title>delta epsilon zeta</title><year>2002</year>'
            "<journal>J1</journal><author>Bob</author></article>"
            "</dblp>")
        jsonl = tmp_path / "r.jsonl"
        jsonl.write_text(json.dumps({
            "title": "delta epsilon zeta", "year": 2002,
            "references": [{"title": "alpha beta gamma", "year": 2000}]}) + "\n")
        out = tmp_path / "built"
        rc = main(["ingest", "--dblp", str(xml), "--citeseer", str(jsonl),
                   "--out-dir", str(out)])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["edges"] == 1 and report["matched_documents"] == 1


class TestScenarioCommands:
    def test_scenario_csv(self, corpus_dir, tmp_path, capsys):
        out = tmp_path / "s.csv"
        rc = main(["scenario", "--kind", "hide_random", "--algo", "darwr",
                   "--trials", "3", "--min-refs", "5",
                   "--year-lo", "1995", "--year-hi", "2005",
                   "--data-dir", str(corpus_dir), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == ["trial", "source", "hidden", "hits", "accuracy"]
        assert len(rows) > 1

    def test_intersect_matrix_csv(self, corpus_dir, tmp_path):
        out = tmp_path / "m.csv"
        rc = main(["intersect", "--kind", "hide_random",
                   "--algos", "darwr,cocitation",
                   "--trials", "3", "--min-refs", "5",
                   "--year-lo", "1995", "--year-hi", "2005",
                   "--data-dir", str(corpus_dir), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == ["method_a", "method_b", "value"]
        assert len(rows) == 5

    def test_sweep_csv(self, corpus_dir, tmp_path):
        out = tmp_path / "w.csv"
        rc = main(["sweep", "--metric", "mean_year",
                   "--d-values", "0.5", "--lambda-values", "0.2,0.8",
                   "--trials", "4", "--min-refs", "5",
                   "--year-lo", "1995", "--year-hi", "2005",
                   "--data-dir", str(corpus_dir), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == ["d", "lambda", "metric", "value", "trials"]
        assert len(rows) == 3

    def test_patterns_csv(self, corpus_dir, tmp_path):
        out = tmp_path / "p.csv"
        rc = main(["patterns", "--kind", "hide_random", "--algos", "cocitation",
                   "--trials", "2", "--min-refs", "5",
                   "--year-lo", "1995", "--year-hi", "2005",
                   "--data-dir", str(corpus_dir), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == ["list", "metric", "value", "cdf"]
        assert {r[0] for r in rows[1:]} == {"hidden", "cocitation"}

    def test_feedback_sim_csv(self, tmp_path, capsys):
        corpus = tmp_path / "sparse"
        assert main(["ingest", "--synth", "700", "--mean-refs", "3",
                     "--synth-years", "1980:2008", "--seed", "11",
                     "--out-dir", str(corpus)]) == 0
        out = tmp_path / "f.csv"
        rc = main(["feedback-sim", "--trials", "2", "--min-refs", "3",
                   "--year-lo", "1995", "--year-hi", "2005",
                   "--target-distance", "3",
                   "--data-dir", str(corpus), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == ["mode", "trials", "mean_pages", "reduction_pct"]
        assert [r[0] for r in rows[1:]] == ["none", "positive", "negative", "both"]

    def test_venue_exp_csv(self, corpus_dir, tmp_path):
        out = tmp_path / "v.csv"
        rc = main(["venue-exp", "--algos", "darwr", "--trials", "4",
                   "--min-refs", "3", "--data-dir", str(corpus_dir),
                   "--out", str(out)])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == ["method", "metric", "value"]
        assert {r[0] for r in rows[1:]} == {"darwr", "baseline1", "baseline2"}

    def test_reviewer_exp(self, corpus_dir, capsys):
        rc = main(["reviewer-exp", "--algos", "darwr", "--trials", "3",
                   "--min-refs", "3", "--data-dir", str(corpus_dir)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "any@25" in out and "all@25" in out

    def test_missing_data_dir(self, capsys, monkeypatch):
        monkeypatch.delenv("ADVISOR_DATA_DIR", raising=False)
        rc = main(["scenario", "--kind", "hide_random"])
        assert rc == 2
        assert "ADVISOR_DATA_DIR" in capsys.readouterr().err

    def test_env_var_fallback(self, corpus_dir, capsys, monkeypatch):
        monkeypatch.setenv("ADVISOR_DATA_DIR", str(corpus_dir))
        rc = main(["scenario", "--kind", "hide_random", "--algo", "cocitation",
                   "--trials", "2", "--min-refs", "5",
                   "--year-lo", "1995", "--year-hi", "2005"])
        assert rc == 0
