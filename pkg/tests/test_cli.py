"""CLI flows: training, simulation, experiments, reports."""

import json

import pytest

from gazeassist import corpus
from gazeassist.cli import ConfigError, main, parse_run_config


def run_cli(*argv):
    return main(list(argv))


class TestTrain:
    def test_synthetic_corpus_train(self, tmp_path, capsys):
        out = tmp_path / "model.json"
        rc = run_cli("train", "--synthetic", "--seed", "7", "--out", str(out))
        assert rc == 0
        assert out.exists()
        text = capsys.readouterr().out
        assert "held-out accuracy" in text
        acc = float(text.split("held-out accuracy:")[1].split()[0])
        assert acc >= 0.9

    def test_csv_corpus_train(self, tmp_path):
        gaze_path = tmp_path / "gaze.csv"
        events_path = tmp_path / "events.csv"
        corpus.write_synthetic_corpus(gaze_path, events_path, n_confirm=20, seed=3)
        out = tmp_path / "model.json"
        rc = run_cli("train", "--corpus", str(gaze_path), str(events_path),
                     "--seed", "3", "--out", str(out))
        assert rc == 0
        doc = json.loads(out.read_text())
        assert set(doc["classes"]) == {"intent", "no_intent"}

    def test_seeded_training_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli("train", "--synthetic", "--seed", "7", "--out", str(a)) == 0
        assert run_cli("train", "--synthetic", "--seed", "7", "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unparseable_csv_fails_with_line(self, tmp_path, capsys):
        gaze_path = tmp_path / "gaze.csv"
        gaze_path.write_text("t,x,y,valid\n0.0,1,2,1\nnot-a-number,3,4,1\n")
        events_path = tmp_path / "events.csv"
        corpus.write_events_csv(events_path, [corpus.ConfirmEvent(2.0)])
        rc = run_cli("train", "--corpus", str(gaze_path), str(events_path))
        assert rc == 1
        assert ":3:" in capsys.readouterr().err  # line diagnostic

    def test_missing_class_fails(self, tmp_path, capsys):
        # a recording with no confirmations has no intent windows
        gaze_path = tmp_path / "gaze.csv"
        events_path = tmp_path / "events.csv"
        import numpy as np

        from gazeassist.gaze import write_gaze_csv

        rng = np.random.default_rng(0)
        write_gaze_csv(gaze_path, corpus.scanning_stream(rng, 0.0, 20.0))
        corpus.write_events_csv(events_path, [])
        rc = run_cli("train", "--corpus", str(gaze_path), str(events_path))
        assert rc == 1
        assert "class absent" in capsys.readouterr().err


class TestSimulate:
    def test_single_trial(self, tmp_path, capsys):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({
            "task": "grasping",
            "mode": {"kind": "guidance_force", "intent_adjusted": True},
            "seed": 5,
        }))
        rc = run_cli("simulate", "--config", str(cfg), "--out", str(tmp_path / "run"))
        assert rc == 0
        assert (tmp_path / "run" / "trial_0000.jsonl").exists()
        assert "grasping/guidance_force" in capsys.readouterr().out


class TestExperiment:
    @pytest.fixture()
    def exp_config(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({
            "cells": "table3",
            "n_trials": 1,
            "seed": 3,
            "timeout": 20.0,
        }))
        return cfg

    def test_table3_grid_counts(self, tmp_path, exp_config, capsys):
        out = tmp_path / "exp_out"
        rc = run_cli("experiment", "--config", str(exp_config), "--out", str(out))
        assert rc == 0
        logs = sorted(out.glob("trial_*.jsonl"))
        assert len(logs) == 6
        report = json.loads((out / "report.json").read_text())
        assert len(report["conditions"]) == 6
        for cond in report["conditions"]:
            assert {"point", "ci_low", "ci_high"} <= set(cond["success_rate"])

    def test_rerun_same_seed_identical_report(self, tmp_path, exp_config):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert run_cli("experiment", "--config", str(exp_config), "--out", str(out1)) == 0
        assert run_cli("experiment", "--config", str(exp_config), "--out", str(out2)) == 0
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()

    def test_unknown_field_reports_path(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"n_trials": 1, "cellz": []}))
        rc = run_cli("experiment", "--config", str(cfg))
        assert rc == 2
        assert "$.cellz" in capsys.readouterr().err

    def test_bad_cell_reports_indexed_path(self):
        with pytest.raises(ConfigError, match=r"\$\.cells\[0\]\.task"):
            parse_run_config({"cells": [{"task": "flying"}]})


class TestReport:
    def test_table2_fixture(self, capsys):
        rc = run_cli("report", "--fixture", "table2")
        assert rc == 0
        out = capsys.readouterr().out
        assert "58.75" in out and "54.12" in out
        assert "set(s) 2, 6, 7" in out
        assert "set(s) 5" in out

    def test_logs_report(self, tmp_path, capsys):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"cells": [
            {"task": "grasping", "mode": {"kind": "none"}},
        ], "n_trials": 3, "seed": 2, "timeout": 20.0}))
        out = tmp_path / "out"
        assert run_cli("experiment", "--config", str(cfg), "--out", str(out)) == 0
        capsys.readouterr()
        rc = run_cli("report", "--logs", str(out))
        assert rc == 0
        assert "grasping/none" in capsys.readouterr().out

    def test_empty_logs_error(self, tmp_path, capsys):
        rc = run_cli("report", "--logs", str(tmp_path))
        assert rc == 1
        assert "no trials" in capsys.readouterr().err

    def test_single_trial_degenerate_warning(self, tmp_path, capsys):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"cells": [
            {"task": "grasping", "mode": {"kind": "none"}},
        ], "n_trials": 1, "seed": 2, "timeout": 20.0}))
        out = tmp_path / "out"
        assert run_cli("experiment", "--config", str(cfg), "--out", str(out)) == 0
        capsys.readouterr()
        rc = run_cli("report", "--logs", str(out))
        assert rc == 0
        assert "degenerate" in capsys.readouterr().err

    def test_mixed_schema_logs_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(json.dumps({"schema": "weird/9"}) + "\n")
        rc = run_cli("report", "--logs", str(bad))
        assert rc == 1
        assert "schema" in capsys.readouterr().err
