"""End-to-end command-line behavior: exit codes, report schemas, and
byte-level determinism of emitted files."""

import json
from importlib import resources

import pytest

from steerlab import __version__
from steerlab.cli import main

TILTED = resources.files("steerlab") / "data" / "tilted_ensembles.json"
SPIN_PAIR = resources.files("steerlab") / "data" / "spin_pair_ensembles.json"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestUsage:
    def test_no_subcommand_is_usage_error(self, capsys):
        code, _, _ = run(capsys, )
        assert code == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "verify", "--frobnicate")
        assert code == 2

    def test_version_flag(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0
        assert __version__ in out


class TestVerify:
    def test_passes_and_writes_report(self, capsys, tmp_path):
        out = tmp_path / "verify.json"
        code, text, _ = run(capsys, "verify", "--out", str(out))
        assert code == 0
        assert text.count("PASS") == 6  # five identities + the summary line
        doc = json.loads(out.read_text())
        assert doc["command"] == "verify"
        assert doc["version"] == __version__
        assert doc["passed"] is True
        assert doc["config"] == {"tol": 1e-9, "seed": 0, "sweep": 100}
        assert len(doc["identities"]) == 5

    def test_impossible_tolerance_fails(self, capsys):
        code, text, _ = run(capsys, "verify", "--tol", "1e-30")
        assert code == 1
        assert "FAIL" in text

    def test_stdout_report_when_no_out(self, capsys):
        code, text, _ = run(capsys, "verify")
        assert code == 0
        json_start = text.index("{")
        doc = json.loads(text[json_start:])
        assert doc["passed"] is True


class TestGhjw:
    def test_bundled_tilted_config(self, capsys, tmp_path):
        out = tmp_path / "ghjw.json"
        code, text, _ = run(capsys, "ghjw", "--config", str(TILTED), "--out", str(out))
        assert code == 0
        assert "PASS candidate 0" in text and "PASS candidate 1" in text
        doc = json.loads(out.read_text())
        assert doc["all_valid"] is True
        assert doc["dim_bob"] == 2
        assert {row["label"] for row in doc["candidates"][0]["outcome_table"]} == {0, 1}

    def test_bundled_spin_pair_config(self, capsys, tmp_path):
        out = tmp_path / "ghjw2.json"
        code, _, _ = run(
            capsys, "ghjw", "--config", str(SPIN_PAIR), "--out", str(out)
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["all_valid"] is True
        assert doc["dim_bob"] == 4
        for cand in doc["candidates"]:
            assert len(cand["outcome_table"]) == 4
            for row in cand["outcome_table"]:
                assert row["probability"] == pytest.approx(0.25, abs=1e-9)
                assert row["fidelity"] == pytest.approx(1.0, abs=1e-9)

    def test_malformed_weight_is_candidate_failure(self, capsys, tmp_path):
        doc = json.loads(TILTED.read_text())
        doc["ensembles"][1][0]["weight"] = 0.4  # candidate now sums to 0.9
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        code, text, _ = run(capsys, "ghjw", "--config", str(bad))
        assert code == 1
        assert "FAIL candidate 1" in text
        assert "PASS candidate 0" in text

    def test_structural_garbage_is_config_error(self, capsys, tmp_path):
        doc = json.loads(TILTED.read_text())
        doc["ensembles"][0][0]["state"] = "garbage"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        code, _, err = run(capsys, "ghjw", "--config", str(bad))
        assert code == 2
        assert "config error" in err

    def test_missing_file_is_config_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "ghjw", "--config", str(tmp_path / "nope.json"))
        assert code == 2
        assert "config error" in err

    def test_density_and_from_first_are_exclusive(self, capsys, tmp_path):
        doc = json.loads(TILTED.read_text())
        doc["from_first_ensemble"] = True
        bad = tmp_path / "both.json"
        bad.write_text(json.dumps(doc))
        code, _, err = run(capsys, "ghjw", "--config", str(bad))
        assert code == 2
        assert "exactly one" in err

    def test_report_is_byte_identical_across_runs(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "ghjw", "--config", str(TILTED), "--out", str(a))
        run(capsys, "ghjw", "--config", str(TILTED), "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestPhotonTrick:
    def test_defaults_pass(self, capsys, tmp_path):
        out = tmp_path / "pt.json"
        code, text, _ = run(
            capsys, "photon-trick", "--pairs", "5000", "--stat-tol", "0.05",
            "--out", str(out),
        )
        assert code == 0
        assert "steering_match_rate" in text
        doc = json.loads(out.read_text())
        assert doc["command"] == "photon-trick"
        assert doc["backend"] in {"numba", "numpy"}
        assert doc["match_rate"] == 1.0
        assert doc["config"]["p"] == 0.7

    def test_p_out_of_range_is_config_error(self, capsys):
        code, _, err = run(capsys, "photon-trick", "--p", "1.5")
        assert code == 2
        assert "invalid configuration" in err

    def test_csv_format_streams_transcript(self, capsys, tmp_path):
        out = tmp_path / "pt.csv"
        extra = tmp_path / "extra.csv"
        code, _, _ = run(
            capsys, "photon-trick", "--pairs", "200", "--stat-tol", "0.2",
            "--format", "csv", "--out", str(out), "--transcript", str(extra),
        )
        assert code == 0
        assert out.read_bytes() == extra.read_bytes()
        header = out.read_text().splitlines()[0]
        assert header == "pair_id,bob_outcome,bob_prediction,alice_outcome,match"


class TestFable:
    def test_conflicting_config_is_usage_error(self, capsys):
        code, _, err = run(capsys, "fable", "--prep", "direct1", "--strategy", "case2")
        assert code == 2
        assert "invalid configuration" in err

    def test_small_run_with_loose_tolerance(self, capsys, tmp_path):
        out = tmp_path / "fable.json"
        code, text, _ = run(
            capsys, "fable", "--pairs", "2000", "--stat-tol", "0.1",
            "--out", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["command"] == "fable"
        assert doc["schema"] == "fable-v1"
        assert doc["config"]["preparation"] == "quartet"
        assert doc["n_pairs"] == 2000
        assert doc["zz_prediction_match_rate"] == 1.0

    def test_failed_claims_exit_one(self, capsys):
        """A tolerance tighter than Monte Carlo noise must fail honestly."""
        code, text, _ = run(
            capsys, "fable", "--pairs", "500", "--stat-tol", "0.001"
        )
        assert code == 1
        assert "FAIL" in text

    def test_seeded_outputs_byte_identical(self, capsys, tmp_path):
        files = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.json"
            csvp = tmp_path / f"{name}.csv"
            code, _, _ = run(
                capsys, "fable", "--prep", "quartet", "--strategy", "case2",
                "--ordering", "last", "--pairs", "3000", "--seed", "7",
                "--stat-tol", "0.1", "--out", str(out), "--transcript", str(csvp),
            )
            assert code == 0
            files.append((out.read_bytes(), csvp.read_bytes()))
        assert files[0] == files[1]

    def test_different_seeds_differ(self, capsys, tmp_path):
        outs = []
        for seed in ("1", "2"):
            out = tmp_path / f"s{seed}.csv"
            run(
                capsys, "fable", "--pairs", "500", "--seed", seed,
                "--stat-tol", "0.5", "--format", "csv", "--out", str(out),
            )
            outs.append(out.read_bytes())
        assert outs[0] != outs[1]
