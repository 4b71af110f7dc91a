"""
Tests for the command-line interface
"""

import csv
import json

import pytest

from analysis.statistics import InsufficientData
from cli.commands import EXIT_CONFIG, EXIT_MISMATCH, EXIT_OK
from cli.main import main
from cli.scenario import ScenarioError, load_scenario, merge


def read_json(path):
    return json.loads(path.read_text())


class TestRun:
    """msqkd run"""

    def test_honest_run(self, tmp_path):
        out = tmp_path / "run.json"
        assert main(["run", "--rounds", "800", "--seed", "1", "--out", str(out)]) == EXIT_OK
        summary = read_json(out)
        assert summary["aborted"] is False
        assert summary["rounds"] == 800
        assert summary["efficiency_expected"] == pytest.approx(0.125)
        assert sum(summary["case_counts"]) + summary["undefined_count"] == 800

    def test_deterministic_output(self, tmp_path):
        """Same seed, same bytes"""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        args = ["run", "--rounds", "300", "--seed", "7", "--include-keys"]
        assert main(args + ["--out", str(first)]) == EXIT_OK
        assert main(args + ["--out", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        assert read_json(first)["raw_key_alice"] == read_json(first)["raw_key_bob"]

    def test_attack_aborts(self, tmp_path):
        """A detected attack ends the run with exit code 2"""
        out = tmp_path / "run.json"
        code = main(["run", "--rounds", "400", "--strategy", "z-measure", "--out", str(out)])
        assert code == EXIT_MISMATCH
        assert read_json(out)["aborted"] is True

    def test_zero_rounds(self, tmp_path):
        assert main(["run", "--rounds", "0", "--out", str(tmp_path / "x.json")]) == EXIT_CONFIG

    def test_unknown_strategy(self, tmp_path):
        assert main(["run", "--strategy", "nope", "--out", str(tmp_path / "x.json")]) == EXIT_CONFIG

    def test_transcript_log(self, tmp_path):
        log = tmp_path / "rounds.jsonl"
        code = main(["run", "--rounds", "50", "--transcript-log", str(log), "--out", str(tmp_path / "x.json")])
        assert code == EXIT_OK
        assert len(log.read_text().splitlines()) == 50

    def test_csv(self, tmp_path):
        out = tmp_path / "run.csv"
        assert main(["run", "--rounds", "100", "--format", "csv", "--out", str(out)]) == EXIT_OK
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["metric", "value"]
        assert ["rounds", "100"] in rows


class TestAttackAndSweep:
    """msqkd attack and msqkd sweep"""

    def test_attack_report(self, tmp_path):
        out = tmp_path / "attack.json"
        code = main(["attack", "--strategy", "faked-bell-bell", "--rounds", "2000",
                     "--n-values", "1", "4", "--out", str(out)])
        assert code == EXIT_OK
        report = read_json(out)
        assert report["per_round_detection"] == pytest.approx(3 / 8)
        assert [g["n"] for g in report["grouped"]] == [1, 4]

    def test_attack_needs_attack(self, tmp_path):
        code = main(["attack", "--strategy", "honest", "--rounds", "100", "--out", str(tmp_path / "a.json")])
        assert code == EXIT_CONFIG

    def test_angle_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--angles", "0", "0.7853981633974483", "--n-values", "1", "16",
                     "--rounds", "10", "--format", "csv", "--out", str(out)])
        assert code == EXIT_OK
        rows = list(csv.DictReader(out.open()))
        assert float(rows[0]["per_round"]) == pytest.approx(0.25)
        assert float(rows[0]["N=16"]) == pytest.approx(0.98997, abs=1e-5)
        assert float(rows[1]["per_round"]) == pytest.approx(0.0, abs=1e-12)

    def test_strategy_sweep(self, tmp_path):
        out = tmp_path / "sweep.json"
        code = main(["sweep", "--strategy", "z-measure", "--rounds", "1600",
                     "--n-values", "1", "4", "16", "--out", str(out)])
        assert code == EXIT_OK
        curve = read_json(out)["curve"]
        assert [c["analytic"] for c in curve] == pytest.approx([0.25, 1 - 0.75 ** 4, 1 - 0.75 ** 16])

    def test_sweep_invalid_n(self, tmp_path):
        code = main(["sweep", "--n-values", "0", "--rounds", "10", "--out", str(tmp_path / "s.json")])
        assert code == EXIT_CONFIG


class TestVerifyAndList:
    """msqkd verify and msqkd list"""

    def test_verify_passes(self, tmp_path):
        out = tmp_path / "verify.json"
        assert main(["verify", "--rounds", "2000", "--out", str(out)]) == EXIT_OK
        document = read_json(out)
        assert document["passed"] is True
        checks = {row["check"] for row in document["checks"]}
        assert "case 1 weight" in checks
        assert "breidbart oracle detection" in checks

    def test_verify_negative_control(self, tmp_path):
        """Shifted expectations must fail"""
        out = tmp_path / "verify.json"
        code = main(["verify", "--rounds", "2000", "--perturb-expected", "--out", str(out)])
        assert code == EXIT_MISMATCH
        assert read_json(out)["passed"] is False

    def test_verify_seed_from_environment(self, tmp_path, monkeypatch):
        """MSQKD_SEED takes precedence over the registry's verify seed"""
        monkeypatch.setenv("MSQKD_SEED", "7")
        out = tmp_path / "verify.json"
        code = main(["verify", "--rounds", "1000", "--out", str(out)])
        assert code in (EXIT_OK, EXIT_MISMATCH)
        assert read_json(out)["seed"] == 7

    def test_verify_explicit_seed_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MSQKD_SEED", "7")
        out = tmp_path / "verify.json"
        main(["verify", "--rounds", "1000", "--seed", "3", "--out", str(out)])
        assert read_json(out)["seed"] == 3

    def test_verify_registry_seed_without_environment(self, tmp_path, monkeypatch):
        monkeypatch.delenv("MSQKD_SEED", raising=False)
        out = tmp_path / "verify.json"
        main(["verify", "--rounds", "1000", "--out", str(out)])
        assert read_json(out)["seed"] == 42

    def test_verify_insufficient_data(self, tmp_path, monkeypatch):
        """Too little data for a check is a usage error, not a crash"""
        def too_small(*args, **kwargs):
            raise InsufficientData("no complete group")

        monkeypatch.setattr("cli.commands.verification_rows", too_small)
        assert main(["verify", "--rounds", "10", "--out", str(tmp_path / "verify.json")]) == EXIT_CONFIG

    def test_list(self, tmp_path):
        out = tmp_path / "list.json"
        assert main(["list", "--out", str(out)]) == EXIT_OK
        names = [s["name"] for s in read_json(out)["strategies"]]
        assert "breidbart" in names


class TestScenario:
    """Scenario files and overrides"""

    def test_invalid_field(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({"protocol": {"bogus": 1}}))
        assert main(["run", "--config", str(path)]) == EXIT_CONFIG

    def test_invalid_probability(self, tmp_path):
        """Error messages name the offending field"""
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({"protocol": {"p_alice_mh": 1.5}}))
        with pytest.raises(ScenarioError, match="protocol.p_alice_mh"):
            load_scenario(path)

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({"protocol": {"rounds": 5, "master_seed": 3}, "strategy": "breidbart"}))
        scenario = load_scenario(path, {"protocol": {"rounds": 9, "master_seed": None}})
        assert scenario.rounds == 9
        assert scenario.seed == 3
        assert scenario.strategy == "breidbart"

    def test_inline_strategy(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({"strategy": {"kind": "faked-single", "prep": 1, "tp_basis": "X"}}))
        assert load_scenario(path).build_strategy().prep == 1

    def test_merge_missing_section(self):
        assert merge({}, {"output": {"path": "x", "format": None}}) == {"output": {"path": "x"}}

    def test_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["run", "--rounds", "many"])
        assert excinfo.value.code == EXIT_CONFIG
