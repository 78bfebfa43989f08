"""Command-line golden tests: exit codes and JSON output."""

import json
from fractions import Fraction

import pytest

from helpers import write_dataset
from src.cli import run
from src.model import load_dataset


def _invoke(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestInspection:
    def test_validate(self, capsys, example_json):
        code, body = _invoke(capsys, "validate", example_json)

        assert code == 0
        assert body["states"] == ["s1", "s2"]
        assert [row["corner_state"] for row in body["observations"]] == ["s1", "s2", "s2"]

    def test_corners_flags_diversified_data(self, capsys, tmp_path):
        path = write_dataset(tmp_path / "mixed.json", [((1, 4), (100, 0)), ((1, 1), (2, 3))])

        code, body = _invoke(capsys, "corners", path)

        assert code == 1
        assert body["all_corners"] is False

    def test_missing_file(self, capsys, tmp_path):
        assert run(["garp", str(tmp_path / "missing.json")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")

        assert run(["validate", str(path)]) == 2

    def test_malformed_states(self, capsys, tmp_path):
        path = tmp_path / "states.json"
        path.write_text(json.dumps({"states": 5, "observations": [{"prices": ["1", "4"], "demand": ["100", "0"]}]}))

        assert run(["validate", str(path)]) == 2
        assert "'states'" in capsys.readouterr().err

    def test_invalid_dataset(self, capsys, tmp_path):
        path = write_dataset(tmp_path / "bad.json", [((0, 1), (1, 0))])

        assert run(["validate", path]) == 2
        assert "state 1" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert run(["explain"]) == 2


class TestAxiomCommands:
    def test_garp_pass(self, capsys, example_json):
        assert _invoke(capsys, "garp", example_json) == (0, {"axiom": "garp", "verdict": "pass"})

    def test_garp_fail(self, capsys, tmp_path):
        path = write_dataset(tmp_path / "garp.json", [((1, 1), (3, 0)), ((1, 4), (0, 2))])

        code, body = _invoke(capsys, "garp", path)

        assert code == 1
        assert body == {"axiom": "garp", "verdict": "fail", "cycle": [1, 2]}

    def test_sarseu_with_lp_oracle(self, capsys, example_json):
        code, body = _invoke(capsys, "sarseu", example_json, "--lp-oracle")

        assert code == 0
        assert body["verdict"] == "pass"
        assert body["lp_oracle"]["agrees"] is True

    def test_sarseu_fail(self, capsys, tmp_path):
        path = write_dataset(tmp_path / "sarseu.json", [((3, 1), (2, 1)), ((1, 1), (1, 2))])

        code, body = _invoke(capsys, "sarseu", path)

        assert code == 1
        assert body["sequence"] == [[1, 1, 1, 2], [2, 2, 2, 1]]
        assert body["product"] == "3/1"

    def test_sarseu_inconclusive(self, capsys, tmp_path):
        a, b = Fraction(11, 10), Fraction(2)
        pairs = [((a, 1, b), (2, 1, 1)), ((b, a, 1), (1, 2, 1)), ((1, b, a), (1, 1, 2))]
        path = write_dataset(tmp_path / "long.json", pairs)

        code, body = _invoke(capsys, "sarseu", path, "--max-pairs", 2)

        assert code == 1
        assert body["verdict"] == "inconclusive"
        assert body["message"].startswith("inconclusive at bound")


class TestBeliefCommands:
    def test_beliefs_found(self, capsys, example_json):
        code, body = _invoke(capsys, "beliefs", example_json)

        assert code == 0
        assert body["pi"] == ["1/2", "1/2"]

    def test_conflicting_corners(self, capsys, conflicting_json):
        code, body = _invoke(capsys, "beliefs", conflicting_json, "--strict")

        assert code == 1
        assert body["feasible"] is False
        assert len(body["witness"]) == 2
        assert {w["observation"] for w in body["witness"]} == {1, 2}

    def test_solve_single_family(self, capsys, example_json):
        code, body = _invoke(capsys, "solve", example_json, "--pi", "1/4,3/4", "--family", "quadratic")

        assert code == 0
        assert body["region"]["upper"] == "1/800"
        assert body["binding_observation"] == 1

    def test_solve_all_families(self, capsys, example_json):
        code, body = _invoke(capsys, "solve", example_json, "--pi", "1/4,3/4", "--family", "all")

        assert code == 0
        assert body["crra"]["reason"] == "infinite marginal utility at zero"
        assert body["linear"]["region"]["type"] == "all"

    def test_solve_with_fixed_alpha(self, capsys, example_json):
        code, body = _invoke(
            capsys, "solve", example_json, "--pi", "1/4,3/4", "--family", "shifted_power", "--fix", "alpha=1/2"
        )

        assert code == 0
        assert body["region"]["lower"] == "900/7"

    def test_solve_all_families_with_fixed_alpha(self, capsys, example_json):
        code, body = _invoke(
            capsys, "solve", example_json, "--pi", "1/4,3/4", "--family", "all", "--fix", "alpha=1/2"
        )

        assert code == 0
        assert body["shifted_power"]["region"]["parameter"] == "c"
        assert body["shifted_power"]["region"]["lower"] == "900/7"
        assert body["shifted_power"]["fixed"] == {"alpha": 0.5}

    def test_unknown_family(self, capsys, example_json):
        assert run(["solve", example_json, "--pi", "1/4,3/4", "--family", "logarithmic"]) == 2

    def test_bad_beliefs(self, capsys, example_json):
        assert run(["solve", example_json, "--pi", "1/2,1/3", "--family", "cara"]) == 2


class TestVerify:
    def test_valid_certificate(self, capsys, example_json):
        code, body = _invoke(
            capsys, "verify", example_json, "--pi", "1/4,3/4", "--family", "cara", "--params", "beta=0.002",
            "--grid", 500,
        )

        assert code == 0
        assert body["valid"] is True

    def test_invalid_certificate(self, capsys, example_json):
        code, body = _invoke(
            capsys, "verify", example_json, "--pi", "1/4,3/4", "--family", "cara", "--params", "beta=0.01",
            "--grid", 500,
        )

        assert code == 1
        assert [o["valid"] for o in body["observations"]] == [False, True, True]

    def test_bad_parameter(self, capsys, example_json):
        assert run(["verify", example_json, "--pi", "1/4,3/4", "--family", "cara", "--params", "beta=-1"]) == 2


class TestSynth:
    def test_random_corners_to_stdout(self, capsys):
        code, body = _invoke(capsys, "synth", "--pi", "1/4,3/4", "--family", "linear", "--random-corners", 5)

        assert code == 0
        assert len(body["observations"]) == 5

    def test_budget_file_to_dataset_file(self, capsys, tmp_path):
        budgets = tmp_path / "budgets.json"
        budgets.write_text(json.dumps({"budgets": [{"prices": ["1", "4"], "wealth": "100"}]}))
        out = tmp_path / "synth.json"

        code, body = _invoke(
            capsys, "synth", "--pi", "1/4,3/4", "--family", "linear", "--budgets", budgets, "--out", out
        )

        assert code == 0
        assert body == {"dataset": str(out), "observations": 1}
        assert load_dataset(str(out)).observations[0].demand == (Fraction(100), Fraction(0))

    def test_malformed_budgets(self, capsys, tmp_path):
        budgets = tmp_path / "budgets.json"
        budgets.write_text(json.dumps([{"prices": ["1", "4"]}]))

        assert run(["synth", "--pi", "1/4,3/4", "--family", "linear", "--budgets", str(budgets)]) == 2

    def test_same_seed_same_dataset(self, capsys):
        argv = ["synth", "--pi", "1/4,3/4", "--family", "linear", "--random-corners", 3]

        assert _invoke(capsys, *argv) == _invoke(capsys, *argv)


class TestReport:
    @pytest.fixture(autouse=True)
    def _work_in_tmp(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)

    def test_example_report(self, capsys, example_json):
        code, body = _invoke(capsys, "report", example_json, "--grid", 200)

        assert code == 0
        assert body["verdict"] == "pass"
        assert body["beliefs"]["pi"] == ["1/2", "1/2"]

    def test_report_is_deterministic(self, capsys, example_json):
        run(["report", example_json, "--pi", "1/4,3/4", "--grid", "200"])
        first = capsys.readouterr().out
        run(["report", example_json, "--pi", "1/4,3/4", "--grid", "200"])

        assert capsys.readouterr().out == first

    def test_report_with_plots(self, capsys, example_json, tmp_path):
        code, _ = _invoke(capsys, "report", example_json, "--grid", 200, "--out", tmp_path / "plots")

        assert code == 0
        assert (tmp_path / "plots" / "linear.csv").exists()

    def test_plots_written_by_default(self, capsys, example_json, tmp_path):
        code, _ = _invoke(capsys, "report", example_json, "--grid", 200)

        assert code == 0
        assert (tmp_path / "reports" / "plots" / "linear.csv").exists()
        assert (tmp_path / "reports" / "plots" / "cara.svg").exists()

    def test_report_with_fixed_alpha(self, capsys, example_json):
        code, body = _invoke(capsys, "report", example_json, "--pi", "1/4,3/4", "--grid", 200, "--fix", "alpha=1/2")

        shifted = body["families"]["shifted_power"]
        assert code == 0
        assert shifted["region"]["lower"] == "900/7"
        assert shifted["fixed"] == {"alpha": 0.5}

    def test_conflicting_report_fails(self, capsys, conflicting_json):
        code, body = _invoke(capsys, "report", conflicting_json, "--grid", 200)

        assert code == 1
        assert body["verdict"] == "fail"


class TestPlotData:
    def test_writes_csv_and_svg(self, capsys, example_json, tmp_path):
        code, body = _invoke(
            capsys, "plot-data", example_json, "--pi", "1/4,3/4", "--family", "cara", "--params", "beta=0.002",
            "--points", 30, "--out", tmp_path,
        )

        assert code == 0
        assert body["csv"].endswith("cara.csv")
        assert (tmp_path / "cara.svg").exists()
        assert body["rows"] > 90

    def test_three_states_rejected(self, capsys, tmp_path):
        path = write_dataset(tmp_path / "three.json", [((1, 1, 1), (3, 0, 0))])

        assert run(["plot-data", path, "--pi", "1/3,1/3,1/3", "--family", "linear", "--out", str(tmp_path)]) == 2
