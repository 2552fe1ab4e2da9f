import json
from pathlib import Path

import pytest

from qhd_system.cli.commands import parse_args
from qhd_system.core.sweep import SWEEP_COLUMNS
from qhd_system.main import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
EXAMPLE_FLAGS = ["--resource-value", "50", "--injury-cost", "-100", "--display-cost", "-10"]


def _config(name: str) -> str:
    return str(CONFIG_DIR / f"{name}.conf")


def test_parse_args_defaults():
    args = parse_args(["verify"])
    assert args.command == "verify"
    assert args.trials == 1000 and args.seed == 42
    assert args.format is None and not args.profile


class TestClassical:

    def test_text_report(self, capsys):
        assert main(["classical"] + EXAMPLE_FLAGS) == 0
        out = capsys.readouterr().out
        assert "mixed ESS h = 0.5833333333333" in out
        assert "(-25, -25)" in out and "(50, 0)" in out
        assert "Hawk: not-ESS" in out

    def test_csv(self, capsys):
        assert main(["classical", "--config", _config("classical"), "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "row_strategy,col_strategy,row_payoff,col_payoff"
        assert lines[1] == "hawk,hawk,-25,-25"
        assert lines[2] == "hawk,dove,50,0"

    def test_json(self, capsys):
        assert main(["classical", "--format", "json"] + EXAMPLE_FLAGS) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["matrix"][1][1] == [15.0, 15.0]
        assert document["mixed"]["stable"] is True

    def test_signs_are_strict_by_default(self, capsys):
        flags = ["--resource-value", "50", "--injury-cost", "100", "--display-cost", "-10"]
        assert main(["classical"] + flags) == 2
        assert "injury_cost" in capsys.readouterr().err
        assert main(["classical", "--no-strict-signs"] + flags) == 0

    def test_config_sign_setting_is_respected(self, tmp_path, capsys):
        path = tmp_path / "signs.conf"
        game = "[game]\nresource_value = 50\ninjury_cost = 10\ndisplay_cost = -10\n"
        path.write_text(game + "strict_signs = false\n")
        assert main(["classical", "--config", str(path)]) == 0
        assert main(["classical", "--config", str(path), "--strict-signs"]) == 2

        path.write_text(game)
        assert main(["classical", "--config", str(path)]) == 2
        assert "injury_cost" in capsys.readouterr().err


class TestAnalyze:

    def test_mixed_ess(self, capsys):
        assert main(["analyze", "--config", _config("symmetric_case3"), "--tactics", "0.5833333333333333",
                     "0.5833333333333333"]) == 0
        out = capsys.readouterr().out
        assert "Game kind: symmetric" in out
        assert "interior NE (0.583333333333, 0.583333333333), ESS=true [ESS], payoff 8.75 / 8.75" in out
        assert "Strict NE conditions on the state:" in out

    def test_moduli_flag_overrides_config(self, capsys):
        assert main(["analyze", "--config", _config("symmetric_case3"), "--moduli", "0.0625", "0.25",
                     "0.5625", "0.125", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["game_kind"] == "asymmetric"
        assert document["state"]["c2"] == 0.5625
        origin = document["corner_conditions"]["(0, 0)"]
        assert [c["holds"] for c in origin] == [True, True]
        ess = [c for c in document["candidates"] if c["ess"]]
        assert (0.0, 0.0) in [(c["p_star"], c["q_star"]) for c in ess]

    def test_csv_rows(self, capsys):
        assert main(["analyze", "--config", _config("asymmetric_case2"), "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "kind,p_star,q_star,ne_status,ess_status,ess,payoff_A,payoff_B"
        assert any(line.startswith("corner,1,1,strict-NE,ESS,true,") for line in lines)
        assert any(line.startswith("interior,") and ",NE,not-ESS,false," in line for line in lines)

    def test_unnormalized_moduli(self, capsys):
        assert main(["analyze", "--moduli", "0.5", "0.5", "0.5", "0"] + EXAMPLE_FLAGS) == 2
        assert "Error:" in capsys.readouterr().err

    @pytest.mark.parametrize("tol", ["nan", "inf", "0", "-1e-9"])
    def test_tolerance_must_be_finite_and_positive(self, tol, capsys):
        assert main(["analyze", "--config", _config("symmetric_case3"), f"--tol={tol}"]) == 2
        assert "--tol" in capsys.readouterr().err


class TestSweep:

    def test_csv_grid(self, capsys):
        assert main(["sweep", "--resolution", "3"] + EXAMPLE_FLAGS) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(SWEEP_COLUMNS)
        # (a2, c2) in {0, 0.5, 1}^2 with a2 + c2 <= 1
        assert len(lines) == 1 + 6
        assert lines[1].startswith("0,0.5,0,0.5,")

    def test_deterministic_across_workers(self, capsys):
        assert main(["sweep", "--config", _config("sweep"), "--resolution", "5"]) == 0
        serial = capsys.readouterr().out
        assert main(["sweep", "--config", _config("sweep"), "--resolution", "5", "--workers", "2"]) == 0
        assert capsys.readouterr().out == serial

    def test_json(self, capsys):
        assert main(["sweep", "--resolution", "2", "--axes", "b2", "d2", "--format", "json"] + EXAMPLE_FLAGS) == 0
        cells = json.loads(capsys.readouterr().out)
        assert len(cells) == 3
        assert set(cells[0]) == set(SWEEP_COLUMNS)

    def test_same_axis_twice(self, capsys):
        assert main(["sweep", "--axes", "a2", "a2"] + EXAMPLE_FLAGS) == 2


class TestSimulate:

    def test_mixed_ess_run(self, capsys):
        assert main(["simulate", "--config", _config("symmetric_case3")]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "generation,share"
        assert lines[1] == "0,0.01"
        assert lines[-1] == "# verdict: mutant-extinct"

    def test_text_report(self, capsys):
        assert main(["simulate", "--config", _config("symmetric_case3"), "--format", "text"]) == 0
        out = capsys.readouterr().out
        assert "Verdict: mutant-extinct (certified)" in out
        assert "Invasion barrier: 1" in out

    def test_classical_coexistence(self, capsys):
        assert main(["simulate", "--config", _config("classical"), "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["verdict"] == "coexistence"
        assert document["shares"][-1] == pytest.approx(5 / 12, abs=1e-9)
        assert document["invasion_barrier"] is None

    def test_role_populations(self, capsys):
        assert main(["simulate", "--config", _config("asymmetric_case1")]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "generation,row_share,col_share"
        assert lines[-1] == "# verdict: mutant-extinct"

    def test_flags_override_config(self, capsys):
        assert main(["simulate", "--config", _config("symmetric_case3"), "--no-certify",
                     "--generations", "20", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["verdict"] == "max-generations-reached"
        assert len(document["shares"]) == 21

    def test_three_values_rejected(self, capsys):
        assert main(["simulate", "--incumbent", "0.1", "0.2", "0.3"] + EXAMPLE_FLAGS) == 2

    def test_same_strategy_rejected(self, capsys):
        assert main(["simulate", "--incumbent", "0.5", "--mutant", "0.5"] + EXAMPLE_FLAGS) == 2

    def test_symmetric_game_takes_one_strategy(self, capsys):
        assert main(["simulate", "--config", _config("symmetric_case3"), "--incumbent", "0.5", "0.7"]) == 2
        assert "single strategy" in capsys.readouterr().err


class TestVerify:

    def test_passes(self, capsys):
        assert main(["verify", "--trials", "50"]) == 0
        out = capsys.readouterr().out
        assert "[FAIL]" not in out
        assert "checks passed" in out

    def test_csv(self, capsys):
        assert main(["verify", "--trials", "20", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "check,passed,detail"
        assert all(",true," in line for line in lines[1:])

    @pytest.mark.parametrize("tol", ["nan", "inf", "0", "-1"])
    def test_tolerance_must_be_finite_and_positive(self, tol, capsys):
        assert main(["verify", "--trials", "5", f"--tol={tol}"]) == 2
        err = capsys.readouterr().err
        assert "--tol" in err


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["classical"],
    ["classical", "--config", "does/not/exist.conf"],
    ["verify", "--trials", "0"],
    ["analyze", "--tactics", "1.5", "0"] + EXAMPLE_FLAGS,
    ["classical", "--resource-value", "50"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_malformed_config_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.conf"
    path.write_text("[game]\nresource_value = 50\ninjury_cost = -100\ndisplay_cost = -10\nextra = 1\n")
    assert main(["classical", "--config", str(path)]) == 2
    assert "line 5" in capsys.readouterr().err


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "matrix.csv"
    assert main(["classical", "--format", "csv", "--out", str(target)] + EXAMPLE_FLAGS) == 0
    assert capsys.readouterr().out == ""
    assert target.read_text().startswith("row_strategy,")


def test_profile_goes_to_stderr(capsys):
    assert main(["sweep", "--resolution", "2", "--profile"] + EXAMPLE_FLAGS) == 0
    plain_out = capsys.readouterr()
    assert "Performance Report:" in plain_out.err
    assert "Sweep:" in plain_out.err
    assert "Performance Report" not in plain_out.out
