"""
Tests for the qdeform command-line driver.
"""

import json

import pytest

from qdeform.cli import build_parser, main, parse_args
from qdeform.runners import SUPPORTED_SUBCOMMANDS


def run_json(argv, capsys):
    code = main(argv)
    report = json.loads(capsys.readouterr().out)
    return code, report


def test_algebra_qboson_passes(capsys):
    code, report = run_json(["algebra", "--which", "qboson", "--lambda", "0.5", "--dim", "32"], capsys)
    assert code == 0
    assert report["passed"] is True
    assert report["subcommand"] == "algebra"
    assert report["parameters"]["lam"] == 0.5


def test_negative_control_exits_one(capsys):
    code, report = run_json(["algebra", "--force-f-identity"], capsys)
    assert code == 1
    assert report["passed"] is False
    assert report["error"] is None


def test_library_error_exits_one(capsys):
    code, report = run_json(["leptons", "--m-e", "0"], capsys)
    assert code == 1
    assert report["error"]["name"] == "DomainError"
    assert report["results"] == {}


@pytest.mark.parametrize("argv", [
    ["algebra", "--lambda", "abc"],
    ["hubbard", "--sector", "1"],
    ["noise", "--lambda", "0.3"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 2


def test_leptons_example(capsys):
    code, report = run_json(["leptons"], capsys)
    assert code == 0
    assert report["results"]["k"] == pytest.approx(105.147, rel=1e-9)
    assert report["results"]["lam"] == pytest.approx(2.8235, abs=1e-3)


def test_hubbard_example(capsys):
    code, report = run_json(["hubbard", "--sites", "2", "--q", "1.0", "--t", "1", "--U", "4", "--sector", "1,1"], capsys)
    assert code == 0
    assert report["results"]["ground_energy"] == pytest.approx(-2.8284271247, abs=1e-9)
    assert report["results"]["sectors"] == [[1, 1]]


def test_columns_format(capsys):
    assert main(["--format", "columns", "hubbard", "--sites", "2", "--U", "4", "--sector", "1,1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# n_up n_dn eigenvalue")
    assert len(out.strip().splitlines()) == 5


def test_columns_falls_back_to_checks_table(capsys):
    assert main(["--format", "columns", "algebra", "--dim", "12"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# status value tolerance name")
    assert "PASS" in out


def test_noise_report_deterministic(capsys):
    argv = ["--seed", "7", "noise", "--lambda", "0.3", "--samples", "500", "--modes", "16"]
    _, first = run_json(argv, capsys)
    _, second = run_json(argv, capsys)
    first.pop("wall_time")
    second.pop("wall_time")
    assert first == second
    assert first["parameters"]["seed"] == 7


def test_seed_after_subcommand(capsys):
    code, report = run_json(["noise", "--lambda", "0.3", "--samples", "1000", "--seed", "7", "--xi", "gaussian"], capsys)
    assert code in (0, 1)
    assert report["error"] is None
    assert report["parameters"]["seed"] == 7


@pytest.mark.parametrize("argv, expected", [
    (["verify-all", "--format", "columns"], "columns"),
    (["--format", "columns", "verify-all"], "columns"),
    (["leptons", "--format", "columns", "--quiet"], "columns"),
    (["leptons"], "json"),
])
def test_global_options_on_either_side(argv, expected):
    args = parse_args(argv)
    assert args.format == expected
    assert args.seed is None


def test_global_option_before_subcommand_survives(tmp_path):
    target = tmp_path / "report.json"
    args = parse_args(["--output", str(target), "--seed", "3", "noise"])
    assert args.output == str(target)
    assert args.seed == 3
    assert args.verbose is False


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    assert main(["--output", str(target), "leptons"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["tool"] == "qdeform"


def test_config_values_under_explicit_flags(tmp_path):
    config = tmp_path / "algebra.json"
    config.write_text(json.dumps({"lam": 0.2, "dim": 16, "format": "columns"}))
    args = parse_args(["--config", str(config), "algebra", "--dim", "20"])
    assert args.lam == 0.2
    assert args.dim == 20
    assert args.format == "columns"


@pytest.mark.parametrize("content", ['{"bogus": 1}', '{"command": "leptons"}', "[1, 2]", "not json"])
def test_bad_config_exits_two(tmp_path, content):
    config = tmp_path / "bad.json"
    config.write_text(content)
    with pytest.raises(SystemExit) as excinfo:
        parse_args(["--config", str(config), "algebra"])
    assert excinfo.value.code == 2


def test_every_subcommand_is_dispatched():
    parser = build_parser()
    choices = parser._subparsers._group_actions[0].choices
    assert set(choices) == set(SUPPORTED_SUBCOMMANDS)
