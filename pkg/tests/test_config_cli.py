import json
import math

import pytest

from ccstab.artifacts import fmt, git_blob_hash, read_csv, write_csv
from ccstab.cli import EXIT_CONFIG, EXIT_OK, EXIT_VERIFY, main
from ccstab.config import AUTO, RunConfig, parse_config, plan
from ccstab.errors import ConfigError


def _problems(text):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    return info.value.problems


def test_empty_config_gives_defaults():
    assert parse_config("") == RunConfig()


def test_values_comments_and_auto():
    cfg = parse_config("# run\nentropy = exp  # smooth\nC0 = auto\nh = 0.025\ndx = none\n")
    assert (cfg.entropy, cfg.C0, cfg.h, cfg.dx) == ("exp", AUTO, 0.025, None)
    assert cfg.grid_dx == pytest.approx(0.025 / 4)


def test_negative_eps_names_its_line():
    assert _problems("eps = -1") == ["line 1: eps must be positive"]


def test_all_problems_are_collected():
    problems = _problems("h = 0\ncolour = red\nT = abc\nh = 1\nmode = fast\n")
    assert "line 1: h must be positive" in problems
    assert "line 2: unknown key 'colour'" in problems
    assert any(p.startswith("line 3: malformed number") for p in problems)
    assert any(p.startswith("line 4: duplicate key 'h'") for p in problems)
    assert any(p.startswith("line 5: mode must be one of") for p in problems)


@pytest.mark.parametrize("text, fragment", [
    ("b_lo = 1.6", "b_lo < b_hi"),
    ("u_L = 3", "u_L must lie"),
    ("C1 = 1.5", "C1 must lie in (0, 1)"),
    ("C0 = 10\neps = 0.1", "C0 * eps"),
    ("C1 = 0.9", "(1 - C0 eps)^2"),
    ("cfl = 1.5", "cfl must be at most 1"),
    ("v = 100", "cone is empty"),
    ("entropy = cosh", "unknown entropy"),
])
def test_cross_field_validation(text, fragment):
    assert any(fragment in p for p in _problems(text))


def test_plan_prepends_auto_calibrations():
    cfg = parse_config("C0 = auto\nC1 = auto")
    assert plan(cfg, "fronttrack") == ["calibrate-small", "calibrate-large", "fronttrack"]
    assert plan(cfg, "calibrate-small") == ["calibrate-small", "calibrate-large"]
    assert plan(RunConfig(), "aux") == ["aux"]
    with pytest.raises(ConfigError):
        plan(cfg, "plot")


def test_fmt_round_trips_floats():
    for x in (0.1, -1.0476837713, 1e-300, 2.0 / 3.0):
        assert float(fmt(x)) == x
    assert fmt(True) == "1" and fmt(False) == "0"
    assert math.isnan(float(fmt(float("nan"))))


def test_csv_round_trip(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["a", "b"], [(0.1, 2), (1 / 3, -4)])
    header, rows = read_csv(path)
    assert header == ["a", "b"]
    assert [float(r[0]) for r in rows] == [0.1, 1 / 3]


def test_git_blob_hash_matches_git():
    assert git_blob_hash(b"") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"
    assert git_blob_hash(b"hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"


def _run(tmp_path, text, command, seed=None, out="out"):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    argv = ["--config", str(cfg), "--command", command, "--out", str(tmp_path / out)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    return main(argv)


def test_unknown_command_exits_with_config_code(tmp_path, capsys):
    assert _run(tmp_path, "", "plot") == EXIT_CONFIG
    assert "usage" in capsys.readouterr().err


def test_bad_config_exits_with_config_code(tmp_path, capsys):
    assert _run(tmp_path, "eps = -1\n", "aux") == EXIT_CONFIG
    assert "line 1: eps must be positive" in capsys.readouterr().err


def test_aux_table_contains_the_closed_form_row(tmp_path):
    assert _run(tmp_path, "", "aux") == EXIT_OK
    header, rows = read_csv(tmp_path / "out" / "aux" / "aux.csv")
    assert header == ["u", "phi_tangent", "phi_flat0", "phi_sharp0"]
    row = next(r for r in rows if float(r[0]) == 1.0)
    assert float(row[1]) == pytest.approx(-0.5, abs=1e-12)
    assert float(row[2]) == pytest.approx(-1.0, abs=1e-12)
    assert float(row[3]) == pytest.approx(0.0, abs=1e-12)


def test_admissible_is_deterministic_and_has_a_manifest(tmp_path):
    text = "samples = 200\n"
    assert _run(tmp_path, text, "admissible", seed=7, out="a") == EXIT_OK
    assert _run(tmp_path, text, "admissible", seed=7, out="b") == EXIT_OK
    first = (tmp_path / "a" / "admissible" / "admissible.csv").read_bytes()
    assert first == (tmp_path / "b" / "admissible" / "admissible.csv").read_bytes()
    manifest = json.loads((tmp_path / "a" / "admissible" / "manifest.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["command"] == "admissible"
    assert manifest["artifacts"]["admissible.csv"] == git_blob_hash(first)
    assert manifest["config"]["samples"] == 200


def test_auto_constants_are_calibrated_first(tmp_path):
    assert _run(tmp_path, "C0 = auto\nC1 = auto\n", "calibrate-large") == EXIT_OK
    manifest = json.loads((tmp_path / "out" / "calibrate-large" / "manifest.json").read_text())
    consts = manifest["constants"]
    assert consts["C0"] == 2.0
    assert 0 < consts["C1"] <= (1 - 2.0 * 0.1) ** 2


def test_nonclassical_demo_with_exp_entropy(tmp_path, capsys):
    assert _run(tmp_path, "entropy = exp\n", "nonclassical-demo") == EXIT_OK
    assert "non-uniqueness margin" in capsys.readouterr().out


def test_slow_cone_fails_verification_with_witness(tmp_path):
    assert _run(tmp_path, "v = 10\n", "cone-experiment") == EXIT_VERIFY
    witness = json.loads((tmp_path / "out" / "cone-experiment" / "witness.json").read_text())
    assert witness["witness"]["v"] == 10
    assert witness["witness"]["lambda_hat"] > 10


@pytest.mark.parametrize("mode", ["rh", "shifted"])
def test_fronttrack_runs_in_both_modes(tmp_path, mode):
    assert _run(tmp_path, f"mode = {mode}\n", "fronttrack") == EXIT_OK
    header, rows = read_csv(tmp_path / "out" / "fronttrack" / "fronts.csv")
    final = [r for r in rows if float(r[0]) == 0.5]
    assert len(final) == 1 and final[0][2] == "big"
    # the shifted shock stays within a few cells of the Rankine-Hugoniot position
    assert float(final[0][3]) == pytest.approx(1.75 * 0.5, abs=0.05)


def test_front_tracking_outside_the_positive_range_is_a_config_error(tmp_path, capsys):
    assert _run(tmp_path, "u_R = 0\n", "fronttrack") == EXIT_CONFIG
    assert "initial states must be positive" in capsys.readouterr().err


def test_nonclassical_demo_with_quadratic_entropy_is_a_config_error(tmp_path):
    assert _run(tmp_path, "", "nonclassical-demo") == EXIT_CONFIG
