from __future__ import annotations

import json

import pytest

from src.sl2_endoscopy.cli import EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, load_config_file, main
from src.sl2_endoscopy.utils.exceptions import ParseError

Q3 = ["--field", "Qp:p=3,prec=12"]
F2 = ["--field", "Fq:p=2,f=1,prec=20"]


def run(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv: str) -> tuple[int, dict]:
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_fl_check_json(capsys):
    code, report = run_json(capsys, "fl-check", *Q3, "--ext", "unramified", "--depth", "3")
    assert code == EXIT_OK
    assert report["command"] == "fl-check"
    assert report["verdict"] == "passed"
    assert report["fl_pass"]
    assert report["config"]["depth"] == 3
    assert all(row["passed"] for row in report["rows"])


def test_fl_check_ramified_is_not_applicable(capsys):
    code, report = run_json(capsys, "fl-check", *Q3, "--ext", "ramified")
    assert code == EXIT_INCONCLUSIVE
    assert report["verdict"] == "not_applicable"


def test_classify(capsys):
    code, report = run_json(capsys, "classify-ext", *Q3, "--ext", "ramified")
    assert code == EXIT_OK
    assert report["verdict"] == "ok"
    assert report["kind"] == "ramified"
    assert report["epsilon_minus_one"] == -1
    assert report["standard_basis"]


@pytest.mark.parametrize("ext, x, value", [("unramified", "3", -1), ("unramified", "-1", 1), ("ramified", "2", -1)])
def test_epsilon(capsys, ext, x, value):
    code, report = run_json(capsys, "epsilon", *Q3, "--ext", ext, "--x", x)
    assert code == EXIT_OK
    assert report["value"] == value


def test_orbital(capsys):
    code, report = run_json(capsys, "orbital", *Q3, "--ext", "unramified", "--a", "3", "--b", "2")
    assert code == EXIT_OK
    assert report["value"]["exact"] == "1"
    assert report["cells"][0]["m"] == 0
    assert report["kappa"] == "1"


def test_kappa_orbital_at_the_center(capsys):
    code, report = run_json(capsys, "kappa-orbital", *Q3, "--ext", "unramified", "--a", "1")
    assert code == EXIT_OK
    assert report["t"] == "1*nu"
    assert report["value"]["exact"] == "1/2"


@pytest.mark.parametrize("oracle", ["unit-quotient", "norm-membership", "split-transfer"])
def test_oracles_agree(capsys, oracle):
    code, report = run_json(capsys, "oracle", *Q3, "--ext", "unramified", "--oracle", oracle, "--depth", "2")
    assert code == EXIT_OK
    assert report["rows"]
    assert all(row["agrees"] for row in report["rows"])


def test_char2_squares_oracle_needs_characteristic_two(capsys):
    assert main(["oracle", *Q3, "--oracle", "char2-squares"]) == EXIT_USAGE
    code, report = run_json(capsys, "oracle", *F2, "--oracle", "char2-squares", "--depth", "3")
    assert code == EXIT_OK
    assert report["verdict"] == "passed"


def test_shalika_in_characteristic_two_is_refused(capsys):
    code, report = run_json(capsys, "shalika-compare", *F2, "--ext", "unramified", "--n-range", "0..1")
    assert code == EXIT_INCONCLUSIVE
    assert report["verdict"] == "not_applicable"
    assert not report["available"]
    assert report["reason"]


def test_orthogonality_csv(capsys):
    code, out = run(capsys, "orthogonality", *Q3, "--ext", "unramified", "--level", "1", "--format", "csv")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "theta,order,conductor_level,integral,expected"
    assert len(lines) == 5


def test_transfer_tabulates_the_split_torus(capsys):
    code, report = run_json(capsys, "transfer", *Q3, "--ext", "split", "--level", "1")
    assert code == EXIT_OK
    assert [e["value"]["exact"] for e in report["entries"]] == ["1", "1", "0", "0"]
    assert report["smooth_level"] == 0
    code, report = run_json(capsys, "transfer", *Q3, "--ext", "split", "--f", "0:1,1:1")
    assert [e["value"]["exact"] for e in report["entries"]] == ["3", "3", "3", "3"]


def test_germ_expand_reports_each_unit_class(capsys):
    code, report = run_json(capsys, "germ-expand", *Q3, "--ext", "ramified", "--n-range", "1..3")
    assert code == EXIT_OK
    assert [(s["unit"], s["n0"]) for s in report["sweeps"]] == [(1, 1), (2, 1)]
    assert {row["marker"] for row in report["rows"]} <= {1, -1}


def test_output_is_reproducible(capsys):
    argv = ["char-identity", *Q3, "--ext", "unramified", "--level", "1", "--seed", "5"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    assert first[0] == EXIT_OK


def test_usage_errors(capsys):
    assert main(["epsilon", *Q3]) == EXIT_USAGE
    assert "--x" in capsys.readouterr().err
    assert main(["epsilon", *Q3, "--ext", "bogus", "--x", "1"]) == EXIT_USAGE
    assert main(["orbital", *Q3, "--a", "1", "--b", "0"]) == EXIT_USAGE
    assert main(["no-such-command"]) == EXIT_USAGE
    assert main(["transfer", *Q3, "--ext", "split", "--a", "1", "--b", "1"]) == EXIT_USAGE


def test_config_file_is_merged_under_flags(tmp_path, capsys):
    path = tmp_path / "run.conf"
    path.write_text("# Q3, ramified\nfield = Qp:p=3,prec=12\next = ramified\nx = -1\n")
    code, report = run_json(capsys, "epsilon", "--config", str(path))
    assert code == EXIT_OK
    assert report["value"] == -1
    code, report = run_json(capsys, "epsilon", "--config", str(path), "--ext", "unramified")
    assert report["value"] == 1
    assert report["config"]["ext"] == "unramified"


def test_config_file_errors(tmp_path):
    bad_key = tmp_path / "bad.conf"
    bad_key.write_text("colour = blue\n")
    with pytest.raises(ParseError):
        load_config_file(str(bad_key))
    bad_int = tmp_path / "int.conf"
    bad_int.write_text("depth = deep\n")
    assert main(["fl-check", "--config", str(bad_int)]) == EXIT_USAGE
    assert main(["fl-check", "--config", str(tmp_path / "missing.conf")]) == EXIT_USAGE


def test_config_file_values_are_typed(tmp_path):
    path = tmp_path / "typed.conf"
    path.write_text("depth = 3\nquick = yes\nn-range = 0..2  # inline comment\n")
    assert load_config_file(str(path)) == {"depth": 3, "quick": True, "n_range": "0..2"}
