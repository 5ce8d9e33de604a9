import json
import subprocess
import sys

import pytest

from vacalc import cli
from vacalc.tables import ingest_table

from conftest import FIXTURES


def run(args, capsys):
    code = cli.main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def va(*args):
    return subprocess.run([sys.executable, "-m", "vacalc.cli", *map(str, args)], capture_output=True, text=True,
                          env={"VA_SEED": "7", "PATH": ""})


def test_expand_json(capsys):
    code, out, _ = run(["expand", "delta3(x0; x1, x2)", "--window", "2", "--report", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["expression"] == "delta3(x0; x1, x2)"
    assert doc["terms"]


def test_res_needs_var(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["res", "x^-1"])
    assert info.value.code == 2
    code, out, _ = run(["res", "x^-1 * (1 + x)", "--var", "x", "--report", "json"], capsys)
    assert code == 0
    assert json.loads(out)["terms"]


def test_syntax_error_exit_2(capsys):
    code, _, err = run(["expand", "delta((x1-x2)/x0"], capsys)
    assert code == 2
    assert "1:17" in err or "column 17" in err


def test_missing_file_exit_2(capsys):
    code, _, _ = run(["check", FIXTURES / "nope.json"], capsys)
    assert code == 2


@pytest.mark.parametrize("name", ["broken_jacobi.json", "broken_opposite_sign.json", "broken_lie_map.json",
                                  "bad_vacuum.json"])
def test_failing_checks_exit_1(name, capsys):
    code, out, _ = run(["check", FIXTURES / name, "--max-wt", "3", "--report", "json"], capsys)
    assert code == 1
    assert json.loads(out)["passed"] is False


@pytest.mark.parametrize("name", ["lie_box_map.json", "sl2_reps.json", "ratfn_example.json", "trivial.json"])
def test_passing_checks_exit_0(name, capsys):
    code, _, _ = run(["check", FIXTURES / name, "--max-wt", "3"], capsys)
    assert code == 0


def test_full_lb_check(capsys):
    code, out, _ = run(["check", FIXTURES / "poly_mobius_lb.json", "--max-wt", "8", "--report", "json"], capsys)
    assert code == 0, out
    assert json.loads(out)["passed"] is True


def test_contragredient_out_then_ingest(tmp_path, capsys):
    target = tmp_path / "dual.json"
    code, _, _ = run(["contragredient", FIXTURES / "poly_mobius_lb.json", "--max-wt", "5", "--out", target], capsys)
    assert code == 0
    dual = ingest_table(target)
    assert dual.space.basis("t*").weight == 1
    code, _, _ = run(["ingest", target, "--check", "--max-wt", "3"], capsys)
    assert code == 0


def test_duality_flags(capsys):
    code, out, _ = run(["duality", FIXTURES / "poly_mobius_lb.json", "--args", "t^4*", "t", "t", "t",
                        "--bounds", "3,3,3,4", "--window", "10", "--report", "json"], capsys)
    assert code == 0, out
    code, _, _ = run(["duality", "--roundtrip", "20"], capsys)
    assert code == 0
    code, _, err = run(["duality", "--bounds", "3,3"], capsys)
    assert code == 2


def test_report_is_deterministic(tmp_path):
    args = ["duality", "--roundtrip", "10", "--report", "json"]
    a, b = va(*args), va(*args)
    assert a.returncode == b.returncode == 0, a.stderr
    assert a.stdout == b.stdout
    c = va("check", FIXTURES / "trivial.json", "--report", "json", "--out", tmp_path / "r.json")
    assert c.returncode == 0
    assert json.loads((tmp_path / "r.json").read_text())["passed"] is True


def test_unknown_subcommand():
    assert va("frobnicate").returncode == 2
