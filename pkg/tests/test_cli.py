import csv
import io
import json
import subprocess
import sys

import pytest

from alcove_kit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def exit_code(*argv):
    with pytest.raises(SystemExit) as info:
        main(list(argv))
    return info.value.code


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--n", "5")
    assert code == 0
    assert out.splitlines()[-1] == "total 5 i=4 ii=1"


def test_classify_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "classify", "--n", "7")
    doc = json.loads(out)
    assert doc["schema"] == "alcove-kit/1"
    assert doc["counts"] == {"i": 6, "ii": 3}


def test_global_flags_after_subcommand(capsys):
    a = run(capsys, "--format", "json", "classify", "--n", "6")
    b = run(capsys, "classify", "--n", "6", "--format", "json")
    assert a == b


def test_polytope_and_thm51(capsys):
    code, out, _ = run(capsys, "polytope", "--n", "6", "--x", "9/40", "--check", "thm51")
    assert code == 0
    assert "face vector (24, 69, 80, 45, 12)" in out
    assert "thm51: ok" in out


def test_polytope_symbolic(capsys):
    code, out, _ = run(capsys, "--format", "json", "polytope", "--n", "4", "--symbolic", "--interval", "1/3,1/2")
    doc = json.loads(out)
    assert code == 0 and len(doc["vertices"]) == 8
    code = main(["polytope", "--n", "4", "--symbolic", "--interval", "1/5,1/2"])
    assert code == 2


def test_polytope_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "polytope", "--n", "4", "--x", "5/12")
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 8 and all(len(r) == 4 for r in rows)


@pytest.mark.parametrize("op", ["delta", "z", "u", "A0"])
def test_spectral_ops(capsys, op):
    code, out, _ = run(capsys, "--format", "json", "spectral", "--n", "4", "--x", "5/12",
                       "--xi", "1/4,1/4,1/4,1/4", "--op", op)
    assert code == 0 and json.loads(out)["op"] == op


def test_fiber_with_suite(capsys):
    code, out, _ = run(capsys, "--format", "json", "fiber", "--n", "4", "--x", "5/12",
                       "--vertex", "0,5/12,1/6,5/12", "--suite", "10")
    doc = json.loads(out)
    assert code == 0 and doc["type"] == "Sphere3" and doc["suite"]["passed"]


@pytest.mark.parametrize("check", ["lax", "cross-section", "trace", "flow"])
def test_dynamics_checks(capsys, check):
    code, out, _ = run(capsys, "dynamics", "--n", "4", "--x", "5/12", "--check", check, "--samples", "5")
    assert code == 0 and out.rstrip().endswith("PASS")


def test_fiber_flow_needs_n4(capsys):
    assert run(capsys, "dynamics", "--n", "5", "--x", "7/24", "--check", "fiber-flow")[0] == 2


def test_verify_csv_header(capsys):
    code, out, _ = run(capsys, "--format", "csv", "verify", "--suite", "interval-counts")
    assert code == 0
    assert out.splitlines()[0] == "id,expected,actual,status"


def test_verify_failing_suite_exit_code(capsys):
    assert run(capsys, "verify", "--suite", "prop56")[0] == 1


@pytest.mark.parametrize("argv", [
    ["polytope", "--n", "6", "--x", "1/0"],
    ["polytope", "--n", "6", "--x", "abc"],
    ["verify", "--suite", "nonexistent"],
    ["frobnicate"],
    ["classify"],
])
def test_usage_errors(argv):
    assert exit_code(*argv) == 2


def test_inadmissible_x_is_usage_error(capsys):
    code, _, err = run(capsys, "polytope", "--n", "6", "--x", "1/3")
    assert code == 2 and "excluded" in err


def test_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "fiber", "--n", "4", "--x", "5/12", "--vertex", "1,0,0,0")
    assert code == 1 and err


def test_wrong_point_length(capsys):
    assert run(capsys, "spectral", "--n", "4", "--x", "5/12", "--xi", "1/2,1/2")[0] == 2


def test_output_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "alcove_kit", "--format", "json", "--seed", "3",
           "verify", "--suite", "dynamics"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
