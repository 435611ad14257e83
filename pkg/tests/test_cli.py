import csv
import io
import json
import os
import subprocess
import sys

import pytest

from bsemicircular.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_verify_default_config_passes(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, err = run(["verify", "--trials", "8", "--out", str(out)], capsys)
    assert code == 0, err
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert {r["suite"] for r in rows} == {"moments", "chebyshev", "stein", "divergence", "ibp", "poincare", "amplify"}
    assert all(r["status"] == "pass" and r["seed"] == "42" for r in rows)


def test_verify_single_suite_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["verify", "--suite", "stein", "--trials", "5", "--seed", "7", "--format", "json",
                      "--out", str(out)], capsys)
    assert code == 0
    obj = json.loads(out.read_text())
    assert obj["config"]["seed"] == 7
    assert {r["suite"] for r in obj["results"]} == {"stein"}


def test_verify_with_explicit_config(tmp_path, capsys):
    cfg = {"algebra": {"kind": "diagonal", "dim": 3, "trace_weights": [0.5, 0.3, 0.2]}, "d": 3, "seed": 5}
    code, out, _ = run(["verify", "--config", write_json(tmp_path / "c.json", cfg), "--trials", "4",
                        "--suite", "poincare"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("suite,check")


def test_verify_failure_exit_code(capsys):
    code, _, err = run(["verify", "--suite", "moments", "--trials", "3", "--tol", "1e-300"], capsys)
    assert code == 1
    assert "FAIL moments/fock_vs_pairings" in err and "seed=42" in err


def test_non_symmetric_covariance_skips_ibp(tmp_path, capsys):
    cfg = {"algebra": {"kind": "full", "dim": 2, "etas": [{"kraus": [[[0, 1], [0, 0]]]}]}, "seed": 1}
    code, out, _ = run(["verify", "--config", write_json(tmp_path / "c.json", cfg), "--suite", "ibp",
                        "--trials", "2"], capsys)
    assert code == 0
    assert "skipped" in out


@pytest.mark.parametrize("payload", ["{not json", json.dumps({"algebra": {"kind": "weird"}}),
                                     json.dumps({"seed": -1}), json.dumps([1, 2])])
def test_malformed_config(tmp_path, capsys, payload):
    path = tmp_path / "bad.json"
    path.write_text(payload)
    code, _, err = run(["verify", "--config", str(path)], capsys)
    assert code == 2 and "error" in err


def test_bad_flags(capsys):
    assert run(["verify", "--suite", "nope"], capsys)[0] == 2
    assert run(["counterexample", "--n-max", "60", "--m", "50"], capsys)[0] == 2


def test_counterexample_ten_rows(tmp_path, capsys):
    out = tmp_path / "ce.csv"
    code, stdout, _ = run(["counterexample", "--n-max", "10", "--out", str(out)], capsys)
    assert code == 0 and stdout.startswith("growth_exponent=")
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 10
    c = [float(r["min_C"]) for r in rows]
    assert all(b > a for a, b in zip(c, c[1:]))


def test_counterexample_single_row(capsys):
    code, out, _ = run(["counterexample", "--n-max", "1", "--format", "json"], capsys)
    assert code == 0
    obj = json.loads(out)
    (row,) = obj["rows"]
    assert row["lhs_sq"] == pytest.approx(0.6079271018540267, abs=1e-12)
    assert row["rhs_sq"] == pytest.approx(0.3695753611686361, abs=1e-12)
    assert obj["growth_exponent"] is None


def test_unwritable_output(tmp_path, capsys):
    missing = tmp_path / "no" / "such" / "dir" / "x.csv"
    assert run(["counterexample", "--n-max", "2", "--out", str(missing)], capsys)[0] == 3
    assert run(["verify", "--trials", "1", "--suite", "stein", "--out", str(missing)], capsys)[0] == 3
    assert run(["counterexample", "--n-max", "2", "--out", str(tmp_path)], capsys)[0] == 3
    assert run(["counterexample", "--n-max", "2", "--out", "/proc/version"], capsys)[0] == 3


@pytest.mark.skipif(hasattr(os, "geteuid") and os.geteuid() == 0, reason="root ignores file permissions")
def test_read_only_output(tmp_path, capsys):
    ro = tmp_path / "ro.csv"
    ro.write_text("")
    ro.chmod(0o444)
    assert run(["counterexample", "--n-max", "2", "--out", str(ro)], capsys)[0] == 3


def test_missing_config_file(tmp_path, capsys):
    assert run(["verify", "--config", str(tmp_path / "absent.json")], capsys)[0] == 3


def test_decompose_square_over_c(tmp_path, capsys):
    poly = {"terms": [{"letters": [0, 0], "coeffs": [1, 1, 1]}]}
    code, out, _ = run(["decompose", write_json(tmp_path / "p.json", poly)], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "U₂ + 1"
    assert lines[-1] == "residual: 0"


def test_decompose_scalar_only(tmp_path, capsys):
    poly = {"algebra": {"kind": "full", "dim": 2}, "terms": [{"letters": [], "coeffs": [[[1, 2], [3, 4]]]}], "d": 1}
    code, out, _ = run(["decompose", write_json(tmp_path / "p.json", poly)], capsys)
    assert code == 0
    assert "scalar part: b" in out and "no Chebyshev products" in out


def test_decompose_mixed_letters(tmp_path, capsys):
    eye = [[1, 0], [0, 1]]
    b = [[1, 2], [0, 1]]
    poly = {"algebra": {"kind": "full", "dim": 2, "etas": [{"kraus": [eye]}, {"kraus": [eye]}]},
            "terms": [{"letters": [0, 0, 1], "coeffs": [eye, b, eye, b]}]}
    code, out, _ = run(["decompose", write_json(tmp_path / "p.json", poly)], capsys)
    assert code == 0
    assert "U₂(X₀)·U₁(X₁)" in out and "U₁(X₁)" in out
    assert float(out.splitlines()[-1].split()[-1]) <= 1e-10


def test_decompose_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["decompose", str(bad)], capsys)[0] == 2
    assert run(["decompose", write_json(tmp_path / "b2.json", {"terms": [{"letters": [0]}]})], capsys)[0] == 2


def test_reports_are_byte_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert run(["verify", "--trials", "4", "--seed", "99", "--format", "json", "--out", str(path)], capsys)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    out = tmp_path / "ce.csv"
    proc = subprocess.run([sys.executable, "-m", "bsemicircular", "counterexample", "--n-max", "3", "--out", str(out)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(out.read_text().splitlines()) == 4
