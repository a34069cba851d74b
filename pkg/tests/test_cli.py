from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest

from ashn import cli
from ashn import compiler as ac
from ashn.compiler import SWAP

Q = math.pi / 4


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, buf.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def swap_file(tmp_path):
    path = tmp_path / "swap.mat"
    cli.write_matrix(str(path), SWAP)
    return str(path)


# compile


def test_compile_cnot_json():
    code, text = run("compile", "--x", "0.7853981633974483", "--y", "0", "--z", "0", "--g", "1", "--h", "0", "--r", "0")
    assert code == 0
    rec = json.loads(text)
    assert rec["sector"] == "ND"
    assert abs(rec["A1"] + math.sqrt(15)) <= 1e-12 and rec["A2"] == 0
    assert "coord_error" not in rec


def test_compile_identity_csv():
    code, text = run("compile", "--x", "0", "--y", "0", "--z", "0", "--csv")
    assert code == 0
    (row,) = rows(text)
    assert row["sector"] == "IDENTITY" and float(row["tau"]) == 0
    assert "coord_error" not in row


def test_compile_matrix_swap(swap_file):
    code, text = run("compile", "--matrix", swap_file, "--r", "0", "--verify")
    assert code == 0
    rec = json.loads(text)
    assert rec["sector"] == "EA_PLUS"
    assert round(rec["two_delta"], 3) == -1.528
    assert rec["coord_error"] <= 1e-8


def test_compile_degrees_flag():
    _, a = run("compile", "--x", "45", "--y", "0", "--z", "0", "--degrees")
    _, b = run("compile", "--x", str(Q), "--y", "0", "--z", "0")
    ra, rb = json.loads(a), json.loads(b)
    for k in ("tau", "A1", "A2", "two_delta"):
        assert abs(ra[k] - rb[k]) <= 1e-12


def test_compile_json_round_trip_bit_exact():
    _, text = run("compile", "--x", "0.61", "--y", "0.33", "--z", "-0.12", "--h", "0.2", "--verify")
    rec = json.loads(text)
    p, _ = ac.compile((0.61, 0.33, -0.12), ac.Couplings(1.0, 0.2), ac.default_cutoff(ac.Couplings(1.0, 0.2)))
    assert rec["tau"] == p.tau and rec["A1"] == p.a1 + 0.0 and rec["A2"] == p.a2 + 0.0


def test_compile_unit_scaling():
    _, a = run("compile", "--x", "0.5", "--y", "0.3", "--z", "0.1", "--g", "2.5", "--h", "0.5", "--r", "0.4")
    _, b = run("compile", "--x", "0.5", "--y", "0.3", "--z", "0.1", "--g", "1", "--h", "0.2", "--r", "0.4")
    ra, rb = json.loads(a), json.loads(b)
    assert abs(ra["tau"] * 2.5 - rb["tau"]) <= 1e-12
    for k in ("A1", "A2", "two_delta"):
        assert abs(ra[k] - 2.5 * rb[k]) <= 1e-12 * max(1, abs(ra[k]))


def test_compile_errors(tmp_path):
    assert run("compile", "--x", "0.1")[0] == 2
    assert run("compile", "--x", "0.1", "--y", "0", "--z", "0", "--h", "2")[0] == 2
    assert run("compile", "--x", "0.3", "--y", "0.1", "--z", "0", "--h", "0.8", "--r", "1.1")[0] == 2
    bad = tmp_path / "bad.mat"
    bad.write_text("4\n1 0\n0 0\n")
    assert run("compile", "--matrix", str(bad))[0] == 2
    bad.write_text("2\n1 0\n0 0\n0 0\n1 x\n")
    assert run("compile", "--matrix", str(bad))[0] == 2
    bad.write_text("2\n1 0\n0 0\n0 0\n1 0\n")
    assert run("compile", "--matrix", str(bad))[0] == 2
    assert run("compile", "--matrix", str(tmp_path / "missing.mat"))[0] == 2
    assert run("nosuchcommand")[0] == 2


def test_matrix_file_comments_and_round_trip(tmp_path):
    path = tmp_path / "m.mat"
    m = np.array([[0.5 + 0.25j, -1e-300], [3.0, np.pi]])
    cli.write_matrix(str(path), m)
    text = "# comment\n" + path.read_text()
    path.write_text(text)
    assert np.array_equal(cli.read_matrix(str(path)), m)


def test_tolerance_env_override(monkeypatch):
    monkeypatch.setenv("ASHN_TOL", '{"round_trip": 1e-20}')
    code, _ = run("compile", "--x", "0.6", "--y", "0.5", "--z", "0.2", "--verify")
    assert code == 1
    monkeypatch.setenv("ASHN_TOL", '{"nonsense": 1}')
    assert run("compile", "--x", "0", "--y", "0", "--z", "0")[0] == 2


# table


def test_table_rows():
    code, text = run("table", "--g", "1", "--h", "0")
    assert code == 0
    t = {r["class"]: r for r in rows(text)}
    assert list(t) == ["CNOT", "SWAP", "B", "ISWAP"]
    b = t["B"]
    assert float(b["tau"]) == math.pi / 2 and b["display_4sf"] == "1.571 -2.238 0 0"
    assert float(b["A2"]) == 0 and float(b["two_delta"]) == 0
    assert abs(float(t["CNOT"]["A1"]) + math.sqrt(15)) <= 1e-12


def test_table_cnot_with_zz():
    _, text = run("table", "--g", "1", "--h", "0.3")
    cn = rows(text)[0]
    h = 0.3
    a1 = -(math.sqrt(16 - (1 - h) ** 2) + math.sqrt(16 - (1 + h) ** 2)) / 2
    a2 = -(math.sqrt(16 - (1 - h) ** 2) - math.sqrt(16 - (1 + h) ** 2)) / 2
    assert abs(float(cn["A1"]) - a1) <= 1e-12 and abs(float(cn["A2"]) - a2) <= 1e-12


def test_table_scales_with_g():
    one = rows(run("table", "--g", "1")[1])
    two = rows(run("table", "--g", "2")[1])
    for a, b in zip(one, two):
        assert abs(float(b["tau"]) * 2 - float(a["tau"])) <= 1e-12
        for k in ("A1", "A2", "two_delta"):
            assert abs(float(b[k]) - 2 * float(a[k])) <= 1e-12


# avgtime


def test_avgtime_columns():
    code, text = run("avgtime", "--samples", "4000", "--r-grid", "0,0.5,1.1")
    assert code == 0
    rs = rows(text)
    assert [float(r["r"]) for r in rs] == [0.0, 0.5, 1.1]
    for r in rs:
        assert float(r["closed_form"]) == pytest.approx(ac.avg_gate_time_closed(float(r["r"])), abs=1e-12)
    assert abs(float(rs[0]["mc_mean"]) - 1.341) <= 0.02
    assert abs(float(rs[2]["max_bound"]) - 3.356) <= 1e-3
    assert rs[0]["max_bound"] == "inf"


def test_avgtime_bad_args():
    assert run("avgtime", "--samples", "0")[0] == 2
    assert run("avgtime", "--r-grid", "0,abc")[0] == 2
    assert run("avgtime", "--r-grid", "2.0")[0] == 2


# synth


def test_synth_counts_and_determinism():
    code, a = run("synth", "--n", "3", "--seed", "5")
    assert code == 0
    rec = json.loads(a)
    assert rec["gate_count"] == 11 and rec["dist"] <= 1e-6 and "runtime_ms" not in rec
    assert run("synth", "--n", "3", "--seed", "5")[1] == a


@pytest.mark.slow
def test_synth_four_qubits():
    rec = json.loads(run("synth", "--n", "4", "--seed", "1")[1])
    assert rec["gate_count"] <= 68 and rec["dist"] <= 1e-6


def test_synth_report_and_range():
    rec = json.loads(run("synth", "--n", "3", "--report")[1])
    assert rec["runtime_ms"] >= 0
    assert run("synth", "--n", "5")[0] == 2
    assert run("synth", "--n", "2")[0] == 2


# verify-suite


def test_verify_suite_small_reproducible():
    code, a = run("verify-suite", "--samples", "1", "--seed", "7")
    assert code == 0
    assert run("verify-suite", "--samples", "1", "--seed", "7")[1] == a
    rec = json.loads(a)
    assert rec["passed"] and rec["failures"] == 0 and len(rec["cases"]) == 10


def test_verify_suite_clamps_cutoff():
    rec = json.loads(run("verify-suite", "--samples", "20", "--h-list", "0.8", "--r-list", "1.1")[1])
    case = rec["cases"][0]
    assert case["r"] == 1.1 and case["r_used"] == ac.max_cutoff(0.8)
    assert rec["max_error"] <= 1e-8


def test_verify_suite_negative_control():
    code, text = run("verify-suite", "--samples", "20", "--h-list", "0", "--r-list", "0", "--perturb", "0.1")
    assert code == 1
    rec = json.loads(text)
    assert not rec["passed"] and rec["max_error"] > 1e-3


# kak


def test_kak_command(swap_file, tmp_path):
    code, text = run("kak", "--matrix", swap_file)
    assert code == 0
    rec = json.loads(text)
    assert np.allclose(rec["eta"], [Q, Q, Q], atol=1e-10)
    assert rec["reconstruction_error"] <= 1e-10
    assert np.array(rec["a1"]).shape == (2, 2, 2)
    bad = tmp_path / "three.mat"
    cli.write_matrix(str(bad), np.eye(3))
    assert run("kak", "--matrix", str(bad))[0] == 2
    cli.write_matrix(str(bad), 2 * np.eye(4))
    assert run("kak", "--matrix", str(bad))[0] == 2
