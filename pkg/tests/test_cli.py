import json
import subprocess
import sys

import pytest

from sl2boundary.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_series_json(capsys):
    code, out = run(capsys, "series", "--kind", "H", "--h0", "2", "--order", "1", "--deterministic")
    assert code == 0
    payload = json.loads(out.out)["payload"]
    assert [c["value"] for c in payload["coefficients"]] == ["3/4", "-7/36"]


def test_deterministic_output_is_byte_stable(capsys):
    args = ("solve", "--kind", "log", "--d", "4", "--w0", "-1/2", "--f0", "x1^2", "--order", "6", "--deterministic")
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a.out == b.out
    data = json.loads(a.out)
    assert "timing" not in data
    assert data["payload"]["log_coefficient"] == "-1"


def test_negative_weight_values_are_accepted(capsys):
    code, out = run(capsys, "solve", "--kind", "first", "--d", "4", "--w0", "-1/4", "--f0", "x1^2", "--deterministic")
    assert code == 0
    fields = [t["field"] for t in json.loads(out.out)["payload"]["terms"]]
    assert fields == ["x1^2", "2"]


def test_parse_error_exit_code(capsys):
    code, out = run(capsys, "solve", "--kind", "first", "--d", "4", "--f0", "x1^(1/2)")
    assert code == 2
    assert "line 1, column 4" in json.loads(out.out)["error"]
    code, _ = run(capsys, "frobnicate")
    assert code == 2


def test_domain_error_exit_code(capsys):
    code, out = run(capsys, "solve", "--kind", "first", "--d", "4", "--w0", "-1/2", "--f0", "x1^2", "--deterministic")
    assert code == 3
    data = json.loads(out.out)
    assert data["status"] == "error" and data["payload"]["h0"] == "3"
    code, _ = run(capsys, "qcurv", "--n", "3", "--omega", "x1")
    assert code == 3


def test_algebra_verb(capsys):
    code, out = run(capsys, "algebra", "--word", "y x x", "--deterministic")
    assert json.loads(out.out)["payload"]["canonical"] == "(-2*h0 - 2)*x f + 1*x^2 y f"
    code, out = run(capsys, "algebra", "--word", "y O", "--h0", "4", "--weight", "4", "--deterministic")
    assert json.loads(out.out)["payload"]["canonical"] == "0"
    code, out = run(capsys, "algebra", "--word", "x", "--commutator", "y", "--deterministic")
    assert json.loads(out.out)["payload"]["canonical"] == "(h0)*f"


def test_gjms_csv(capsys):
    code, out = run(capsys, "gjms", "--k", "2", "--d", "4", "--format", "csv")
    assert code == 0
    lines = out.out.splitlines()
    assert lines[0] == "name,status,expected,got,provenance"
    assert "|c|,pass,1,1,REFERENCE" in lines


def test_qcurv_text(capsys):
    code, out = run(capsys, "qcurv", "--n", "2", "--omega", "x1^2 + 3*x1*x2 + x2^2", "--format", "text", "--deterministic")
    assert code == 0
    assert out.out.startswith("status: pass")
    assert '"Q": "4"' in out.out


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out = run(capsys, "series", "--kind", "K", "--order", "2", "--output", str(target), "--deterministic")
    assert code == 0 and out.out == ""
    assert json.loads(target.read_text())["payload"]["h0"] == "generic"


def test_order_from_environment(monkeypatch, capsys, caplog):
    monkeypatch.setenv("SL2BOUNDARY_ORDER", "3")
    _, out = run(capsys, "series", "--kind", "G", "--deterministic")
    assert json.loads(out.out)["payload"]["order"] == 3
    monkeypatch.setenv("SL2BOUNDARY_ORDER", "41")
    with caplog.at_level("WARNING", logger="sl2boundary"):
        run(capsys, "series", "--kind", "G", "--deterministic")
    assert "exceeds" in caplog.text
    monkeypatch.setenv("SL2BOUNDARY_ORDER", "many")
    code, _ = run(capsys, "series", "--kind", "G")
    assert code == 2


def test_verify_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "sl2", "--deterministic")
    data = json.loads(out.out)
    assert code == 0 and data["status"] == "pass"
    assert all(c["status"] == "pass" for c in data["cases"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sl2boundary.cli", "series", "--kind", "F", "--h0", "4", "--deterministic"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["order"] == 2
