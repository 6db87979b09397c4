import csv
import io
import json
import pathlib

import pytest

from critline import cli, presets
from critline.cli import main

CONFIGS = pathlib.Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_theorem1_simple(capsys):
    code, out, err = run(capsys, "theorem1", "--variant", "simple")
    assert code == 0 and "PASS" in err
    rep = json.loads(out)
    assert rep["proportion"] == pytest.approx(0.6044, abs=5e-4)
    assert rep["kernel_variant"]["p3_adopted"] in rep["kernel_variant"]["p3_candidates"]


def test_theorem1_output_is_byte_identical(capsys):
    _, a, _ = run(capsys, "theorem1", "--variant", "simple")
    _, b, _ = run(capsys, "theorem1", "--variant", "simple")
    assert a == b


def test_theorem1_critical_reports_reading(capsys):
    code, out, err = run(capsys, "theorem1", "--variant", "critical")
    rep = json.loads(out)
    assert rep["kernel_variant"]["q_reading"] == "symmetric"
    assert code == (0 if abs(rep["proportion"] - 0.6107) <= 5e-4 else 1)


def test_theorem1_critical_printed_reading(capsys):
    code, out, _ = run(capsys, "theorem1", "--variant", "critical", "--q-reading", "printed")
    assert code == 1
    assert json.loads(out)["proportion"] < 0


def test_evaluate_matches_theorem1(capsys):
    _, a, _ = run(capsys, "theorem1", "--variant", "simple")
    code, b, _ = run(capsys, "evaluate", "--config", str(CONFIGS / "theorem1_simple.json"))
    assert code == 0 and a == b


def test_evaluate_eta_config(capsys):
    code, out, _ = run(capsys, "evaluate", "--config", str(CONFIGS / "eta_2.json"))
    assert code == 0
    assert json.loads(out)["proportion"] == pytest.approx(0.2201, abs=2e-3)


def test_evaluate_non_positive_exits_one(capsys, monkeypatch):
    import critline.functional as fn

    monkeypatch.setattr(fn, "functional_value", lambda *a: -0.25)
    code, out, err = run(capsys, "evaluate", "--config", str(CONFIGS / "theorem1_simple.json"))
    assert code == 1 and "not positive" in err
    assert json.loads(out)["proportion"] is None


def test_table1_custom_grid_csv(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table1", "--grid", "0.25,3", "--csv", str(path))
    assert code == 0 and out == ""
    raw = path.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0] == ["eta", "C_eta", "K", "R"]
    assert [float(r[0]) for r in rows[1:]] == [0.25, 3.0]
    assert float(rows[1][1]) == pytest.approx(0.5261, abs=2e-3)
    assert float(rows[2][1]) == pytest.approx(0.1266, abs=2e-3)


def test_table1_empty_grid(capsys):
    code, out, _ = run(capsys, "table1", "--grid", "")
    assert code == 0 and out == "eta,C_eta,K,R\n"


def test_table1_grid_from_config(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"table1": {"grid": [5.0]}}')
    code, out, _ = run(capsys, "table1", "--config", str(p))
    assert code == 0 and out.splitlines()[1].startswith("5,")


def test_table1_status_column(monkeypatch):
    monkeypatch.setattr(presets, "c_of_eta_details", lambda eta: (None, -1.0, 1.0) if eta > 1 else (0.5, 2.0, 1.0))
    text = cli.table1_csv(cli.table1_rows([0.5, 2.0]))
    lines = text.splitlines()
    assert lines[0] == "eta,C_eta,K,R,status"
    assert lines[1].endswith(",ok") and lines[2] == "2,,-1,1,infeasible"


def test_table1_bad_grid(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["table1", "--grid", "a,b"])
    assert exc.value.code == 2


def test_optimize_small_budget(capsys, tmp_path):
    code, out, err = run(capsys, "optimize", "--config", str(CONFIGS / "optimize_simple_warm.json"),
                         "--budget", "300")
    assert code == 0
    res = json.loads(out)
    assert res["evaluations"] <= 300 and res["warm_start"] is True
    assert res["best_proportion"] >= 0.6039
    _, again, _ = run(capsys, "optimize", "--config", str(CONFIGS / "optimize_simple_warm.json"),
                      "--budget", "300")
    assert again == out


def test_optimize_warm_needs_r(capsys, tmp_path):
    d = json.loads((CONFIGS / "optimize_simple_warm.json").read_text())
    del d["R"]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(d))
    code, _, err = run(capsys, "optimize", "--config", str(p))
    assert code == 2 and "'R'" in err


def test_optimize_bad_degrees(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"optimize": {"degrees": [3, 2]}}')
    code, _, err = run(capsys, "optimize", "--config", str(p))
    assert code == 2 and "odd" in err


@pytest.mark.parametrize(
    "text,needle",
    [
        ('{"R": 1, "colour": 2}', "colour"),
        ('{"R": 1,', "malformed JSON"),
        ('{"mollifier": {"pieces": [[0, 1]], "J": 2}}', "mollifier.J"),
    ],
)
def test_config_errors_exit_two(capsys, tmp_path, text, needle):
    p = tmp_path / "c.json"
    p.write_text(text)
    code, _, err = run(capsys, "evaluate", "--config", str(p))
    assert code == 2 and needle in err


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0 and out.splitlines()[-1] == "108/108 checks passed"


def test_root_command(capsys):
    code, out, _ = run(capsys, "root")
    assert code == 0
    assert json.loads(out)["root"] == pytest.approx(5.07, abs=0.05)
    code, out, err = run(capsys, "root", "--lo", "1", "--hi", "2")
    assert code == 1 and "does not change sign" in err
    code, _, _ = run(capsys, "root", "--lo", "3", "--hi", "2")
    assert code == 2


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "critline", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("critline")
