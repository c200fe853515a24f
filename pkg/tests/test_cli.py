import csv
import io
import json
import subprocess
import sys

import pytest

from besselmult import ValidationError
from besselmult.cli import COMMANDS, SCHEMAS, format_number, render_csv, render_json, resolve_config, run


def _run(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _csv_rows(text):
    return list(csv.reader(io.StringIO(text, newline="")))


def test_gamma_check_ok(capsys):
    code, out, err = _run(["gamma-check", "--bmax", "20", "--no-timestamp"], capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert tuple(rows[0]) == SCHEMAS["gamma-check"]
    assert all(r[3] == "true" for r in rows[1:])
    meta = json.loads(err)
    assert meta["status"] == "ok" and "timestamp" not in meta
    assert meta["version"]


def test_bessel_check_ok(capsys):
    code, out, _ = _run(["bessel-check", "--grid-scale", "0.3"], capsys)
    assert code == 0
    assert out.startswith(",".join(SCHEMAS["bessel-check"]) + "\r\n")


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    [],
    ["gamma-check", "--alpha", "-2"],
    ["gamma-check", "--bmax", "5"],
    ["gamma-check", "--format", "xml"],
    ["gamma-check", "--grid-scale", "-1"],
    ["gamma-check", "--frobnicate"],
    ["kernel-check", "--alpha", "-0.5,2"],
    ["hormander-norm", "--beta", "-1"],
    ["lower-bound", "--theorem", "2", "--alpha", "-0.5"],
    ["lower-bound", "--b", "1,x"],
    ["lower-bound", "--theorem", "3"],
])
def test_validation_errors_exit_1(argv, capsys):
    code, out, err = _run(argv, capsys)
    assert code == 1
    assert out == ""
    assert "invalid input" in err


def test_ceiling_exit_2(capsys):
    code, _, err = _run(["kernel-check", "--alpha", "0.5", "--b", "70", "--points", "3"], capsys)
    assert code == 2
    assert "numerical failure" in err


def test_negative_alpha_flag_forms():
    assert resolve_config(["kernel-check", "--alpha", "-0.5"])["alpha"] == [-0.5]
    assert resolve_config(["p2-check", "--alpha", "-0.5,2"])["alpha"] == [-0.5, 2.0]
    assert resolve_config(["p2-check", "--alpha=-0.5,2"])["alpha"] == [-0.5, 2.0]


def test_kernel_check_table(capsys):
    code, out, _ = _run(["kernel-check", "--alpha", "0.5", "--b", "1,2", "--points", "4", "--no-timestamp"], capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert tuple(rows[0]) == SCHEMAS["kernel-check"]
    # 4x4 grid minus the diagonal, for two values of b
    assert len(rows) - 1 == 2 * 12
    assert {r[1] for r in rows[1:]} == {"1", "2"}


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "kernel-check", "alpha": [2.0], "b": [1.0], "points": 3,
                               "format": "json", "no_timestamp": True}))
    merged = resolve_config(["--config", str(cfg)])
    assert merged["command"] == "kernel-check" and merged["alpha"] == [2.0] and merged["format"] == "json"
    over = resolve_config(["--config", str(cfg), "--alpha", "0.5", "--format", "csv"])
    assert over["alpha"] == [0.5] and over["format"] == "csv" and over["points"] == 3
    code, out, _ = _run(["--config", str(cfg)], capsys)
    assert code == 0
    data = json.loads(out)
    assert list(data[0]) == list(SCHEMAS["kernel-check"])


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"command": "gamma-check", "colour": "red"}))
    with pytest.raises(ValidationError):
        resolve_config(["--config", str(bad)])
    with pytest.raises(ValidationError):
        resolve_config(["--config", str(tmp_path / "missing.json")])
    notobj = tmp_path / "list.json"
    notobj.write_text("[1, 2]")
    with pytest.raises(ValidationError):
        resolve_config(["--config", str(notobj)])


def test_out_file_and_sidecar(tmp_path, capsys):
    out = tmp_path / "gamma.csv"
    code, stdout, _ = _run(["gamma-check", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    meta = json.loads((tmp_path / "gamma.csv.meta.json").read_text())
    assert "timestamp" in meta
    assert meta["columns"] == list(SCHEMAS["gamma-check"])
    assert meta["config"]["bmax"] == 20.0
    assert out.read_bytes().startswith(b"a,b,ratio,pass\r\n")


def test_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["p2-check", "--points", "3", "--format", "json", "--no-timestamp", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    meta_a = (tmp_path / "a.json.meta.json").read_text().replace(str(a), "")
    meta_b = (tmp_path / "b.json.meta.json").read_text().replace(str(b), "")
    assert meta_a == meta_b


def test_p2_check_schema(capsys):
    code, out, _ = _run(["p2-check", "--alpha", "-0.5,2", "--points", "2", "--no-timestamp"], capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert tuple(rows[0]) == ("N", "alpha", "R", "y", "ratio")
    assert len(rows) - 1 == 2 * 4
    assert rows[1][0] == "2" and rows[1][1] == "-0.5;2"


def test_lower_bound_weak_l1(capsys):
    code, out, err = _run(["lower-bound", "--theorem", "1", "--alpha", "-0.5", "--no-timestamp"], capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert tuple(rows[0]) == ("b", "norm", "term1_contrib", "term2_contrib", "remainder_contrib", "eps", "grid_pts")
    meta = json.loads(err)
    assert abs(meta["notes"]["slope"] - 0.5) < 0.1


def test_lower_bound_lp_json(capsys):
    code, out, err = _run(["lower-bound", "--theorem", "2", "--alpha", "1", "--p", "1.5", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert list(data[0]) == list(SCHEMAS["lower-bound-2"])
    assert abs(json.loads(err)["notes"]["slope"] - 1 / 3) < 0.1


def test_hormander_norm_command(capsys):
    code, out, _ = _run(["hormander-norm", "--b", "2,10", "--beta", "1"], capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert tuple(rows[0]) == SCHEMAS["hormander-norm"] and len(rows) == 3


def test_heat_and_hankel_commands(capsys):
    code, out, _ = _run(["heat-check", "--alpha", "0.5"], capsys)
    assert code == 0 and len(_csv_rows(out)) == 10
    code, out, _ = _run(["hankel-check", "--alpha", "2"], capsys)
    assert code == 0 and len(_csv_rows(out)) == 4


def test_h1_estimate_command(capsys):
    code, out, _ = _run(["h1-estimate", "--alpha", "0.5", "--b", "1"], capsys)
    assert code == 0
    rows = _csv_rows(out)
    assert tuple(rows[0]) == SCHEMAS["h1-estimate"] and len(rows) == 3


def test_number_formatting():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(True) == "true"
    assert format_number(7) == "7"
    text = render_csv([{"a": 'say "hi", ok', "b": 1.5}], ("a", "b"))
    assert text == 'a,b\r\n"say ""hi"", ok",1.5\r\n'
    js = render_json([{"a": float("nan"), "b": 2.0}], ("a", "b"))
    assert json.loads(js) == [{"a": None, "b": 2.0}]


def test_all_commands_have_schemas():
    for c in COMMANDS:
        assert c in SCHEMAS or f"{c}-1" in SCHEMAS


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "besselmult", "gamma-check", "--no-timestamp"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("a,b,ratio,pass")
    proc = subprocess.run([sys.executable, "-m", "besselmult", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 1
