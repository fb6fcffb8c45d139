import csv
import io
import json
import os
import subprocess
import sys

import pytest

from hm_lab.cli import Sweep, UsageError, main, parse_sweep, read_config
from hm_lab.pipelines import MODULE_COMMANDS


def run_cli(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err.decode()


def test_verify_all_example(capsysbinary):
    code, out, _ = run_cli(capsysbinary, "verify-all", "--lambda", "1", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert abs(d["results"]["energy.E_HH"] + 1 / 12) < 1e-8
    assert all(c["pass"] for c in d["checks"])
    assert d["params"]["lambda"] == [1.0]


def test_compare_sweep_csv(capsysbinary):
    code, out, _ = run_cli(capsysbinary, "compare", "--sweep", "a=-5..5:41", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.decode())))
    assert len(rows) == 41
    ratios = [float(r["ratio"]) for r in rows]
    assert ratios[20] == 1.0
    assert all(x <= 1.0 for x in ratios)
    assert all(x < y for x, y in zip(ratios[:20], ratios[1:21]))  # increasing towards a = 0
    assert all(x > y for x, y in zip(ratios[20:], ratios[21:]))


@pytest.mark.parametrize(
    "argv",
    [
        ["curvature", "--r", "0.5"],
        ["complex", "--n", "5"],
        ["compare", "--sweep", "G=1..2:3"],
        ["compare", "--sweep", "a=1..2"],
        ["energy", "--format", "xml"],
        ["energy", "--ell", "-1"],
        ["energy", "--lambda", "1,2"],
        ["bogus"],
        ["energy", "--tol-fd", "0"],
        ["regularity", "--r0", "0", "--a", "1"],
    ],
)
def test_usage_errors(capsysbinary, argv):
    code, _, err = run_cli(capsysbinary, *argv)
    assert code == 2
    assert "hm-lab" in err


def test_unwritable_destination(capsysbinary, tmp_path):
    code, _, err = run_cli(capsysbinary, "compare", "--out", str(tmp_path / "missing" / "r.json"))
    assert code == 4
    assert "I/O" in err


def test_failed_checks_exit_code(capsysbinary):
    # this member (ratio - 1 grows like ell^2) misses the literal cone tolerance at rho = 1e-2 r_plus
    code, out, _ = run_cli(capsysbinary, "regularity", "--n", "5", "--ell", "3", "--format", "json")
    d = json.loads(out)
    failed = [c["name"] for c in d["checks"] if not c["pass"]]
    assert code == 1
    assert failed == ["cone_ratio"]


def test_out_file_matches_stdout(capsysbinary, tmp_path):
    path = tmp_path / "r.csv"
    assert run_cli(capsysbinary, "energy", "--a", "0.5", "--format", "csv", "--out", str(path))[0] == 0
    code, out, _ = run_cli(capsysbinary, "energy", "--a", "0.5", "--format", "csv")
    assert path.read_bytes() == out


def test_config_precedence(capsysbinary, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# member\nn = 4\na = 0.5   # deformation\nformat = json\ntol-fd = 1e-5\n", encoding="utf-8")
    code, out, _ = run_cli(capsysbinary, "curvature", "--config", str(cfg), "--a", "-1")
    d = json.loads(out)
    assert code == 0
    assert d["params"]["n"] == 4
    assert d["params"]["a"] == -1.0
    assert d["params"]["tol_fd"] == 1e-5


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    with pytest.raises(UsageError):
        read_config(str(bad))
    bad.write_text("n 3\n")
    with pytest.raises(UsageError):
        read_config(str(bad))
    with pytest.raises(UsageError):
        read_config(str(tmp_path / "absent.cfg"))


def test_parse_sweep():
    assert parse_sweep("a=-5..5:41") == Sweep("a", -5.0, 5.0, 41)
    assert parse_sweep(" r0 = 0.5..2:4 ").values() == [0.5, 1.0, 1.5, 2.0]
    assert parse_sweep("n=3..6:4").values() == [3, 4, 5, 6]
    assert parse_sweep("ell=2..3:1").values() == [2.0]
    with pytest.raises(UsageError):
        parse_sweep("n=3..6:3").values()
    for bad in ("a=0..1:0", "a=0..inf:3", "x=0..1:3", "a=0:1"):
        with pytest.raises(UsageError):
            parse_sweep(bad)


def test_n_sweep(capsysbinary):
    code, out, _ = run_cli(capsysbinary, "energy", "--sweep", "n=3..5:3", "--format", "json")
    d = json.loads(out)
    assert code == 0
    assert [row["n"] for row in d["results"]] == [3, 4, 5]
    assert all(row["pass"] for row in d["results"])
    assert d["checks"][0]["name"].startswith("n=3/")


def test_thread_cap(capsysbinary, monkeypatch):
    monkeypatch.setenv("HM_LAB_THREADS", "zero")
    assert run_cli(capsysbinary, "compare", "--sweep", "a=0..1:2")[0] == 2
    monkeypatch.setenv("HM_LAB_THREADS", "1")
    one = run_cli(capsysbinary, "compare", "--sweep", "a=-1..1:5", "--format", "json")
    monkeypatch.setenv("HM_LAB_THREADS", "3")
    three = run_cli(capsysbinary, "compare", "--sweep", "a=-1..1:5", "--format", "json")
    assert one[0] == three[0] == 0
    assert one[1] == three[1]


@pytest.mark.parametrize("command", list(MODULE_COMMANDS))
def test_each_module_reports_checks(capsysbinary, command):
    argv = [command, "--format", "json"] + (["--n", "4"] if command == "complex" else [])
    code, out, _ = run_cli(capsysbinary, *argv)
    d = json.loads(out)
    names = [c["name"] for c in d["checks"]]
    assert code == 0
    assert names and len(names) == len(set(names))
    assert all(set(c) == {"name", "value", "reference", "deviation", "pass"} for c in d["checks"])


def test_deterministic_output(capsysbinary):
    first = run_cli(capsysbinary, "verify-all", "--n", "4", "--a", "0.3")
    second = run_cli(capsysbinary, "verify-all", "--n", "4", "--a", "0.3")
    assert first[1] == second[1]


def test_figures(capsysbinary, tmp_path):
    code, _, err = run_cli(capsysbinary, "verify-all", "--n", "4", "--figures", str(tmp_path))
    assert code == 0
    pngs = sorted(os.listdir(tmp_path))
    assert "energy_convergence.png" in pngs and "complex_structure.png" in pngs
    assert all((tmp_path / p).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for p in pngs)
    assert err.count("wrote") == len(pngs)


def test_sweep_figures(capsysbinary, tmp_path):
    code, _, _ = run_cli(capsysbinary, "compare", "--sweep", "a=-2..2:5", "--figures", str(tmp_path))
    assert code == 0
    assert "compare_sweep_a_ratio.png" in os.listdir(tmp_path)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hm_lab", "compare", "--a", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "checks passed" in proc.stdout


def test_non_convergence_exit_code(capsysbinary, monkeypatch):
    from hm_lab import energy
    from hm_lab.errors import ConvergenceError

    def refuse(*args, **kw):
        raise ConvergenceError("spread too large")

    monkeypatch.setattr(energy, "_limit", refuse)
    code, _, err = run_cli(capsysbinary, "energy")
    assert code == 3
    assert "not converged" in err
