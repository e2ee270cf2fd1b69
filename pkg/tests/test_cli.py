import json
import os
import subprocess
import sys

import pytest

from speclab import __version__
from speclab.cli import main, parse_config
from speclab.errors import ConfigError


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds_example(capsys):
    code, out, _ = _run(capsys, "bounds", "--potential", "builtin:log3", "--estimates", "sol,clclr")
    assert code == 0
    rep = json.loads(out)
    rows = {r["estimate"]: r for r in rep["results"]}
    assert rows["Sol"]["status"] == "finite" and isinstance(rows["Sol"]["value"], float)
    assert rows["clCLR"]["value"] == "inf" and rows["clCLR"]["reason"]
    assert rep["version"] == __version__ and len(rep["config_hash"]) == 16


def test_sharp_constants_example(capsys):
    code, out, _ = _run(capsys, "sharp-constants", "--kappa", "1.559")
    assert code == 0
    row = json.loads(out)["results"][0]
    assert abs(row["Phi"] - 0.046) < 5e-4


def test_eigencount_example(capsys):
    code, out, _ = _run(capsys, "eigencount", "--potential", "builtin:alpha1_i", "--N", "2", "--alpha", "0.999")
    assert code == 0
    row = json.loads(out)["results"][0]
    assert row["count"] == row["lower"] == row["upper"] == 2


def test_phi_max(capsys):
    code, out, _ = _run(capsys, "phi-max", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# speclab") and "config_hash=" in lines[0]
    head, vals = lines[1].split(","), lines[2].split(",")
    row = dict(zip(head, vals))
    assert abs(float(row["kappa_star"]) - 1.559) < 0.01


def test_json_is_deterministic(capsys):
    argv = ("compare", "--potential", "builtin:inverse_square", "--estimates", "sol,grignad,lns", "--p", "2")
    _, a, _ = _run(capsys, *argv)
    _, b, _ = _run(capsys, *argv)
    assert a == b
    assert "Infinity" not in a and "NaN" not in a


def test_config_hash_tracks_parameters(capsys):
    _, a, _ = _run(capsys, "construct", "alpha1_i", "--N", "1")
    _, b, _ = _run(capsys, "construct", "alpha1_i", "--N", "2")
    assert json.loads(a)["config_hash"] != json.loads(b)["config_hash"]


def test_config_error_exit_code(capsys):
    code, _, err = _run(capsys, "bounds", "--potential", "builtin:nope")
    assert code == 1 and "config error" in err
    code, _, _ = _run(capsys, "construct", "alpha1_iii", "--param", "q=4", "--param", "p=1")
    assert code == 1


def test_numeric_failure_exit_code(capsys):
    code, out, err = _run(capsys, "eigencount", "--potential", "builtin:grig_radial", "--alpha", "1")
    assert code == 2 and "numeric failure" in err
    assert json.loads(out)["results"][0]["error"]


def test_failed_claim_exit_code(capsys):
    code, out, _ = _run(capsys, "verify", "alpha1_iii", "--param", "q=4", "--param", "p=1",
                        "--param", "force=true")
    assert code == 3
    assert any(r["status"] == "fail" for r in json.loads(out)["results"])


def test_inconsistency_exit_code(capsys, monkeypatch):
    from speclab import bounds as Bd
    from speclab.errors import InconsistentVerdict

    def boom(*a, **k):
        raise InconsistentVerdict("LNS is infinite while the weaker Sol is finite")

    monkeypatch.setattr(Bd, "compare", boom)
    code, _, err = _run(capsys, "compare", "--potential", "builtin:log3")
    assert code == 3 and "inconsistency" in err


def test_config_file_and_inline_potential(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("task = bounds\nestimates = RadMain\nformat = json\n"
                   "name = plateau\nregion t=[-inf, 0]\n  radial = 3\n  angular = 1\n")
    code, out, _ = _run(capsys, "bounds", "--config", str(cfg))
    assert code == 0
    row = json.loads(out)["results"][0]
    assert row["estimate"] == "RadMain" and row["status"] == "finite"


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        parse_config("colour = blue\n")
    with pytest.raises(ConfigError):
        parse_config("range = 1:2\n")


def test_out_file_and_table(tmp_path, capsys):
    out = tmp_path / "r.txt"
    code, printed, _ = _run(capsys, "sharp-constants", "--range", "1:2:3", "--format", "table", "--out", str(out))
    assert code == 0 and printed == ""
    text = out.read_text()
    assert text.count("[") >= 3 and "Phi" in text


def test_jobs_env_override(capsys, monkeypatch):
    monkeypatch.setenv("SPECLAB_JOBS", "2")
    code, out, _ = _run(capsys, "eigencount", "--potential", "builtin:alpha1_i", "--range", "0.9:0.99:3",
                        "--jobs", "1")
    assert code == 0
    assert [r["count"] for r in json.loads(out)["results"]] == [1, 1, 1]


def test_console_script():
    exe = os.path.join(os.path.dirname(sys.executable), "speclab")
    cmd = [exe] if os.path.exists(exe) else [sys.executable, "-m", "speclab.cli"]
    res = subprocess.run(cmd + ["phi-max"], capture_output=True, text=True, timeout=120)
    assert res.returncode == 0
    assert json.loads(res.stdout)["task"] == "phi-max"
