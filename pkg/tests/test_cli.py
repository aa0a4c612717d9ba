import json
import subprocess
import sys

import numpy as np
import pytest

from hypersga import cli, transform
from hypersga.geometry import sample_spatial

FAST_CLASSICAL = ["--quad", "points=8", "--quad", "ladder_points=3", "--quad", "jacobi_points=2",
                  "--quad", "jacobi_triples=2"]


def run(args, tmp_path, name="out"):
    out = tmp_path / name
    code = cli.run(list(args) + ["--out", str(out)])
    return code, out


def test_verify_classical_pass_and_formats(tmp_path):
    code, out = run(["verify-classical", "--format", "both", *FAST_CLASSICAL], tmp_path)
    assert code == cli.EXIT_PASS
    rep = json.loads((out / "classical.json").read_text())
    assert rep["pass"] and rep["seed"] == 0 and rep["build_id"]
    assert {"relation", "equation", "residual_max", "tolerance", "pass", "point_seed"} <= set(rep["rows"][0])
    header = (out / "classical.csv").read_text().splitlines()[0]
    assert header == "relation,equation,point_seed,residual_max,tolerance,pass"


def test_unattainable_tolerance_fails(tmp_path):
    code, _ = run(["verify-classical", "--tolerance", "structure=1e-30", *FAST_CLASSICAL], tmp_path)
    assert code == cli.EXIT_FAIL


def test_same_seed_same_report(tmp_path):
    _, a = run(["verify-classical", "--seed", "7", *FAST_CLASSICAL], tmp_path, "a")
    _, b = run(["verify-classical", "--seed", "7", *FAST_CLASSICAL], tmp_path, "b")
    ja = json.loads((a / "classical.json").read_text())
    jb = json.loads((b / "classical.json").read_text())
    for j in (ja, jb):
        j.pop("wall_time")
        j["notes"]["command_line"] = [s for s in j["notes"]["command_line"] if "/a" not in s and "/b" not in s]
    assert ja == jb


@pytest.mark.parametrize("args", [
    ["verify-classical", "--tolerance", "nope=1"],
    ["verify-classical", "--quad", "sphere_degree=3"],
    ["verify-quantum", "--rho-grid", "1,x"],
    ["verify-quantum", "--rho-grid=0,1"],
    ["transform", "roundtrip", "--function", "delta"],
    ["transform", "roundtrip", "--quad", "rho_count=480"],
    ["transform", "inverse"],
    ["transform", "--tolerance", "structure"],
    ["frobnicate"],
])
def test_configuration_errors(args, tmp_path):
    code, _ = run(args, tmp_path)
    assert code == cli.EXIT_CONFIG


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# classical run\nseed=3\nquad=points=4\nquad=ladder_points=2\n"
                   "quad=jacobi_points=1\nquad=jacobi_triples=1\nformat=csv\n")
    code, out = run(["verify-classical", "--config", str(cfg), "--seed", "5", "--format", "json"], tmp_path)
    assert code == cli.EXIT_PASS
    rep = json.loads((out / "classical.json").read_text())
    assert rep["seed"] == 5
    assert rep["rows"][0]["points"] == 4
    assert not (out / "classical.csv").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    assert run(["verify-classical", "--config", str(bad)], tmp_path)[0] == cli.EXIT_CONFIG


def test_command_taken_from_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = verify-classical\nseed = 2\nquad = points=4\nquad = ladder_points=2\n"
                   "quad = jacobi_points=1\nquad = jacobi_triples=1\n")
    code, out = run(["--config", str(cfg)], tmp_path)
    assert code == cli.EXIT_PASS
    assert json.loads((out / "classical.json").read_text())["seed"] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("command = verify-classical\ncolour = blue\n")
    assert run(["--config", str(bad)], tmp_path)[0] == cli.EXIT_CONFIG


def test_verify_quantum_rho_grid(tmp_path):
    code, out = run(["verify-quantum", "--rho-grid=−3,−1,0.5,2"], tmp_path)
    assert code == cli.EXIT_PASS
    rep = json.loads((out / "quantum.json").read_text())
    assert rep["notes"]["rho_grid"] == [-3.0, -1.0, 0.5, 2.0]
    pre = rep["notes"]["prefactor_resolution"]
    assert pre["printed"]["base"] == 2.0 and pre["corrected"]["base"] == 4.0


def test_forward_reload_inverse_is_bitwise(tmp_path):
    code, out = run(["transform", "forward", "--function", "gaussian", "--param", "s=1"], tmp_path)
    assert code == cli.EXIT_PASS
    spec = out / "spectral_gaussian.csv"
    assert (out / "rho_abs_gaussian.csv").exists()
    code, out2 = run(["transform", "inverse", "--input", str(spec), "--points", "16",
                      "--function", "gaussian", "--param", "s=1"], tmp_path, "inv")
    assert code == cli.EXIT_PASS
    table = np.loadtxt(out2 / "reconstruction.csv", delimiter=",", skiprows=1)
    f = transform.gaussian(1.0)
    direct = transform.inverse_transform(transform.forward_transform(f), sample_spatial(16, 0, 1.0))
    assert np.array_equal(table[:, 4], direct)


def test_roundtrip_gaussian(tmp_path, capsys):
    code, out = run(["transform", "roundtrip", "--function", "gaussian", "--param", "s=1"], tmp_path)
    assert code == cli.EXIT_PASS
    assert "relative L2 error" in capsys.readouterr().out
    rep = json.loads((out / "transform_roundtrip.json").read_text())
    assert rep["rows"][0]["residual_max"] < 1e-2
    assert min(rep["notes"]["rho_refinement"]["orders"]) >= 2.0


def test_strict_turns_truncation_into_exit_3(tmp_path):
    args = ["transform", "forward", "--function", "offcenter_bump", "--quad", "rho_max=4", "--quad", "rho_count=81"]
    assert run(args, tmp_path, "loose")[0] == cli.EXIT_FAIL
    assert run(args + ["--strict"], tmp_path, "strict")[0] == cli.EXIT_NUMERIC


def test_atomic_write_leaves_no_temporaries(tmp_path):
    p = tmp_path / "d" / "r.txt"
    cli.atomic_write(p, "one")
    cli.atomic_write(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in p.parent.iterdir()] == ["r.txt"]


def test_help_documents_defaults():
    text = cli.build_parser()._subparsers._group_actions[0].choices["transform"].format_help()
    assert "rho_count=481" in text and "roundtrip=0.01" in text


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hypersga", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "hypersga" in proc.stdout
