"""CLI behavior: exit codes, file outputs, determinism, config merging."""

import json
import subprocess
import sys

import numpy as np
import pytest

from surfspec.cli import main

K0 = 0.30685281944005469


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_csc_branch_report(capsys):
    code, out, _ = run(capsys, "csc", "--k", "0.2")
    assert code == 0
    d = json.loads(out)
    assert abs(d["k0"] - K0) < 1e-10
    assert len(d["branches"]) == 1
    assert d["branches"][0]["kind"] == "whole"


def test_csc_two_branch_report(capsys):
    code, out, _ = run(capsys, "csc", "--k", "0.5")
    assert code == 0
    d = json.loads(out)
    assert [b["kind"] for b in d["branches"]] == ["inner", "outer"]
    assert abs(d["branches"][1]["t_lo"] - 1.0) < 1e-10


def test_csc_near_bifurcation_report_ok_surface_refused(tmp_path, capsys):
    code, out, _ = run(capsys, "csc", "--k", "0.307")
    assert code == 0
    code, _, err = run(capsys, "csc", "--k", "0.307", "--obj", str(tmp_path / "x.obj"))
    assert code == 1
    assert "bifurcation" in err


def test_csc_writes_surface_files(tmp_path, capsys):
    prefix = str(tmp_path / "prof")
    obj = tmp_path / "out.obj"
    code, out, _ = run(
        capsys, "csc", "--k", "0.33", "--periods", "2",
        "--samples", "33", "--n-theta", "12",
        "--csv", prefix, "--obj", str(obj),
    )
    assert code == 0
    base = (tmp_path / "prof-base.csv").read_text().splitlines()
    stacked = (tmp_path / "prof-stacked.csv").read_text().splitlines()
    assert base[0] == "t,g,s"
    assert len(stacked) > len(base)
    # closing sample present: two full periods of vertical rise
    last = [float(x) for x in stacked[-1].split(",")]
    first = [float(x) for x in stacked[1].split(",")]
    assert np.isclose(last[0], first[0], rtol=1e-12)
    assert obj.exists() and obj.read_text().startswith("v ")


def test_spectrum_sphere_fem(tmp_path, capsys):
    out_file = tmp_path / "s.json"
    code, out, _ = run(
        capsys, "spectrum", "--surface", "sphere", "--count", "9",
        "--method", "fem", "--subdivisions", "3", "--json", str(out_file),
    )
    assert code == 0
    assert out == ""
    d = json.loads(out_file.read_text())
    assert d["backend"] == "fem"
    lam = d["lambda"]
    assert abs(lam[0]) < 1e-8
    assert np.allclose(lam[1:4], 2.0, rtol=5e-3)


def test_spectrum_csc_torus_constant_well(capsys):
    code, out, _ = run(
        capsys, "spectrum", "--surface", "csc-torus", "--k", "0.5",
        "--method", "sor", "--count", "6", "--n-cells", "128",
    )
    assert code == 0
    d = json.loads(out)
    assert abs(d["lambda"][0] + 1.0) < 1e-8


def test_spectrum_from_mesh_file(tmp_path, capsys):
    import surfspec as ss

    ss.save_mesh(ss.bumpy_sphere(2), tmp_path / "bumpy.obj")
    code, out, _ = run(
        capsys, "spectrum", "--mesh", str(tmp_path / "bumpy.obj"), "--count", "4",
    )
    assert code == 0
    d = json.loads(out)
    assert len(d["lambda"]) == 4


def test_spectrum_selector_required(capsys):
    code, _, err = run(capsys, "spectrum")
    assert code == 1
    code, _, err = run(
        capsys, "spectrum", "--surface", "sphere", "--mesh", "x.obj"
    )
    assert code == 1


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "spectrum", "--surface", "nope")[0] == 1
    assert run(capsys, "csc")[0] == 1          # --k is required
    assert run(capsys)[0] == 1                 # subcommand required
    # sor solver has no ellipsoid operator
    assert run(capsys, "spectrum", "--surface", "ellipsoid", "--method", "sor")[0] == 1


def test_bounds_pipeline_and_corruption(tmp_path, capsys):
    spec_file = tmp_path / "spec.json"
    code, _, _ = run(
        capsys, "spectrum", "--surface", "sphere", "--method", "sor",
        "--count", "6", "--n-cells", "256", "--json", str(spec_file),
    )
    assert code == 0

    code, out, _ = run(
        capsys, "bounds", "--surface", "sphere", "--subdivisions", "3",
        "--spectrum", str(spec_file),
    )
    assert code == 0
    d = json.loads(out)
    assert all(v["pass"] for v in d["verdicts"])

    good = json.loads(spec_file.read_text())
    e0, l0 = good["energy"][0], good["lambda"][0]
    good["energy"] = [e0 + (e - e0) * 10.0 for e in good["energy"]]
    good["lambda"] = [l0 + (l - l0) * 10.0 for l in good["lambda"]]
    bad_file = tmp_path / "bad.json"
    bad_file.write_text(json.dumps(good))
    code, out, _ = run(
        capsys, "bounds", "--surface", "sphere", "--subdivisions", "3",
        "--spectrum", str(bad_file),
    )
    assert code == 3
    d = json.loads(out)
    assert not all(v["pass"] for v in d["verdicts"])


def test_verify_fast_suite(tmp_path, capsys):
    rep_file = tmp_path / "rep.json"
    code, out, _ = run(capsys, "verify", "--suite", "fast", "--json", str(rep_file))
    assert code == 0
    assert "sphere" in out and "torus-2-1" in out
    d = json.loads(rep_file.read_text())
    assert d["ok"] is True
    assert [m["name"] for m in d["members"]] == ["sphere", "torus-2-1"]
    for m in d["members"]:
        assert m["report"]["verdicts"]


def test_json_outputs_are_deterministic(tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        p = tmp_path / name
        code, _, _ = run(
            capsys, "spectrum", "--surface", "torus", "--method", "sor",
            "--count", "8", "--n-cells", "256", "--json", str(p),
        )
        assert code == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_config_file_merging(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("surface = torus\nmethod = sor\ncount = 4\nn-cells = 128\n")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 0
    assert len(json.loads(out)["lambda"]) == 4
    # explicit flags override the config
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--count", "6")
    assert code == 0
    assert len(json.loads(out)["lambda"]) == 6
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    assert run(capsys, "spectrum", "--config", str(bad))[0] == 1


def test_console_script_entrypoint():
    proc = subprocess.run(
        [sys.executable, "-m", "surfspec.cli", "csc", "--k", "0.4"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["branches"]
