import json

import numpy as np
import pytest

from kkzeeman import basegeom as bg
from kkzeeman import classifier as cl
from kkzeeman import dynamics as dy
from kkzeeman import gaugefield as gf
from kkzeeman import io as kio
from kkzeeman import liealg as la
from kkzeeman.cli import (
    EXIT_CLASSIFICATION,
    EXIT_CONFIG,
    EXIT_INTEGRATION,
    EXIT_OK,
    EXIT_SCENARIO,
    main,
)

MINK = bg.minkowski()


def write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def base_config(command, **extra):
    doc = {
        "command": command,
        "scenario": {"name": "u1-constant-B", "params": {"B": 0.5}},
        "integrator": {"tol": 1e-9, "s_max": 3.0, "samples": 65},
        "initial": {"x0": [0, 0, 0, 0], "v0": [1.2, 0.4, 0.1, 0.0],
                    "Q": [0.3], "v_fiber": [0.3]},
    }
    doc.update(extra)
    return doc


# --- config / error paths ------------------------------------------------

def test_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["--config", str(p)]) == EXIT_CONFIG


def test_unknown_command(tmp_path):
    cfgp = write_config(tmp_path, base_config("frobnicate"))
    assert main(["--config", cfgp, "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_unknown_scenario(tmp_path):
    doc = base_config("simulate-base")
    doc["scenario"]["name"] = "u1-monopole"
    cfgp = write_config(tmp_path, doc)
    assert main(["--config", cfgp, "--out", str(tmp_path / "o")]) == EXIT_SCENARIO


def test_non_timelike_initial_velocity_is_config_error(tmp_path):
    doc = base_config("simulate-base")
    doc["initial"]["v0"] = [1.0, 1.0, 0.0, 0.0]
    cfgp = write_config(tmp_path, doc)
    assert main(["--config", cfgp, "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_classify_requires_seed(tmp_path):
    doc = base_config("classify", curve_file=str(tmp_path / "c.json"))
    cfgp = write_config(tmp_path, doc)
    assert main(["--config", cfgp, "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_coulomb_start_inside_core_is_integration_error(tmp_path):
    doc = base_config("simulate-base")
    doc["scenario"] = {"name": "u1-coulomb", "params": {"kappa": 1.0}}
    doc["initial"]["x0"] = [0.0, 0.0, 0.0, 0.0]  # inside the excluded core
    cfgp = write_config(tmp_path, doc)
    assert main(["--config", cfgp, "--out", str(tmp_path / "o")]) == EXIT_INTEGRATION


# --- happy paths ---------------------------------------------------------

def test_simulate_base_outputs(tmp_path):
    cfgp = write_config(tmp_path, base_config("simulate-base"))
    out = tmp_path / "out"
    assert main(["--config", cfgp, "--out", str(out), "--quiet"]) == EXIT_OK
    for name in ("trajectory.csv", "trajectory.json", "manifest.json",
                 "plot_x1x2.csv", "plot.gp"):
        assert (out / name).exists(), name
    traj = kio.trajectory_from_csv(out / "trajectory.csv")
    assert len(traj) == 65
    man = kio.read_json(out / "manifest.json")
    assert man["command"] == "simulate-base"
    assert len(man["config_sha256"]) == 64


def test_simulate_bundle_report(tmp_path):
    cfgp = write_config(tmp_path, base_config("simulate-bundle"))
    out = tmp_path / "out"
    assert main(["--config", cfgp, "--out", str(out), "--quiet"]) == EXIT_OK
    rep = kio.read_json(out / "report.json")
    assert rep["charge_drift"] <= 1e-7
    assert rep["norm_drift"] <= 1e-7


def test_compare_report(tmp_path):
    cfgp = write_config(tmp_path, base_config("compare"))
    out = tmp_path / "out"
    assert main(["--config", cfgp, "--out", str(out), "--quiet"]) == EXIT_OK
    rep = kio.read_json(out / "report.json")
    assert rep["sup_position_deviation"] <= 1e-6
    assert rep["charge_consistency"] <= 1e-7


def test_lift_command(tmp_path):
    # produce a base run, then lift its trajectory from file
    cfgp = write_config(tmp_path, base_config("simulate-base"))
    out1 = tmp_path / "base"
    assert main(["--config", cfgp, "--out", str(out1), "--quiet"]) == EXIT_OK
    doc = base_config("lift", trajectory_file=str(out1 / "trajectory.csv"))
    cfgp2 = write_config(tmp_path, doc, "lift.json")
    out2 = tmp_path / "lift"
    assert main(["--config", cfgp2, "--out", str(out2), "--quiet"]) == EXIT_OK
    rep = kio.read_json(out2 / "report.json")
    assert rep["bundle_geodesic_residual"] <= 1e-3


def test_check_field_report(tmp_path):
    doc = base_config("check-field", seed=1, check_points=10)
    cfgp = write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["--config", cfgp, "--out", str(out), "--quiet"]) == EXIT_OK
    rep = kio.read_json(out / "report.json")
    assert rep["bianchi_residual_max"] <= 1e-6
    assert rep["fd_vs_analytic_curvature"] <= 1e-8
    assert len(rep["points"]) == 10


def make_curve_file(tmp_path, corrupt=False):
    cfg = gf.scenario("u1-constant-B", B=0.5)
    st = dy.ChargedState(np.zeros(4), np.array([1.3, 0.4, 0.2, 0.0]),
                         la.LieAlgebraElement("U1", [0.3]))
    traj = dy.integrate_charged_motion(cfg, MINK, st, 3.0, n_samples=101)
    x = traj.x.copy()
    if corrupt:
        bump = np.sin(2.0 * traj.s) * np.sin(1.05 * (traj.s - traj.s[-1]))
        x = x + 1e-2 * np.outer(bump, [0, 1.0, 0, 0])
    from kkzeeman.trajectory import Trajectory
    curve = cl.PolygonalCurve([Trajectory(traj.s, x)])
    path = tmp_path / ("curve_bad.json" if corrupt else "curve.json")
    kio.write_json(kio.curve_to_dict(curve, "U1"), path)
    return str(path)


def test_classify_command_verdicts(tmp_path):
    for corrupt, verdict in ((False, "ZG-continuous"), (True, "discontinuous")):
        curve_file = make_curve_file(tmp_path, corrupt)
        doc = base_config("classify", curve_file=curve_file, seed=0,
                          equivalence=True)
        cfgp = write_config(tmp_path, doc, f"cls{corrupt}.json")
        out = tmp_path / f"cls-{corrupt}"
        assert main(["--config", cfgp, "--out", str(out), "--quiet"]) == EXIT_OK
        rep = kio.read_json(out / "report.json")
        assert rep["classification"]["verdict"] == verdict
        assert rep["agree"]


def test_reruns_byte_identical(tmp_path):
    doc = base_config("simulate-bundle", seed=3)
    cfgp = write_config(tmp_path, doc)
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["--config", cfgp, "--out", str(out1), "--quiet"]) == EXIT_OK
    assert main(["--config", cfgp, "--out", str(out2), "--quiet"]) == EXIT_OK
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(p.name for p in out2.iterdir())
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_out_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("KKZEEMAN_OUT_ROOT", str(tmp_path / "root"))
    monkeypatch.chdir(tmp_path)
    cfgp = write_config(tmp_path, base_config("simulate-base"))
    assert main(["--config", cfgp, "--quiet"]) == EXIT_OK
    assert (tmp_path / "root" / "simulate-base" / "manifest.json").exists()


def test_tol_override_recorded(tmp_path):
    cfgp = write_config(tmp_path, base_config("simulate-base"))
    out = tmp_path / "out"
    assert main(["--config", cfgp, "--out", str(out), "--tol", "1e-7",
                 "--quiet"]) == EXIT_OK
    man = kio.read_json(out / "manifest.json")
    assert man["tolerances"]["tol"] == 1e-7
