"""Batch front end: config-driven runs with reproducible artifacts.

Usage:  kkzeeman --config run.json [--out DIR] [--seed N] [--tol X] [--quiet]

The command is taken from the config document.  Exit codes: 0 success,
2 config error, 3 scenario error, 4 integration error, 5 classification
error, 6 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as kio
from .basegeom import BaseMetric, minkowski
from .bundle import (
    BundlePoint,
    BundleVelocity,
    bundle_geodesic_residual,
    charge_along,
    integrate_bundle_geodesic,
    norm_along,
    project,
)
from .classifier import ClassifierTolerances, classify, equivalence_check
from .dynamics import (
    ChargedState,
    compare_projection,
    geodesic_lift,
    integrate_charged_motion,
)
from .errors import (
    ChartDomainError,
    ConfigError,
    IntegrationError,
    InvalidInputError,
    KKError,
    LiftError,
    RejectedSegmentError,
    ScenarioError,
)
from .gaugefield import bianchi_residual, curvature_coeffs, scenario
from .liealg import ALGEBRA_DIM, LieAlgebraElement, group_identity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SCENARIO = 3
EXIT_INTEGRATION = 4
EXIT_CLASSIFICATION = 5
EXIT_IO = 6

COMMANDS = ("simulate-bundle", "simulate-base", "lift", "compare", "classify",
            "check-field")

OUT_ROOT_ENV = "KKZEEMAN_OUT_ROOT"


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _vec(obj, name, length):
    arr = np.asarray(obj, dtype=float)
    _require(arr.shape == (length,), f"{name} must be a list of {length} numbers")
    return arr


def _build_metric(cfg_doc):
    kind = cfg_doc.get("metric", {}).get("kind", "minkowski")
    _require(kind == "minkowski",
             "CLI runs support only the 'minkowski' metric kind; curved "
             "diagonal metrics are a library-level feature")
    return minkowski()


def _build_field(cfg_doc):
    scen = cfg_doc.get("scenario")
    _require(isinstance(scen, dict) and "name" in scen,
             "config needs scenario: {name, params}")
    return scenario(scen["name"], **scen.get("params", {}))


def _integ(cfg_doc, tol_override):
    integ = cfg_doc.get("integrator", {})
    tol = float(tol_override if tol_override is not None
                else integ.get("tol", 1e-9))
    s_max = float(integ.get("s_max", 10.0))
    samples = int(integ.get("samples", 512))
    _require(tol > 0 and s_max > 0 and samples >= 2, "invalid integrator settings")
    return tol, s_max, samples


def _emit_plot(out_dir, traj, name="plot"):
    path = out_dir / f"{name}_x1x2.csv"
    with open(path, "w") as fh:
        fh.write("x1,x2\n")
        for row in traj.x:
            fh.write(f"{kio.fmt(row[1])},{kio.fmt(row[2])}\n")
    with open(out_dir / f"{name}.gp", "w") as fh:
        fh.write("set datafile separator ','\n"
                 f"plot '{path.name}' using 1:2 with lines title 'x1-x2'\n")
    return [path.name, f"{name}.gp"]


def _cmd_simulate_base(field, metric, cfg_doc, tol, s_max, samples, out_dir):
    ini = cfg_doc.get("initial", {})
    x0 = _vec(ini.get("x0", [0, 0, 0, 0]), "initial.x0", 4)
    v0 = _vec(ini.get("v0"), "initial.v0", 4)
    d = ALGEBRA_DIM[field.group_id]
    Q = _vec(ini.get("Q", [0] * d), "initial.Q", d)
    state = ChargedState(x0, v0, LieAlgebraElement(field.group_id, Q))
    traj = integrate_charged_motion(field, metric, state, s_max, tol=tol,
                                    n_samples=samples)
    kio.trajectory_to_csv(traj, out_dir / "trajectory.csv")
    kio.write_json(kio.trajectory_to_dict(traj), out_dir / "trajectory.json")
    outputs = ["trajectory.csv", "trajectory.json"]
    outputs += _emit_plot(out_dir, traj)
    return outputs


def _bundle_initial(field, cfg_doc):
    ini = cfg_doc.get("initial", {})
    x0 = _vec(ini.get("x0", [0, 0, 0, 0]), "initial.x0", 4)
    v0 = _vec(ini.get("v0"), "initial.v0", 4)
    d = ALGEBRA_DIM[field.group_id]
    vf = _vec(ini.get("v_fiber", [0] * d), "initial.v_fiber", d)
    p0 = BundlePoint(x0, group_identity(field.group_id))
    w0 = BundleVelocity(v0, LieAlgebraElement(field.group_id, vf))
    return p0, w0


def _cmd_simulate_bundle(field, metric, cfg_doc, tol, s_max, samples, out_dir):
    p0, w0 = _bundle_initial(field, cfg_doc)
    bt = integrate_bundle_geodesic(field, metric, p0, w0, s_max, tol=tol,
                                   n_samples=samples)
    charges, drift = charge_along(field, bt)
    h_series = norm_along(field, metric, bt)
    base = project(bt)
    base.q = charges
    base.group_id = field.group_id
    kio.trajectory_to_csv(base, out_dir / "trajectory.csv")
    kio.write_json(kio.bundle_trajectory_to_dict(bt),
                   out_dir / "bundle_trajectory.json")
    kio.write_json({
        "charge_drift": drift,
        "norm_drift": float(np.max(np.abs(h_series - h_series[0]))),
        "recenters": bt.meta.get("recenters", 0),
    }, out_dir / "report.json")
    outputs = ["trajectory.csv", "bundle_trajectory.json", "report.json"]
    outputs += _emit_plot(out_dir, base)
    return outputs


def _load_trajectory(path, group_id):
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"trajectory file {path} not found")
    if p.suffix == ".json":
        return kio.trajectory_from_dict(kio.read_json(p))
    return kio.trajectory_from_csv(p, group_id)


def _cmd_lift(field, metric, cfg_doc, tol, out_dir):
    traj_file = cfg_doc.get("trajectory_file")
    _require(traj_file, "lift needs trajectory_file")
    traj = _load_trajectory(traj_file, field.group_id)
    d = ALGEBRA_DIM[field.group_id]
    Q = _vec(cfg_doc.get("initial", {}).get("Q", [0] * d), "initial.Q", d)
    bt = geodesic_lift(field, traj, LieAlgebraElement(field.group_id, Q),
                       group_identity(field.group_id))
    _, charge_dev = charge_along(field, bt)
    _, res_max = bundle_geodesic_residual(field, metric, bt, stride=4)
    kio.write_json(kio.bundle_trajectory_to_dict(bt),
                   out_dir / "bundle_trajectory.json")
    kio.write_json({"charge_deviation": charge_dev,
                    "bundle_geodesic_residual": res_max},
                   out_dir / "report.json")
    return ["bundle_trajectory.json", "report.json"]


def _cmd_compare(field, metric, cfg_doc, tol, s_max, samples, out_dir):
    p0, w0 = _bundle_initial(field, cfg_doc)
    rep = compare_projection(field, metric, p0, w0, s_max, tol=tol,
                             n_samples=samples)
    kio.write_json(rep.to_dict(), out_dir / "report.json")
    return ["report.json"]


def _classifier_tolerances(cfg_doc, seed):
    cls = cfg_doc.get("classifier", {})
    kwargs = {k: cls[k] for k in (
        "residual_threshold", "lift_residual_threshold", "q_zero_tol",
        "timelike_margin", "n_multistart", "shoot_tol", "shoot_max_nfev",
        "shoot_points") if k in cls}
    return ClassifierTolerances(seed=seed, **kwargs)


def _cmd_classify(field, metric, cfg_doc, seed, out_dir):
    curve_file = cfg_doc.get("curve_file")
    _require(curve_file, "classify needs curve_file")
    p = Path(curve_file)
    if not p.exists():
        raise ConfigError(f"curve file {curve_file} not found")
    curve = kio.curve_from_dict(kio.read_json(p))
    tolerances = _classifier_tolerances(cfg_doc, seed)
    try:
        if cfg_doc.get("equivalence", False):
            rep = equivalence_check(field, metric, curve, tolerances)
        else:
            rep = classify(field, metric, curve, tolerances)
    except KKError:
        raise
    except Exception as exc:  # classifier internals
        raise RejectedSegmentError(str(exc))
    kio.write_json(rep.to_dict(), out_dir / "report.json")
    return ["report.json"]


def _cmd_check_field(field, metric, cfg_doc, seed, out_dir):
    n_pts = int(cfg_doc.get("check_points", 20))
    box = float(cfg_doc.get("check_box", 2.0))
    rng = np.random.default_rng(seed)
    pts = []
    tries = 0
    while len(pts) < n_pts and tries < 100 * n_pts:
        x = rng.uniform(-box, box, size=4)
        tries += 1
        try:
            field.potential_at(x)
        except ChartDomainError:
            continue
        pts.append(x)
    _require(len(pts) == n_pts, "could not sample enough in-domain points")
    bianchi = [bianchi_residual(field, x) for x in pts]
    fd_vs_analytic = None
    if field.curvature_analytic is not None:
        fd_vs_analytic = max(
            float(np.max(np.abs(curvature_coeffs(field, x, force_fd=True)
                                - curvature_coeffs(field, x))))
            for x in pts)
    kio.write_json({
        "scenario": field.name,
        "points": [list(map(float, x)) for x in pts],
        "bianchi_residual_max": max(bianchi),
        "bianchi_residuals": bianchi,
        "fd_vs_analytic_curvature": fd_vs_analytic,
    }, out_dir / "report.json")
    return ["report.json"]


def run(cfg_doc, out_dir, seed, tol_override=None, quiet=False):
    """Execute one configured command; returns the list of written files."""
    command = cfg_doc.get("command")
    _require(command in COMMANDS,
             f"config command must be one of {COMMANDS}, got {command!r}")
    metric = _build_metric(cfg_doc)
    field = _build_field(cfg_doc)
    tol, s_max, samples = _integ(cfg_doc, tol_override)

    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}")

    if command == "simulate-base":
        outputs = _cmd_simulate_base(field, metric, cfg_doc, tol, s_max,
                                     samples, out_dir)
    elif command == "simulate-bundle":
        outputs = _cmd_simulate_bundle(field, metric, cfg_doc, tol, s_max,
                                       samples, out_dir)
    elif command == "lift":
        outputs = _cmd_lift(field, metric, cfg_doc, tol, out_dir)
    elif command == "compare":
        outputs = _cmd_compare(field, metric, cfg_doc, tol, s_max, samples,
                               out_dir)
    elif command == "classify":
        _require(seed is not None,
                 "classify uses randomized multi-start and needs a seed")
        outputs = _cmd_classify(field, metric, cfg_doc, seed, out_dir)
    else:
        outputs = _cmd_check_field(field, metric, cfg_doc,
                                   0 if seed is None else seed, out_dir)

    manifest = {
        "command": command,
        "config_sha256": hashlib.sha256(
            json.dumps(cfg_doc, sort_keys=True).encode()).hexdigest(),
        "version": __version__,
        "seed": seed,
        "tolerances": {"tol": tol, "s_max": s_max, "samples": samples,
                       "classifier": _classifier_tolerances(
                           cfg_doc, 0 if seed is None else seed).to_dict()},
        "outputs": sorted(outputs),
    }
    kio.write_json(manifest, out_dir / "manifest.json")
    if not quiet:
        for name in sorted(outputs) + ["manifest.json"]:
            print(out_dir / name)
    return outputs + ["manifest.json"]


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="kkzeeman",
        description="Kaluza-Klein geodesic / Wong-dynamics / Zeeman-classifier runner")
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output directory "
                    f"(default: ${OUT_ROOT_ENV}/<command> or ./kkzeeman-out)")
    ap.add_argument("--seed", type=int, help="override config seed")
    ap.add_argument("--tol", type=float, help="override integrator tolerance")
    ap.add_argument("--quiet", action="store_true")
    args = ap.parse_args(argv)

    try:
        try:
            with open(args.config) as fh:
                cfg_doc = json.load(fh)
        except OSError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except json.JSONDecodeError as exc:
            print(f"config error: invalid JSON: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if not isinstance(cfg_doc, dict):
            print("config error: top-level JSON object expected", file=sys.stderr)
            return EXIT_CONFIG

        seed = args.seed if args.seed is not None else cfg_doc.get("seed")
        out_dir = args.out
        if out_dir is None:
            root = os.environ.get(OUT_ROOT_ENV, "kkzeeman-out")
            out_dir = Path(root) / str(cfg_doc.get("command", "run"))
        run(cfg_doc, out_dir, seed, args.tol, args.quiet)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (IntegrationError, LiftError, ChartDomainError) as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except (RejectedSegmentError,) as exc:
        print(f"classification error: {exc}", file=sys.stderr)
        return EXIT_CLASSIFICATION
    except InvalidInputError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
