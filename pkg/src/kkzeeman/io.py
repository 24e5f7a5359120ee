"""Trajectory / curve / report serialization.

CSV columns are ``s,x0,x1,x2,x3,v0,v1,v2,v3[,q1..qd]`` with floats at 17
significant digits; JSON variants carry metadata and fiber data.  All
writers are deterministic (sorted keys, fixed float formatting) so that
identical runs produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InvalidInputError
from .liealg import ALGEBRA_DIM, GROUPS, GroupElement
from .trajectory import BundleTrajectory, Trajectory


def fmt(x):
    return format(float(x), ".17g")


def trajectory_to_csv(traj, path):
    if traj.v is None:
        raise InvalidInputError("CSV export needs velocities")
    cols = ["s", "x0", "x1", "x2", "x3", "v0", "v1", "v2", "v3"]
    d = 0
    if traj.q is not None:
        d = traj.q.shape[1]
        cols += [f"q{i + 1}" for i in range(d)]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(len(traj)):
            row = [traj.s[i], *traj.x[i], *traj.v[i]]
            if d:
                row += list(traj.q[i])
            fh.write(",".join(fmt(v) for v in row) + "\n")


def trajectory_from_csv(path, group_id=None):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if header[:9] != ["s", "x0", "x1", "x2", "x3", "v0", "v1", "v2", "v3"]:
        raise InvalidInputError(f"unexpected CSV header in {path}")
    d = len(header) - 9
    q = data[:, 9:] if d else None
    if d and group_id is None:
        group_id = {1: "U1", 3: "SU2"}.get(d)
    return Trajectory(data[:, 0], data[:, 1:5], data[:, 5:9], q,
                      group_id=group_id)


def _meta_public(meta):
    return {k: v for k, v in meta.items()
            if isinstance(v, (int, float, str, bool))}


def trajectory_to_dict(traj):
    out = {
        "format": "kkzeeman-trajectory",
        "s": traj.s.tolist(),
        "x": traj.x.tolist(),
        "meta": _meta_public(traj.meta),
    }
    if traj.group_id is not None:
        out["group"] = traj.group_id
    if traj.v is not None:
        out["v"] = traj.v.tolist()
    if traj.q is not None:
        out["q"] = traj.q.tolist()
    return out


def trajectory_from_dict(obj):
    if obj.get("format") != "kkzeeman-trajectory":
        raise InvalidInputError("not a trajectory document")
    return Trajectory(np.array(obj["s"]), np.array(obj["x"]),
                      np.array(obj["v"]) if "v" in obj else None,
                      np.array(obj["q"]) if "q" in obj else None,
                      group_id=obj.get("group"), meta=dict(obj.get("meta", {})))


def bundle_trajectory_to_dict(bt):
    mats = bt.fiber_matrices()
    return {
        "format": "kkzeeman-bundle-trajectory",
        "group": bt.group_id,
        "s": bt.s.tolist(),
        "x": bt.x.tolist(),
        "v_base": bt.v_base.tolist(),
        "v_fiber": bt.v_fiber.tolist(),
        "fiber_re": mats.real.tolist(),
        "fiber_im": mats.imag.tolist(),
        "meta": _meta_public(bt.meta),
    }


def bundle_trajectory_from_dict(obj):
    if obj.get("format") != "kkzeeman-bundle-trajectory":
        raise InvalidInputError("not a bundle-trajectory document")
    group_id = obj["group"]
    mats = np.array(obj["fiber_re"]) + 1j * np.array(obj["fiber_im"])
    fibers = [GroupElement(group_id, m) for m in mats]
    return BundleTrajectory(group_id, np.array(obj["s"]), np.array(obj["x"]),
                            fibers, np.array(obj["v_base"]),
                            np.array(obj["v_fiber"]),
                            meta=dict(obj.get("meta", {})))


def curve_to_dict(curve, group_id=None):
    return {
        "format": "kkzeeman-curve",
        "group": group_id,
        "segments": [trajectory_to_dict(seg) for seg in curve.segments],
    }


def curve_from_dict(obj, endpoint_tol=1e-9):
    from .classifier import PolygonalCurve

    if obj.get("format") != "kkzeeman-curve":
        raise InvalidInputError("not a curve document")
    segs = [trajectory_from_dict(s) for s in obj["segments"]]
    return PolygonalCurve(segs, endpoint_tol)


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
