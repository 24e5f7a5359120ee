"""Curve-level Zeeman classifier.

A sampled polygonal curve on M is "continuous" in the projected fine
topology iff every segment is, within tolerance, the worldline of a
charged particle for some algebra-valued charge.  The classifier recovers
the per-segment charge (linear least squares for U(1), Gauss-Newton
shooting for SU(2)), thresholds the dynamics residual, and can
cross-check every verdict against the bundle-geodesic residual of the
lifted segment (the operational form of the topology equality).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .basegeom import causal_character
from .bundle import bundle_geodesic_residual
from .dynamics import ChargedState, geodesic_lift, integrate_charged_motion
from .errors import InvalidInputError, RejectedSegmentError
from .gaugefield import curvature_coeffs
from .liealg import ALGEBRA_DIM, LieAlgebraElement, group_identity
from .trajectory import Trajectory

MIN_SEGMENT_SAMPLES = 9


@dataclass(frozen=True)
class ClassifierTolerances:
    """All thresholds the classifier uses; config-visible."""

    residual_threshold: float = 1e-4
    lift_residual_threshold: float = 1e-4
    q_zero_tol: float = 1e-3
    timelike_margin: float = 1e-9
    endpoint_tol: float = 1e-9
    seed: int = 0
    n_multistart: int = 8
    shoot_tol: float = 1e-8
    shoot_max_nfev: int = 40
    shoot_points: int = 48

    def to_dict(self):
        return {k: getattr(self, k) for k in (
            "residual_threshold", "lift_residual_threshold", "q_zero_tol",
            "timelike_margin", "endpoint_tol", "seed", "n_multistart",
            "shoot_tol", "shoot_max_nfev", "shoot_points")}


class PolygonalCurve:
    """Chain of trajectories with coinciding endpoints.

    Velocities are optional per segment; missing ones are derived by
    4th-order finite differences when needed.
    """

    def __init__(self, segments, endpoint_tol=1e-9):
        if not segments:
            raise InvalidInputError("polygonal curve needs at least one segment")
        for seg in segments:
            if len(seg) < MIN_SEGMENT_SAMPLES:
                raise InvalidInputError(
                    f"each segment needs >= {MIN_SEGMENT_SAMPLES} samples")
        for a, b in zip(segments, segments[1:]):
            gap = np.linalg.norm(a.x[-1] - b.x[0])
            if gap > endpoint_tol:
                raise InvalidInputError(
                    f"consecutive segment endpoints differ by {gap:.3e}")
        self.segments = list(segments)

    def __len__(self):
        return len(self.segments)

    @classmethod
    def from_samples(cls, s, x, v=None, breakpoints=None, endpoint_tol=1e-9):
        """Build a polygonal from one sample block, splitting at breakpoints.

        When breakpoints are not supplied they are detected as samples
        where the discrete curvature of the velocity jumps by more than
        10x the local median.
        """
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        if breakpoints is None:
            breakpoints = detect_breakpoints(x)
        idx = [0] + sorted(int(b) for b in breakpoints) + [len(s) - 1]
        segs = []
        for i0, i1 in zip(idx, idx[1:]):
            sl = slice(i0, i1 + 1)
            segs.append(Trajectory(s[sl], x[sl],
                                   None if v is None else np.asarray(v)[sl]))
        return cls(segs, endpoint_tol)


def detect_breakpoints(x, factor=10.0, window=11):
    """Indices where the discrete velocity curvature jumps above the local median."""
    x = np.asarray(x, dtype=float)
    d2 = np.linalg.norm(x[2:] - 2.0 * x[1:-1] + x[:-2], axis=1)
    out = []
    for i in range(len(d2)):
        lo = max(0, i - window // 2)
        hi = min(len(d2), i + window // 2 + 1)
        med = np.median(np.concatenate([d2[lo:i], d2[i + 1:hi]]))
        if d2[i] > factor * max(med, 1e-300):
            out.append(i + 1)
    # collapse runs of adjacent detections to their peak
    merged = []
    for i in out:
        if merged and i - merged[-1][-1] <= 2:
            merged[-1].append(i)
        else:
            merged.append([i])
    return [max(run, key=lambda j: d2[j - 1]) for run in merged]


def fd_velocity(x, ds):
    """4th-order FD derivative of uniformly sampled positions."""
    return _fd_derivative(x, ds, order=1)


def fd_acceleration(x, ds):
    return _fd_derivative(x, ds, order=2)


def _fd_derivative(x, ds, order):
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 5:
        raise InvalidInputError("FD derivatives need at least 5 samples")
    out = np.empty_like(x)
    if order == 1:
        out[2:-2] = (-x[4:] + 8 * x[3:-1] - 8 * x[1:-3] + x[:-4]) / (12 * ds)
    else:
        out[2:-2] = (-x[4:] + 16 * x[3:-1] - 30 * x[2:-2]
                     + 16 * x[1:-3] - x[:-4]) / (12 * ds**2)
    # one-sided 4th-order stencils at the edges via local polynomial fits
    t = np.arange(5) * ds
    for i, base in ((0, 0), (1, 0), (n - 2, n - 5), (n - 1, n - 5)):
        dt = (i - base) * ds
        for col in range(x.shape[1]):
            coef = np.polyfit(t, x[base:base + 5, col], 4)
            dcoef = np.polyder(coef, order)
            out[i, col] = np.polyval(dcoef, dt)
    return out


def _segment_kinematics(segment):
    ds = segment.ds
    v = segment.v if segment.v is not None else fd_velocity(segment.x, ds)
    a = fd_acceleration(segment.x, ds)
    return v, a


def _velocity_scale(v):
    return 1.0 + float(np.mean(np.sum(v * v, axis=1)))


@dataclass
class SegmentReport:
    index: int
    timelike: bool
    min_margin: float
    q_hat: list
    residual: float
    accepted: bool
    reason: str = ""

    def to_dict(self):
        return {
            "index": self.index, "timelike": self.timelike,
            "min_margin": self.min_margin, "q_hat": list(self.q_hat),
            "residual": self.residual, "accepted": self.accepted,
            "reason": self.reason,
        }


@dataclass
class ClassificationReport:
    verdict: str  # ZG-continuous | Goebel-continuous | discontinuous
    segments: list
    tolerances: dict

    @property
    def accepted(self):
        return self.verdict != "discontinuous"

    def to_dict(self):
        return {"verdict": self.verdict,
                "segments": [r.to_dict() for r in self.segments],
                "tolerances": self.tolerances}


def _timelike_gate(m, segment, v, margin):
    vals = np.array([causal_character(m, segment.x[i], v[i], margin)[1]
                     for i in range(len(segment))])
    return bool(np.all(vals > margin)), float(vals.min())


def fit_charge(cfg, m, segment, tolerances=None, rng=None):
    """Recover the charge that best explains a segment; returns (Q_hat, residual).

    U(1): the dynamics is linear in the single charge coefficient and is
    solved by least squares over interior samples.  SU(2): Gauss-Newton
    shooting over the three charge coefficients against the forward Wong
    integrator, multi-started to dodge local minima.  Non-convergence is
    reported as residual = inf, never as an exception.
    """
    tolerances = tolerances or ClassifierTolerances()
    if len(segment) < MIN_SEGMENT_SAMPLES:
        raise InvalidInputError(
            f"segment needs >= {MIN_SEGMENT_SAMPLES} samples")
    v, a = _segment_kinematics(segment)
    ok, min_margin = _timelike_gate(m, segment, v, tolerances.timelike_margin)
    if not ok:
        raise RejectedSegmentError(
            f"segment not timelike (min margin {min_margin:.3e})")
    if cfg.group_id == "U1":
        return _fit_charge_linear(cfg, m, segment, v, a)
    return _fit_charge_shooting(cfg, m, segment, v, a, tolerances, rng)


def _interior_defect_parts(cfg, m, segment, v, a):
    """Per-sample target (a + Gamma v v) and unit-charge force columns."""
    d = cfg.dim
    lo, hi = 2, len(segment) - 2
    targets = []
    columns = []
    for i in range(lo, hi):
        x = segment.x[i]
        gam = m.christoffel(x)
        t = a[i] + np.einsum("mnl,n,l->m", gam, v[i], v[i])
        F = curvature_coeffs(cfg, x)  # (4, 4, d)
        ginv = m.inverse_components(x)
        # unit-charge force columns: [F_a]^mu_nu v^nu with q = T_a
        cols = np.einsum("ml,lna,n->ma", ginv, -F, v[i])
        targets.append(t)
        columns.append(cols)
    return np.asarray(targets), np.asarray(columns)


def _fit_charge_linear(cfg, m, segment, v, a):
    t, C = _interior_defect_parts(cfg, m, segment, v, a)
    A = C.reshape(-1, cfg.dim)
    b = t.ravel()
    qc, *_ = np.linalg.lstsq(A, b, rcond=None)
    defect = b - A @ qc
    residual = float(np.sqrt(np.mean(defect**2))) / _velocity_scale(v)
    return LieAlgebraElement(cfg.group_id, qc), residual


def _shooting_grid(segment, n_points):
    n = len(segment)
    stride = max(1, (n - 1) // (n_points - 1))
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    return idx


def _fit_charge_shooting(cfg, m, segment, v, a, tolerances, rng):
    d = cfg.dim
    rng = rng or np.random.default_rng(tolerances.seed)
    idx = _shooting_grid(segment, tolerances.shoot_points)
    s_rel = segment.s[idx] - segment.s[0]
    target = segment.x[idx]
    span = float(segment.s[-1] - segment.s[0])
    scale = 1.0 + float(np.max(np.linalg.norm(target - target[0], axis=1)))
    x0, v0 = segment.x[0], v[0]

    def model(qc):
        traj = integrate_charged_motion(
            cfg, m, ChargedState(x0, v0, LieAlgebraElement(cfg.group_id, qc)),
            span, tol=tolerances.shoot_tol, n_samples=max(len(idx), 2),
            keep_solution=True)
        return traj.meta["solution"](s_rel)[:4].T

    def resid_vec(qc):
        try:
            return ((model(qc) - target) / scale).ravel()
        except Exception:
            return np.full(target.size, 1e6)

    def sup_res(qc):
        try:
            return float(np.max(np.linalg.norm(model(qc) - target, axis=1))) / scale
        except Exception:
            return np.inf

    # linearized initialization (charge held constant over the segment)
    t, C = _interior_defect_parts(cfg, m, segment, v, a)
    q_lin, *_ = np.linalg.lstsq(C.reshape(-1, d), t.ravel(), rcond=None)

    starts = [q_lin, np.zeros(d)]
    starts += [rng.normal(scale=0.5, size=d) for _ in range(tolerances.n_multistart)]
    best_q, best_res = q_lin, np.inf
    stalled = 0
    for guess in starts:
        try:
            fit = least_squares(resid_vec, guess, method="lm",
                                max_nfev=tolerances.shoot_max_nfev)
            r = sup_res(fit.x)
        except Exception:
            continue
        if r < 0.9 * best_res:
            stalled = 0
        else:
            stalled += 1
        if r < best_res:
            best_q, best_res = fit.x, r
        if best_res <= tolerances.residual_threshold:
            break
        # repeated starts landing in the same basin: stop burning budget
        if stalled >= 2 and np.isfinite(best_res):
            break
    return LieAlgebraElement(cfg.group_id, np.asarray(best_q, dtype=float)), best_res


def classify(cfg, m, curve, tolerances=None):
    """Per-segment charged-motion membership test and overall verdict."""
    tolerances = tolerances or ClassifierTolerances()
    rng = np.random.default_rng(tolerances.seed)
    reports = []
    for i, seg in enumerate(curve.segments):
        try:
            q_hat, residual = fit_charge(cfg, m, seg, tolerances, rng)
            v, _ = _segment_kinematics(seg)
            _, min_margin = _timelike_gate(m, seg, v, tolerances.timelike_margin)
            accepted = residual <= tolerances.residual_threshold
            reports.append(SegmentReport(
                i, True, min_margin, q_hat.coeffs.tolist(), float(residual),
                accepted, "" if accepted else "residual above threshold"))
        except RejectedSegmentError as exc:
            reports.append(SegmentReport(
                i, False, -np.inf, [0.0] * cfg.dim, np.inf, False, str(exc)))
    if all(r.accepted for r in reports):
        if all(np.linalg.norm(r.q_hat) <= tolerances.q_zero_tol for r in reports):
            verdict = "Goebel-continuous"
        else:
            verdict = "ZG-continuous"
    else:
        verdict = "discontinuous"
    return ClassificationReport(verdict, reports, tolerances.to_dict())


@dataclass
class EquivalenceReport:
    """Paired verdicts: dynamics-residual classification vs lift residual."""

    classification: ClassificationReport
    lift_residuals: list
    lift_accepted: list
    agree: bool

    @property
    def lift_verdict(self):
        return all(self.lift_accepted)

    def to_dict(self):
        return {"classification": self.classification.to_dict(),
                "lift_residuals": list(self.lift_residuals),
                "lift_accepted": list(self.lift_accepted),
                "agree": self.agree}


def equivalence_check(cfg, m, curve, tolerances=None):
    """Classify the curve and cross-check every segment through its lift.

    For each segment the fitted charge is lifted to the bundle and the
    chart geodesic residual is thresholded; agreement of the two verdicts
    is the curve-level realization of the topology equality.
    """
    tolerances = tolerances or ClassifierTolerances()
    report = classify(cfg, m, curve, tolerances)
    lift_res = []
    lift_ok = []
    g0 = group_identity(cfg.group_id)
    for i, seg in enumerate(curve.segments):
        sr = report.segments[i]
        if not sr.timelike:
            lift_res.append(np.inf)
            lift_ok.append(False)
            continue
        v, _ = _segment_kinematics(seg)
        seg_v = Trajectory(seg.s, seg.x, v, group_id=seg.group_id, meta=seg.meta)
        Q = LieAlgebraElement(cfg.group_id, np.asarray(sr.q_hat))
        bt = geodesic_lift(cfg, seg_v, Q, g0)
        _, rmax = bundle_geodesic_residual(cfg, m, bt, stride=4)
        rnorm = rmax / _velocity_scale(v)
        lift_res.append(float(rnorm))
        lift_ok.append(rnorm <= tolerances.lift_residual_threshold)
    agree = report.accepted == all(lift_ok)
    return EquivalenceReport(report, lift_res, lift_ok, agree)
