import numpy as np
import pytest

from kkzeeman import basegeom as bg
from kkzeeman import classifier as cl
from kkzeeman import dynamics as dy
from kkzeeman import gaugefield as gf
from kkzeeman import liealg as la
from kkzeeman import transforms as tr
from kkzeeman.errors import InvalidInputError, RejectedSegmentError
from kkzeeman.trajectory import Trajectory

MINK = bg.minkowski()

U1_CFG = gf.scenario("u1-constant-B", B=0.5)
SU2_CFG = gf.scenario("su2-constant", a=0.4, b=0.3)


def wong_segment(cfg, x0, v0, q_coeffs, s0=0.0, s_max=3.0, n=121):
    """Exact charged-motion segment starting at (x0, v0) with the given charge."""
    st = dy.ChargedState(np.asarray(x0, float), np.asarray(v0, float),
                         la.LieAlgebraElement(cfg.group_id, q_coeffs))
    traj = dy.integrate_charged_motion(cfg, MINK, st, s_max - s0, tol=1e-11,
                                       n_samples=n)
    return Trajectory(traj.s + s0, traj.x, traj.v, meta=traj.meta)


def two_segment_curve(cfg, charges, kick=np.array([0.0, 0.3, -0.2, 0.1])):
    """Two charged segments joined at a velocity kink."""
    seg1 = wong_segment(cfg, np.zeros(4), [1.3, 0.4, 0.2, 0.0], charges[0])
    v1 = seg1.v[-1] + kick
    seg2 = wong_segment(cfg, seg1.x[-1], v1, charges[1],
                        s0=seg1.s[-1], s_max=seg1.s[-1] + 3.0)
    return cl.PolygonalCurve([seg1, seg2])


# --- curve construction --------------------------------------------------

def test_polygonal_rejects_gaps_and_short_segments():
    seg = wong_segment(U1_CFG, np.zeros(4), [1.2, 0.3, 0, 0], [0.3])
    far = Trajectory(seg.s + seg.s[-1],
                     seg.x + np.array([0, 1.0, 0, 0]), seg.v)
    with pytest.raises(InvalidInputError):
        cl.PolygonalCurve([seg, far])
    s = np.linspace(0, 1, 5)
    with pytest.raises(InvalidInputError):
        cl.PolygonalCurve([Trajectory(s, np.outer(s, [1.2, 0, 0, 0]))])


def test_breakpoint_detection():
    curve = two_segment_curve(U1_CFG, [[0.3], [-0.2]])
    s = np.concatenate([curve.segments[0].s, curve.segments[1].s[1:]])
    x = np.concatenate([curve.segments[0].x, curve.segments[1].x[1:]])
    bps = cl.detect_breakpoints(x)
    assert bps == [len(curve.segments[0]) - 1]
    rebuilt = cl.PolygonalCurve.from_samples(s, x)
    assert len(rebuilt) == 2


def test_fd_derivatives_accuracy():
    ds = 0.02
    s = np.arange(80) * ds
    x = np.stack([np.cos(s), np.sin(2 * s), s**3, np.exp(0.3 * s)], axis=1)
    v = cl.fd_velocity(x, ds)
    a = cl.fd_acceleration(x, ds)
    v_true = np.stack([-np.sin(s), 2 * np.cos(2 * s), 3 * s**2,
                       0.3 * np.exp(0.3 * s)], axis=1)
    a_true = np.stack([-np.cos(s), -4 * np.sin(2 * s), 6 * s,
                       0.09 * np.exp(0.3 * s)], axis=1)
    assert np.max(np.abs(v - v_true)) <= 2e-6
    # interior stencil is tighter than the one-sided edge fits
    assert np.max(np.abs(a[2:-2] - a_true[2:-2])) <= 1e-5
    assert np.max(np.abs(a - a_true)) <= 5e-4


# --- charge fitting ------------------------------------------------------

def test_fit_charge_u1_exact_segment():
    seg = wong_segment(U1_CFG, np.zeros(4), [1.3, 0.5, 0.1, 0.0], [0.3])
    q_hat, res = cl.fit_charge(U1_CFG, MINK, seg)
    assert abs(q_hat.coeffs[0] - 0.3) <= 1e-4
    assert res <= 1e-5


def test_fit_charge_u1_position_only():
    seg = wong_segment(U1_CFG, np.zeros(4), [1.3, 0.5, 0.1, 0.0], [-0.25])
    seg = Trajectory(seg.s, seg.x)  # drop velocities, force FD kinematics
    q_hat, res = cl.fit_charge(U1_CFG, MINK, seg)
    assert abs(q_hat.coeffs[0] + 0.25) <= 1e-4
    assert res <= 1e-5


def test_fit_charge_su2_shooting():
    q_true = [0.25, -0.15, 0.2]
    seg = wong_segment(SU2_CFG, np.zeros(4), [1.3, 0.4, 0.2, 0.1], q_true)
    q_hat, res = cl.fit_charge(SU2_CFG, MINK, seg)
    assert np.max(np.abs(q_hat.coeffs - q_true)) <= 1e-3
    assert res <= 1e-6


def test_fit_charge_rejects_spacelike_segment():
    s = np.linspace(0, 2, 60)
    x = np.outer(s, [0.5, 1.2, 0.0, 0.0])  # spacelike straight line
    with pytest.raises(RejectedSegmentError):
        cl.fit_charge(U1_CFG, MINK, Trajectory(s, x))


def test_fit_charge_corrupted_segment_high_residual():
    seg = wong_segment(U1_CFG, np.zeros(4), [1.3, 0.5, 0.1, 0.0], [0.3])
    noise = 1e-2 * np.sin(4.0 * seg.s)
    x = seg.x + np.outer(noise, [0.0, 1.0, 0.0, 0.0])
    _, res = cl.fit_charge(U1_CFG, MINK, Trajectory(seg.s, x))
    assert res >= 10 * cl.ClassifierTolerances().residual_threshold


# --- classification ------------------------------------------------------

def test_classify_charged_curve():
    curve = two_segment_curve(U1_CFG, [[0.3], [-0.2]])
    rep = cl.classify(U1_CFG, MINK, curve)
    assert rep.verdict == "ZG-continuous"
    assert rep.accepted
    assert [r.accepted for r in rep.segments] == [True, True]
    assert abs(rep.segments[0].q_hat[0] - 0.3) <= 1e-3
    assert abs(rep.segments[1].q_hat[0] + 0.2) <= 1e-3


def test_classify_free_curve_is_goebel():
    curve = two_segment_curve(U1_CFG, [[0.0], [0.0]])
    rep = cl.classify(U1_CFG, MINK, curve)
    assert rep.verdict == "Goebel-continuous"


def test_classify_corrupted_curve():
    curve = two_segment_curve(U1_CFG, [[0.3], [-0.2]])
    seg2 = curve.segments[1]
    noise = 1e-2 * np.sin(3.0 * (seg2.s - seg2.s[0])) * np.sin(
        0.9 * (seg2.s - seg2.s[-1]))
    bad2 = Trajectory(seg2.s, seg2.x + np.outer(noise, [0, 1.0, 0, 0]))
    bad = cl.PolygonalCurve([curve.segments[0], bad2], endpoint_tol=1e-6)
    rep = cl.classify(U1_CFG, MINK, bad)
    assert rep.verdict == "discontinuous"
    assert rep.segments[0].accepted and not rep.segments[1].accepted


def test_classify_su2_curve():
    curve = two_segment_curve(SU2_CFG, [[0.25, -0.15, 0.2], [0.1, 0.2, -0.1]])
    rep = cl.classify(SU2_CFG, MINK, curve)
    assert rep.verdict == "ZG-continuous"
    assert np.max(np.abs(np.asarray(rep.segments[0].q_hat)
                         - [0.25, -0.15, 0.2])) <= 1e-2


def test_classify_deterministic_given_seed():
    curve = two_segment_curve(SU2_CFG, [[0.25, -0.15, 0.2], [0.1, 0.2, -0.1]])
    tols = cl.ClassifierTolerances(seed=7)
    r1 = cl.classify(SU2_CFG, MINK, curve).to_dict()
    r2 = cl.classify(SU2_CFG, MINK, curve).to_dict()
    assert r1 == r2
    r3 = cl.classify(SU2_CFG, MINK, curve, tols).to_dict()
    assert r3["verdict"] == r1["verdict"]


# --- verdict invariance under frame changes ------------------------------

def test_verdict_poincare_invariant_abelian():
    curve = two_segment_curve(U1_CFG, [[0.3], [-0.2]])
    L = tr.lorentz_boost(0.4) @ tr.spatial_rotation(0.8)
    b = np.array([0.3, -1.0, 0.5, 0.0])
    lam = 1.5
    cfg2 = tr.transform_config(U1_CFG, L, b, lam)
    moved = cl.PolygonalCurve(
        [tr.transform_trajectory(seg, L, b, lam) for seg in curve.segments],
        endpoint_tol=1e-6)
    rep = cl.classify(U1_CFG, MINK, curve)
    rep2 = cl.classify(cfg2, MINK, moved)
    assert rep2.verdict == rep.verdict == "ZG-continuous"
    # dilatation rescales the recovered charge by lam
    q1 = np.asarray([r.q_hat for r in rep.segments])
    q2 = np.asarray([r.q_hat for r in rep2.segments])
    assert np.max(np.abs(q2 - lam * q1)) <= 1e-3


# --- equivalence with the lift criterion ---------------------------------

def test_equivalence_accepted_curve():
    curve = two_segment_curve(U1_CFG, [[0.3], [-0.2]])
    rep = cl.equivalence_check(U1_CFG, MINK, curve)
    assert rep.agree
    assert rep.classification.accepted and rep.lift_verdict
    assert max(rep.lift_residuals) <= 1e-4


def test_equivalence_corrupted_curve():
    curve = two_segment_curve(U1_CFG, [[0.3], [-0.2]])
    seg2 = curve.segments[1]
    noise = 1e-2 * np.sin(3.0 * (seg2.s - seg2.s[0])) * np.sin(
        0.9 * (seg2.s - seg2.s[-1]))
    bad2 = Trajectory(seg2.s, seg2.x + np.outer(noise, [0, 1.0, 0, 0]))
    bad = cl.PolygonalCurve([curve.segments[0], bad2], endpoint_tol=1e-6)
    rep = cl.equivalence_check(U1_CFG, MINK, bad)
    assert rep.agree
    assert not rep.classification.accepted and not rep.lift_verdict
    assert rep.lift_residuals[1] >= 10 * rep.lift_residuals[0]
