import numpy as np
import pytest

from kkzeeman import basegeom as bg
from kkzeeman import dynamics as dy
from kkzeeman import gaugefield as gf
from kkzeeman import liealg as la
from kkzeeman import transforms as tr
from kkzeeman.errors import InvalidInputError

MINK = bg.minkowski()
ETA = np.diag([1.0, -1, -1, -1])


def test_boost_and_rotation_are_lorentz():
    assert tr.check_lorentz(tr.lorentz_boost(0.6))
    assert tr.check_lorentz(tr.lorentz_boost(-0.3, axis=2))
    assert tr.check_lorentz(tr.spatial_rotation(0.8))
    assert tr.check_lorentz(tr.spatial_rotation(0.8) @ tr.lorentz_boost(0.5))
    assert not tr.check_lorentz(np.eye(4) * 2.0)


def test_boost_velocity_addition():
    L = tr.lorentz_boost(0.6)
    v = L @ np.array([1.0, 0, 0, 0])
    assert abs(v[1] / v[0] - 0.6) <= 1e-14
    with pytest.raises(InvalidInputError):
        tr.lorentz_boost(1.0)


def test_transform_event_round_trip():
    L = tr.spatial_rotation(0.7) @ tr.lorentz_boost(0.4)
    b = np.array([1.0, -2.0, 0.5, 3.0])
    x = np.array([0.3, 1.2, -0.7, 0.9])
    xp = tr.transform_event(x, L, b, lam=2.0)
    back = (xp - b) @ np.linalg.inv(L).T / 2.0
    assert np.allclose(back, x, atol=1e-12)


def test_transform_trajectory_preserves_interval():
    cfg = gf.scenario("u1-constant-B", B=0.5)
    st = dy.ChargedState(np.zeros(4), np.array([1.2, 0.4, 0.2, 0.0]),
                         la.LieAlgebraElement("U1", [0.3]))
    traj = dy.integrate_charged_motion(cfg, MINK, st, 4.0)
    L = tr.lorentz_boost(0.5)
    out = tr.transform_trajectory(traj, L, b=[1.0, 0, 0, 0])
    dx = np.diff(traj.x, axis=0)
    dxp = np.diff(out.x, axis=0)
    assert np.allclose(np.einsum("nm,mp,np->n", dxp, ETA, dxp),
                       np.einsum("nm,mp,np->n", dx, ETA, dx), atol=1e-10)
    assert np.allclose(out.s, traj.s)


def test_transformed_field_drives_transformed_motion():
    # covariance: transform of the solution solves the transformed system
    cfg = gf.scenario("u1-constant-E", E=0.3)
    q = la.LieAlgebraElement("U1", [0.4])
    st = dy.ChargedState(np.zeros(4), np.array([1.0, 0, 0, 0]), q)
    traj = dy.integrate_charged_motion(cfg, MINK, st, 5.0, tol=1e-11)
    L = tr.lorentz_boost(0.35) @ tr.spatial_rotation(0.6)
    b = np.array([0.5, 1.0, -0.3, 0.2])
    lam = 1.7
    cfg2 = tr.transform_config(cfg, L, b, lam)
    moved = tr.transform_trajectory(traj, L, b, lam)
    st2 = dy.ChargedState(moved.x[0], moved.v[0],
                          la.LieAlgebraElement("U1", q.coeffs * lam))
    traj2 = dy.integrate_charged_motion(cfg2, MINK, st2, lam * 5.0, tol=1e-11)
    assert np.max(np.abs(traj2.x - moved.x)) <= 1e-7


def test_transform_config_curvature_consistency():
    cfg = gf.scenario("su2-constant", a=0.4, b=0.3)
    L = tr.lorentz_boost(0.45, axis=2)
    cfg2 = tr.transform_config(cfg, L, lam=1.3)
    for x in np.random.default_rng(3).uniform(-1, 1, size=(5, 4)):
        Ffd = gf.curvature_coeffs(cfg2, x, force_fd=True)
        Fan = gf.curvature_coeffs(cfg2, x)
        assert np.max(np.abs(Ffd - Fan)) <= 1e-7


def test_transform_config_rejects_bad_input():
    cfg = gf.scenario("u1-zero")
    with pytest.raises(InvalidInputError):
        tr.transform_config(cfg, np.eye(4) * 2.0)
    with pytest.raises(InvalidInputError):
        tr.transform_config(cfg, np.eye(4), lam=-1.0)
