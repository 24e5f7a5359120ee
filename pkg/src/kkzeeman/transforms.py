"""Poincare + dilatation action on curves and field configurations.

The map is phi(x) = lam * Lambda x + b with Lambda a Lorentz matrix,
b a translation and lam > 0 a dilatation; parameters rescale as s' = lam s.
The potential transforms as the pushforward 1-form,
A'_mu(x') = (1/lam) (Lambda^-1)^nu_mu A_nu(phi^-1(x')).
"""

from __future__ import annotations

import numpy as np

from .basegeom import MINKOWSKI_DIAG
from .errors import InvalidInputError
from .gaugefield import GaugeFieldConfig
from .trajectory import Trajectory


def lorentz_boost(beta, axis=1):
    """Boost matrix along a spatial axis with velocity beta (|beta| < 1)."""
    if not abs(beta) < 1:
        raise InvalidInputError("boost velocity must satisfy |beta| < 1")
    gamma = 1.0 / np.sqrt(1.0 - beta * beta)
    L = np.eye(4)
    L[0, 0] = L[axis, axis] = gamma
    L[0, axis] = L[axis, 0] = gamma * beta
    return L


def spatial_rotation(angle, axis=3):
    """Rotation in the spatial plane orthogonal to the given axis."""
    i, j = [k for k in (1, 2, 3) if k != axis]
    R = np.eye(4)
    c, s = np.cos(angle), np.sin(angle)
    R[i, i] = R[j, j] = c
    R[i, j] = -s
    R[j, i] = s
    return R


def check_lorentz(L, tol=1e-10):
    eta = np.diag(MINKOWSKI_DIAG)
    return np.linalg.norm(L.T @ eta @ L - eta) <= tol


def transform_event(x, L, b=None, lam=1.0):
    x = np.asarray(x, dtype=float)
    out = lam * (x @ np.asarray(L, dtype=float).T)
    if b is not None:
        out = out + np.asarray(b, dtype=float)
    return out


def transform_trajectory(traj, L, b=None, lam=1.0):
    """Transformed trajectory with s' = lam s, x' = phi(x), v' = Lambda v."""
    L = np.asarray(L, dtype=float)
    x = transform_event(traj.x, L, b, lam)
    v = traj.v @ L.T if traj.v is not None else None
    return Trajectory(lam * traj.s, x, v, q=None, group_id=traj.group_id,
                      meta={"transformed": True})


def transform_config(cfg, L, b=None, lam=1.0):
    """Field configuration seen in the transformed frame."""
    L = np.asarray(L, dtype=float)
    if not check_lorentz(L):
        raise InvalidInputError("matrix is not a Lorentz transformation")
    if not lam > 0:
        raise InvalidInputError("dilatation factor must be positive")
    Linv = np.linalg.inv(L)
    bvec = np.zeros(4) if b is None else np.asarray(b, dtype=float)

    def back(xp):
        return (xp - bvec) @ Linv.T / lam

    def pot(xp):
        A = cfg.potential_at(back(xp))  # (4, d)
        return (Linv.T @ A) / lam

    def pot_batch(Xp):
        A = cfg.potential_at_batch(back(Xp))  # (n, 4, d)
        return np.einsum("vm,nvd->nmd", Linv, A) / lam

    new_curv = None
    if cfg.curvature_analytic is not None:
        def new_curv(xp):
            F = np.asarray(cfg.curvature_analytic(back(xp)), dtype=float)
            return np.einsum("rm,sn,rsd->mnd", Linv, Linv, F) / lam**2

    new_domain = None
    if cfg.domain is not None:
        def new_domain(xp):
            return cfg.domain(back(xp))

    return GaugeFieldConfig(cfg.group_id, pot, pot_batch, new_curv,
                            cfg.name + "+poincare", dict(cfg.params), new_domain)
