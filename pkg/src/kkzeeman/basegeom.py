"""Base space-time (M, g): metric, Christoffels, causal tests, geodesic defect.

Signature convention is (+, -, -, -) throughout; timelike means g(v, v) > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartDomainError, InvalidInputError

MINKOWSKI_DIAG = np.array([1.0, -1.0, -1.0, -1.0])

#: default relative finite-difference step for metric derivatives
DEFAULT_H_FD = 1e-5


class BaseMetric:
    """Lorentzian metric on a single chart of M.

    kind is "minkowski" (the default, diag(1,-1,-1,-1) everywhere) or
    "diagonal" with four user-supplied component functions g_mumu(x).
    An optional ``domain`` predicate declares the chart domain.
    """

    def __init__(self, kind="minkowski", diag_funcs=None, domain=None):
        if kind not in ("minkowski", "diagonal"):
            raise InvalidInputError(f"unknown metric kind {kind!r}")
        if kind == "diagonal":
            if diag_funcs is None or len(diag_funcs) != 4:
                raise InvalidInputError("diagonal metric needs 4 component functions")
        self.kind = kind
        self.diag_funcs = diag_funcs
        self.domain = domain

    def _check_domain(self, x):
        if self.domain is not None and not self.domain(x):
            raise ChartDomainError(f"point {x} outside metric chart domain")

    def components(self, x):
        """g_munu(x) as a symmetric (4, 4) matrix."""
        x = np.asarray(x, dtype=float)
        self._check_domain(x)
        if self.kind == "minkowski":
            return np.diag(MINKOWSKI_DIAG)
        return np.diag([float(f(x)) for f in self.diag_funcs])

    def components_batch(self, X):
        """Metric at a batch of points, shape (n, 4, 4)."""
        X = np.asarray(X, dtype=float)
        if self.kind == "minkowski":
            return np.broadcast_to(np.diag(MINKOWSKI_DIAG), X.shape[:-1] + (4, 4))
        return np.stack([self.components(x) for x in X])

    def inverse_components(self, x):
        return np.linalg.inv(self.components(x))

    def christoffel(self, x, h_fd=None):
        """Levi-Civita symbols Gamma^mu_{nu lambda}, shape (4, 4, 4).

        Central finite differences of the components; exactly zero for
        the Minkowski kind.
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "minkowski":
            self._check_domain(x)
            return np.zeros((4, 4, 4))
        dg = self.metric_derivatives(x, h_fd=h_fd)
        ginv = self.inverse_components(x)
        # Gamma^mu_nl = 1/2 g^mr (d_n g_rl + d_l g_rn - d_r g_nl)
        inner = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
        return 0.5 * np.einsum("mr,rnl->mnl", ginv, inner)

    def metric_derivatives(self, x, h_fd=None):
        """d_mu g_nl by central differences, shape (4, 4, 4) indexed (mu, nu, l)."""
        x = np.asarray(x, dtype=float)
        dg = np.zeros((4, 4, 4))
        for mu in range(4):
            h = (h_fd if h_fd is not None else DEFAULT_H_FD) * (1.0 + abs(x[mu]))
            xp = x.copy()
            xm = x.copy()
            xp[mu] += h
            xm[mu] -= h
            dg[mu] = (self.components(xp) - self.components(xm)) / (2.0 * h)
        return dg


def minkowski():
    return BaseMetric("minkowski")


def causal_character(m, x, v, margin=1e-9):
    """Classify v at x as timelike / null / spacelike with the norm value."""
    v = np.asarray(v, dtype=float)
    g = m.components(x)
    val = float(v @ g @ v)
    if val > margin:
        label = "timelike"
    elif val < -margin:
        label = "spacelike"
    else:
        label = "null"
    return label, val


def geodesic_residual(m, traj, h_fd=None):
    """Per-sample geodesic defect |a^mu + Gamma^mu_nl v^n v^l| of a trajectory.

    Uses interior second differences on a uniform s grid; velocities are
    taken from the trajectory when present, else by central differences.
    Returns (residuals over interior samples, max residual).
    """
    if len(traj) < 5:
        raise InvalidInputError("geodesic residual needs at least 5 samples")
    ds = traj.ds
    x = traj.x
    acc = (x[2:] - 2.0 * x[1:-1] + x[:-2]) / ds**2
    if traj.v is not None:
        v = traj.v[1:-1]
    else:
        v = (x[2:] - x[:-2]) / (2.0 * ds)
    res = np.empty(len(acc))
    for i in range(len(acc)):
        gam = m.christoffel(x[1 + i], h_fd=h_fd)
        res[i] = np.linalg.norm(acc[i] + np.einsum("mnl,n,l->m", gam, v[i], v[i]))
    return res, float(res.max())
