"""Trivialized bundle P = M x G: connection form, Kaluza-Klein metric,
chart geodesic integrator, and fiber-charge readout.

The bundle metric is h = pi*g + k(omega, omega) with k the negative-definite
invariant form of liealg (c = 1).  Chart coordinates are y = (x, theta) with
g = g0 exp(theta^a T_a) around a movable anchor g0; the geodesic integrator
differentiates the assembled chart metric by central finite differences, so
it is an oracle fully independent of the projected dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ChartDomainError, IntegrationError, InvalidInputError
from .liealg import (
    ALGEBRA_DIM,
    SU2,
    U1,
    GroupElement,
    LieAlgebraElement,
    adjoint,
    adjoint_coeff_matrix,
    dexp_matrix,
    exp_coeffs,
    log_map,
)
from .trajectory import BundleTrajectory, Trajectory

#: default FD step for chart-metric derivatives
DEFAULT_H_FD = 1e-6

CHART_RADIUS = {U1: np.pi, SU2: np.pi / 2}


@dataclass(frozen=True)
class BundlePoint:
    base: np.ndarray
    fiber: GroupElement

    def __post_init__(self):
        b = np.asarray(self.base, dtype=float)
        if b.shape != (4,) or not np.all(np.isfinite(b)):
            raise InvalidInputError("base point must be 4 finite coordinates")
        object.__setattr__(self, "base", b)


@dataclass(frozen=True)
class BundleVelocity:
    """Tangent data: base velocity and left-logarithmic fiber velocity g^-1 g'."""

    v_base: np.ndarray
    v_fiber: LieAlgebraElement

    def __post_init__(self):
        v = np.asarray(self.v_base, dtype=float)
        if v.shape != (4,) or not np.all(np.isfinite(v)):
            raise InvalidInputError("base velocity must be 4 finite components")
        object.__setattr__(self, "v_base", v)


@dataclass(frozen=True)
class BundleChart:
    """Exponential fiber chart g = anchor . exp(theta^a T_a), |theta| < radius."""

    anchor: GroupElement
    radius: float = None

    def __post_init__(self):
        if self.radius is None:
            object.__setattr__(self, "radius", CHART_RADIUS[self.anchor.group_id])

    @property
    def group_id(self):
        return self.anchor.group_id


def connection_form(cfg, p, w):
    """omega(w) = Ad_{g^-1}(A_mu v^mu) + v_fiber at the bundle point p."""
    A = cfg.potential_at(p.base)  # (4, d)
    Av = LieAlgebraElement(cfg.group_id, A.T @ w.v_base)
    return adjoint(p.fiber.inverse(), Av) + w.v_fiber


def kk_metric(cfg, m, p, w1, w2):
    """h(w1, w2) = g(v1, v2) + k(omega(w1), omega(w2)) with k = -<.,.>."""
    g = m.components(p.base)
    base = float(w1.v_base @ g @ w2.v_base)
    o1 = connection_form(cfg, p, w1)
    o2 = connection_form(cfg, p, w2)
    return base - float(np.dot(o1.coeffs, o2.coeffs))


def _metric_batch(cfg, m, chart, Y):
    """Chart metric h_AB at a batch of chart points Y (n, 4+d) -> (n, D, D)."""
    group_id = cfg.group_id
    d = ALGEBRA_DIM[group_id]
    Y = np.asarray(Y, dtype=float)
    x = Y[:, :4]
    th = Y[:, 4:]
    gb = m.components_batch(x)
    A = cfg.potential_at_batch(x)  # (n, 4, d)
    gmat = np.einsum("ij,njk->nik", chart.anchor.matrix, exp_coeffs(group_id, th))
    adinv = adjoint_coeff_matrix(group_id, np.conj(np.swapaxes(gmat, -1, -2)))
    W = np.einsum("nab,nmb->nma", adinv, A)  # omega of base coordinate dirs
    S = dexp_matrix(group_id, th)            # columns: omega of fiber dirs
    n = len(Y)
    D = 4 + d
    h = np.empty((n, D, D))
    h[:, :4, :4] = gb - np.einsum("nma,npa->nmp", W, W)
    cross = -np.einsum("nma,nab->nmb", W, S)
    h[:, :4, 4:] = cross
    h[:, 4:, :4] = np.swapaxes(cross, 1, 2)
    h[:, 4:, 4:] = -np.einsum("nab,nac->nbc", S, S)
    return h


def metric_matrix_in_chart(cfg, m, chart, y):
    """Chart components h_AB(y), y = (x, theta); raises outside the chart."""
    y = np.asarray(y, dtype=float)
    d = ALGEBRA_DIM[cfg.group_id]
    if y.shape != (4 + d,):
        raise InvalidInputError(f"chart point must have {4 + d} coordinates")
    if np.linalg.norm(y[4:]) >= chart.radius:
        raise ChartDomainError("fiber coordinate outside chart radius")
    return _metric_batch(cfg, m, chart, y[None, :])[0]


def _metric_and_derivs(cfg, m, chart, y, h_fd):
    """h_AB(y) and its central-FD coordinate derivatives dh[C] = d_C h."""
    D = len(y)
    steps = h_fd * (1.0 + np.abs(y))
    pts = np.empty((2 * D + 1, D))
    pts[0] = y
    for c in range(D):
        pts[1 + 2 * c] = y
        pts[1 + 2 * c, c] += steps[c]
        pts[2 + 2 * c] = y
        pts[2 + 2 * c, c] -= steps[c]
    hs = _metric_batch(cfg, m, chart, pts)
    dh = (hs[1::2] - hs[2::2]) / (2.0 * steps)[:, None, None]
    return hs[0], dh


def _geodesic_gamma_uu(cfg, m, chart, y, u, h_fd):
    """Gamma^A_{BC}(y) u^B u^C via FD metric derivatives."""
    hc, dh = _metric_and_derivs(cfg, m, chart, y, h_fd)
    t1 = np.einsum("b,bac,c->a", u, dh, u)
    t2 = 0.5 * np.einsum("abc,b,c->a", dh, u, u)
    return np.linalg.solve(hc, t1 - t2)


def integrate_bundle_geodesic(cfg, m, p0, w0, s_max, tol=1e-9, n_samples=512,
                              h_fd=DEFAULT_H_FD, method="DOP853"):
    """Geodesic of (P, h) from (p0, w0), sampled uniformly on [0, s_max].

    Integrates the chart geodesic ODE y'' + Gamma(y) y' y' = 0 with
    Christoffels from central FD of the chart metric; the fiber chart is
    re-anchored whenever |theta| reaches half the chart radius.  No
    conservation law is used internally.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    group_id = cfg.group_id
    d = ALGEBRA_DIM[group_id]
    D = 4 + d
    rho = CHART_RADIUS[group_id]

    anchor = p0.fiber
    y = np.concatenate([p0.base, np.zeros(d), w0.v_base, w0.v_fiber.coeffs])
    s_grid = np.linspace(0.0, s_max, n_samples)
    xs = np.empty((n_samples, 4))
    gs = [None] * n_samples
    vbs = np.empty((n_samples, 4))
    vfs = np.empty((n_samples, d))
    recenters = 0

    def rhs(s, state):
        pos = state[:D]
        vel = state[D:]
        chart = BundleChart(anchor, rho)
        acc = -_geodesic_gamma_uu(cfg, m, chart, pos, vel, h_fd)
        return np.concatenate([vel, acc])

    def boundary(s, state):
        return np.linalg.norm(state[4:D]) - 0.5 * rho

    boundary.terminal = True
    boundary.direction = 1

    def emit(idx, state):
        pos, vel = state[:D], state[D:]
        th, thdot = pos[4:], vel[4:]
        gmat = anchor.matrix @ exp_coeffs(group_id, th)
        k = gmat.shape[0]
        if np.linalg.norm(gmat.conj().T @ gmat - np.eye(k)) > 1e-12:
            u_, _, vt = np.linalg.svd(gmat)
            gmat = u_ @ vt
        xs[idx] = pos[:4]
        gs[idx] = GroupElement(group_id, gmat)
        vbs[idx] = vel[:4]
        vfs[idx] = dexp_matrix(group_id, th) @ thdot

    emit(0, y)
    s_cur = 0.0
    next_idx = 1
    while s_cur < s_max - 1e-14:
        sol = solve_ivp(rhs, (s_cur, s_max), y, method=method, rtol=tol,
                        atol=tol, dense_output=True, events=boundary)
        if sol.status == -1:
            raise IntegrationError(f"bundle geodesic integration failed: {sol.message}")
        if not np.all(np.isfinite(sol.y[:, -1])):
            raise IntegrationError("non-finite state in bundle geodesic integration")
        s_end = sol.t[-1]
        while next_idx < n_samples and s_grid[next_idx] <= s_end + 1e-14:
            emit(next_idx, sol.sol(min(s_grid[next_idx], s_end)))
            next_idx += 1
        if sol.status == 1:  # chart boundary hit: re-anchor
            state = sol.y[:, -1]
            th, thdot = state[4:D], state[D + 4:]
            anchor = GroupElement(
                group_id, anchor.matrix @ exp_coeffs(group_id, th))
            y = state.copy()
            y[4:D] = 0.0
            y[D + 4:] = dexp_matrix(group_id, th) @ thdot
            recenters += 1
        else:
            y = sol.y[:, -1]
        s_cur = s_end

    meta = {"tol": tol, "h_fd": h_fd, "method": method, "recenters": recenters}
    return BundleTrajectory(group_id, s_grid, xs, gs, vbs, vfs, meta)


def charge_along(cfg, btraj):
    """omega(gamma'(s_i)) per sample and max deviation from the initial value."""
    A = cfg.potential_at_batch(btraj.x)
    Av = np.einsum("nmd,nm->nd", A, btraj.v_base)
    gmats = btraj.fiber_matrices()
    adinv = adjoint_coeff_matrix(cfg.group_id, np.conj(np.swapaxes(gmats, -1, -2)))
    w = np.einsum("nab,nb->na", adinv, Av) + btraj.v_fiber
    dev = float(np.max(np.linalg.norm(w - w[0], axis=1)))
    return w, dev


def norm_along(cfg, m, btraj):
    """h(gamma', gamma') per sample (for conservation diagnostics)."""
    n = len(btraj)
    out = np.empty(n)
    w, _ = charge_along(cfg, btraj)
    gb = m.components_batch(btraj.x)
    base = np.einsum("nm,nmp,np->n", btraj.v_base, gb, btraj.v_base)
    out[:] = base - np.einsum("na,na->n", w, w)
    return out


def project(btraj):
    """Drop fiber data: base trajectory with the same s-parameterization."""
    return Trajectory(
        btraj.s.copy(), btraj.x.copy(), btraj.v_base.copy(),
        group_id=btraj.group_id, meta=dict(btraj.meta))


def bundle_geodesic_residual(cfg, m, btraj, h_fd=DEFAULT_H_FD, stride=1):
    """Chart geodesic defect |y'' + Gamma y' y'| at interior samples.

    Each interior sample anchors its own fiber chart at the sample's group
    element; neighbours are expressed through log_map and second-differenced.
    Returns (residuals, max residual).
    """
    if len(btraj) < 3:
        raise InvalidInputError("need at least 3 samples for the residual")
    ds = np.diff(btraj.s)
    if np.max(np.abs(ds - ds[0])) > 1e-9 * max(1.0, abs(ds[0])):
        raise InvalidInputError("bundle residual needs uniform sampling")
    ds = float(ds[0])
    group_id = cfg.group_id
    d = ALGEBRA_DIM[group_id]
    idxs = range(1, len(btraj) - 1, stride)
    res = []
    for i in idxs:
        gi_inv = btraj.fiber[i].inverse()
        th_m = log_map(gi_inv @ btraj.fiber[i - 1]).coeffs
        th_p = log_map(gi_inv @ btraj.fiber[i + 1]).coeffs
        y_m = np.concatenate([btraj.x[i - 1], th_m])
        y_c = np.concatenate([btraj.x[i], np.zeros(d)])
        y_p = np.concatenate([btraj.x[i + 1], th_p])
        acc = (y_p - 2.0 * y_c + y_m) / ds**2
        u = np.concatenate([btraj.v_base[i], btraj.v_fiber[i]])
        chart = BundleChart(btraj.fiber[i])
        guu = _geodesic_gamma_uu(cfg, m, chart, y_c, u, h_fd)
        res.append(np.linalg.norm(acc + guu))
    res = np.asarray(res)
    return res, float(res.max())
