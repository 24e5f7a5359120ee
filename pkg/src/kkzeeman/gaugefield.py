"""Gauge potentials A_mu(x), curvatures, gauge transformations, scenarios.

Curvature convention (fixed here for the whole package):

    F_munu = d_mu A_nu - d_nu A_mu + [A_mu, A_nu]

with A_mu and F_munu valued in the anti-Hermitian algebra (no factored-out
i anywhere).  All values are coefficient arrays in the fixed basis {T_a}.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ChartDomainError, ScenarioError
from .liealg import (
    ALGEBRA_DIM,
    GENERATORS,
    GroupElement,
    LieAlgebraElement,
    adjoint_coeff_matrix,
    bracket_coeffs,
    coeffs_from_matrix,
)

#: default FD step for potential derivatives
DEFAULT_H_FD = 1e-5
#: default (larger) FD step for the outer derivative in the Bianchi check
DEFAULT_H_BIANCHI = 1e-4

SCENARIO_NAMES = ("u1-zero", "u1-constant-B", "u1-constant-E", "u1-coulomb",
                  "su2-constant")


@dataclass(frozen=True)
class GaugeFieldConfig:
    """Analytic gauge field on a single global chart of M.

    potential maps a point x (4,) to coefficients A_mu^a, shape (4, d).
    potential_batch, when given, maps (n, 4) -> (n, 4, d) and is used on
    hot paths.  curvature_analytic, when given, maps x -> (4, 4, d) and
    must agree with the FD curvature.
    """

    group_id: str
    potential: object
    potential_batch: object = None
    curvature_analytic: object = None
    name: str = "user"
    params: dict = field(default_factory=dict)
    domain: object = None

    @property
    def dim(self):
        return ALGEBRA_DIM[self.group_id]

    def _check_domain(self, x):
        if self.domain is not None and not self.domain(np.asarray(x, dtype=float)):
            raise ChartDomainError(f"point {x} outside gauge-field domain")

    def potential_at(self, x):
        """A_mu(x) coefficients, shape (4, d)."""
        x = np.asarray(x, dtype=float)
        self._check_domain(x)
        return np.asarray(self.potential(x), dtype=float).reshape(4, self.dim)

    def potential_at_batch(self, X):
        """A at a batch of points, shape (n, 4, d)."""
        X = np.asarray(X, dtype=float)
        if self.domain is not None:
            for x in X:
                self._check_domain(x)
        if self.potential_batch is not None:
            return np.asarray(self.potential_batch(X), dtype=float)
        return np.stack([self.potential_at(x) for x in X])


@dataclass(frozen=True)
class CurvatureValue:
    """F_munu(x) in basis coefficients, antisymmetric by construction."""

    group_id: str
    coeffs: np.ndarray  # (4, 4, d)

    def element(self, mu, nu):
        return LieAlgebraElement(self.group_id, self.coeffs[mu, nu])

    def max_norm(self):
        return float(np.max(np.linalg.norm(self.coeffs, axis=-1)))


def curvature_coeffs(cfg, x, h_fd=None, force_fd=False):
    """Curvature coefficients (4, 4, d) at x.

    Uses the analytic evaluator when present unless force_fd is set; the
    FD route takes central differences of the potential and adds the
    bracket term.
    """
    x = np.asarray(x, dtype=float)
    cfg._check_domain(x)
    if cfg.curvature_analytic is not None and not force_fd:
        F = np.asarray(cfg.curvature_analytic(x), dtype=float)
        return 0.5 * (F - F.transpose(1, 0, 2))
    d = cfg.dim
    dA = np.zeros((4, 4, d))  # dA[mu, nu] = d_mu A_nu
    for mu in range(4):
        h = (h_fd if h_fd is not None else DEFAULT_H_FD) * (1.0 + abs(x[mu]))
        xp = x.copy()
        xm = x.copy()
        xp[mu] += h
        xm[mu] -= h
        dA[mu] = (cfg.potential_at(xp) - cfg.potential_at(xm)) / (2.0 * h)
    A = cfg.potential_at(x)
    F = dA - dA.transpose(1, 0, 2)
    F += bracket_coeffs(cfg.group_id, A[:, None, :], A[None, :, :])
    return F


def curvature(cfg, x, h_fd=None, force_fd=False):
    return CurvatureValue(cfg.group_id, curvature_coeffs(cfg, x, h_fd, force_fd))


def gauge_transform(cfg, gmap, h_fd=None):
    """Gauge-transformed configuration A' = g^-1 A g + g^-1 dg.

    gmap maps a point x to a GroupElement; dg is taken by central FD on
    the matrix entries.  The analytic curvature, when present, is
    conjugated pointwise (F' = g^-1 F g).
    """
    group_id = cfg.group_id
    d = cfg.dim
    T = GENERATORS[group_id]

    def new_potential(x):
        x = np.asarray(x, dtype=float)
        g = gmap(x)
        ginvmat = g.matrix.conj().T
        A = cfg.potential_at(x)  # (4, d)
        Amat = np.einsum("md,dij->mij", A, T)
        conj = np.einsum("ij,mjk,kl->mil", ginvmat, Amat, g.matrix)
        out = coeffs_from_matrix(group_id, conj)
        for mu in range(4):
            h = (h_fd if h_fd is not None else DEFAULT_H_FD) * (1.0 + abs(x[mu]))
            xp = x.copy()
            xm = x.copy()
            xp[mu] += h
            xm[mu] -= h
            dg = (gmap(xp).matrix - gmap(xm).matrix) / (2.0 * h)
            out[mu] += coeffs_from_matrix(group_id, ginvmat @ dg)
        return out

    new_analytic = None
    if cfg.curvature_analytic is not None:
        def new_analytic(x):
            x = np.asarray(x, dtype=float)
            g = gmap(x)
            ad = adjoint_coeff_matrix(group_id, g.matrix.conj().T)
            F = np.asarray(cfg.curvature_analytic(x), dtype=float)
            return np.einsum("ab,mnb->mna", ad, F)

    return replace(
        cfg,
        potential=new_potential,
        potential_batch=None,
        curvature_analytic=new_analytic,
        name=cfg.name + "+gauge",
    )


def bianchi_residual(cfg, x, h_fd=None, curvature_h_fd=None):
    """Max over index triples of |d_mu F_nl + [A_mu, F_nl] + cyclic|.

    The outer derivative uses a step h_fd (default 1e-4 scaled); the inner
    curvature evaluation is analytic when available, else FD with its own
    step.  Identically ~0 (up to FD truncation) for any field derived
    from a potential.
    """
    x = np.asarray(x, dtype=float)
    d = cfg.dim
    A = cfg.potential_at(x)
    F0 = curvature_coeffs(cfg, x, h_fd=curvature_h_fd)
    DF = np.zeros((4, 4, 4, d))  # DF[mu, nu, l] = D_mu F_nul
    for mu in range(4):
        h = (h_fd if h_fd is not None else DEFAULT_H_BIANCHI) * (1.0 + abs(x[mu]))
        xp = x.copy()
        xm = x.copy()
        xp[mu] += h
        xm[mu] -= h
        dF = (curvature_coeffs(cfg, xp, h_fd=curvature_h_fd)
              - curvature_coeffs(cfg, xm, h_fd=curvature_h_fd)) / (2.0 * h)
        DF[mu] = dF + bracket_coeffs(cfg.group_id, A[mu][None, None, :], F0)
    cyc = DF + DF.transpose(1, 2, 0, 3) + DF.transpose(2, 0, 1, 3)
    return float(np.max(np.linalg.norm(cyc, axis=-1)))


# ---------------------------------------------------------------------------
# scenario library

def scenario(name, **params):
    """Named analytic gauge-field configuration.

    u1-zero                 A = 0
    u1-constant-B  (B)      A = (0, -(B/2) x2, (B/2) x1, 0) T,  F_12 = B T
    u1-constant-E  (E)      A_0 = -E x1 T,                      F_01 = E T
    u1-coulomb     (kappa)  A_0 = (kappa / r) T for r >= r_min
    su2-constant   (a, b)   A_1 = a T1, A_2 = b T2,             F_12 = ab T3
    """
    if name == "u1-zero":
        return _u1_zero(params)
    if name == "u1-constant-B":
        return _u1_constant_b(params)
    if name == "u1-constant-E":
        return _u1_constant_e(params)
    if name == "u1-coulomb":
        return _u1_coulomb(params)
    if name == "su2-constant":
        return _su2_constant(params)
    raise ScenarioError(f"unknown scenario {name!r}; known: {SCENARIO_NAMES}")


def _u1_zero(params):
    def pot(x):
        return np.zeros((4, 1))

    def pot_batch(X):
        return np.zeros((len(X), 4, 1))

    def curv(x):
        return np.zeros((4, 4, 1))

    return GaugeFieldConfig("U1", pot, pot_batch, curv, "u1-zero", dict(params))


def _u1_constant_b(params):
    B = float(params.get("B", 1.0))

    def pot(x):
        A = np.zeros((4, 1))
        A[1, 0] = -0.5 * B * x[2]
        A[2, 0] = 0.5 * B * x[1]
        return A

    def pot_batch(X):
        A = np.zeros((len(X), 4, 1))
        A[:, 1, 0] = -0.5 * B * X[:, 2]
        A[:, 2, 0] = 0.5 * B * X[:, 1]
        return A

    def curv(x):
        F = np.zeros((4, 4, 1))
        F[1, 2, 0] = B
        F[2, 1, 0] = -B
        return F

    return GaugeFieldConfig("U1", pot, pot_batch, curv, "u1-constant-B", {"B": B})


def _u1_constant_e(params):
    E = float(params.get("E", 1.0))

    def pot(x):
        A = np.zeros((4, 1))
        A[0, 0] = -E * x[1]
        return A

    def pot_batch(X):
        A = np.zeros((len(X), 4, 1))
        A[:, 0, 0] = -E * X[:, 1]
        return A

    def curv(x):
        # F_01 = d_0 A_1 - d_1 A_0 = E
        F = np.zeros((4, 4, 1))
        F[0, 1, 0] = E
        F[1, 0, 0] = -E
        return F

    return GaugeFieldConfig("U1", pot, pot_batch, curv, "u1-constant-E", {"E": E})


def _u1_coulomb(params):
    kappa = float(params.get("kappa", 1.0))
    r_min = float(params.get("r_min", 1e-3))

    def domain(x):
        return np.linalg.norm(x[1:]) >= r_min

    def pot(x):
        r = np.linalg.norm(x[1:])
        A = np.zeros((4, 1))
        A[0, 0] = kappa / r
        return A

    def pot_batch(X):
        r = np.linalg.norm(X[:, 1:], axis=1)
        A = np.zeros((len(X), 4, 1))
        A[:, 0, 0] = kappa / r
        return A

    def curv(x):
        # F_0i = -d_i A_0 = kappa x_i / r^3
        r = np.linalg.norm(x[1:])
        F = np.zeros((4, 4, 1))
        for i in range(1, 4):
            F[0, i, 0] = kappa * x[i] / r**3
            F[i, 0, 0] = -F[0, i, 0]
        return F

    return GaugeFieldConfig("U1", pot, pot_batch, curv, "u1-coulomb",
                            {"kappa": kappa, "r_min": r_min}, domain)


def _su2_constant(params):
    a = float(params.get("a", 1.0))
    b = float(params.get("b", 1.0))

    A0 = np.zeros((4, 3))
    A0[1, 0] = a
    A0[2, 1] = b

    def pot(x):
        return A0.copy()

    def pot_batch(X):
        return np.broadcast_to(A0, (len(X), 4, 3)).copy()

    F0 = np.zeros((4, 4, 3))
    F0[1, 2, 2] = a * b
    F0[2, 1, 2] = -a * b

    def curv(x):
        return F0.copy()

    return GaugeFieldConfig("SU2", pot, pot_batch, curv, "su2-constant",
                            {"a": a, "b": b})
