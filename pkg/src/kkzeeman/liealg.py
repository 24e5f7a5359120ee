"""Compact matrix Lie groups U(1) and SU(2).

Conventions, fixed once for the whole package:

* U(1): one generator T = (i), i.e. the 1x1 matrix [[1j]].
* SU(2): three anti-Hermitian generators T_a = -(i/2) sigma_a with the
  standard Pauli ordering sigma_1, sigma_2, sigma_3.  Structure constants
  are then [T_a, T_b] = eps_abc T_c, so the bracket of coefficient
  vectors is the ordinary cross product.
* The bi-invariant form is k(X, Y) = -c * <coeffs(X), coeffs(Y)> with
  c = 1 by default, so every basis generator has k-norm -1.  (This is the
  negative-definite Ad-invariant trace form; the honest Killing form of
  the abelian u(1) would vanish identically and is useless here.)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ChartDomainError, InvalidInputError

U1 = "U1"
SU2 = "SU2"
GROUPS = (U1, SU2)

ALGEBRA_DIM = {U1: 1, SU2: 3}
MATRIX_DIM = {U1: 1, SU2: 2}

_SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

#: generators[group] has shape (algebra_dim, n, n)
GENERATORS = {
    U1: np.array([[[1j]]], dtype=complex),
    SU2: -0.5j * _SIGMA,
}


def _check_group(group_id):
    if group_id not in GROUPS:
        raise InvalidInputError(f"unknown group {group_id!r}; expected one of {GROUPS}")


def _check_same_group(a, b):
    if a.group_id != b.group_id:
        raise InvalidInputError(
            f"group mismatch: {a.group_id} vs {b.group_id}"
        )


@dataclass(frozen=True)
class LieAlgebraElement:
    """Element of Lie G as real coefficients in the fixed basis {T_a}."""

    group_id: str
    coeffs: np.ndarray

    def __post_init__(self):
        _check_group(self.group_id)
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.shape != (ALGEBRA_DIM[self.group_id],):
            raise InvalidInputError(
                f"{self.group_id} coefficients must have shape "
                f"({ALGEBRA_DIM[self.group_id]},), got {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("non-finite algebra coefficients")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def matrix(self):
        """Anti-Hermitian matrix representative sum_a coeffs[a] T_a."""
        return np.einsum("a,aij->ij", self.coeffs, GENERATORS[self.group_id])

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other):
        _check_same_group(self, other)
        return LieAlgebraElement(self.group_id, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same_group(self, other)
        return LieAlgebraElement(self.group_id, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return LieAlgebraElement(self.group_id, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return LieAlgebraElement(self.group_id, -self.coeffs)


def algebra_zero(group_id):
    return LieAlgebraElement(group_id, np.zeros(ALGEBRA_DIM[group_id]))


def basis_element(group_id, a):
    e = np.zeros(ALGEBRA_DIM[group_id])
    e[a] = 1.0
    return LieAlgebraElement(group_id, e)


@dataclass(frozen=True)
class GroupElement:
    """Unitary matrix in the defining representation (det 1 for SU(2))."""

    group_id: str
    matrix: np.ndarray

    def __post_init__(self):
        _check_group(self.group_id)
        n = MATRIX_DIM[self.group_id]
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (n, n):
            raise InvalidInputError(
                f"{self.group_id} matrix must be {n}x{n}, got {m.shape}"
            )
        defect = np.linalg.norm(m.conj().T @ m - np.eye(n))
        if defect > 1e-10:
            raise InvalidInputError(f"matrix not unitary (defect {defect:.3e})")
        if self.group_id == SU2 and abs(np.linalg.det(m) - 1.0) > 1e-10:
            raise InvalidInputError("SU(2) matrix must have unit determinant")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def inverse(self):
        return GroupElement(self.group_id, self.matrix.conj().T)

    def __matmul__(self, other):
        _check_same_group(self, other)
        return GroupElement(self.group_id, self.matrix @ other.matrix)


def group_identity(group_id):
    return GroupElement(group_id, np.eye(MATRIX_DIM[group_id], dtype=complex))


@dataclass(frozen=True)
class BiInvariantForm:
    """Negative-definite Ad-invariant form k(X, Y) = -c <coeffs, coeffs>."""

    group_id: str
    c: float = 1.0

    def __post_init__(self):
        _check_group(self.group_id)
        if not self.c > 0:
            raise InvalidInputError("normalization constant c must be positive")

    def __call__(self, X, Y):
        _check_same_group(X, Y)
        if X.group_id != self.group_id:
            raise InvalidInputError("form/argument group mismatch")
        return -self.c * float(np.dot(X.coeffs, Y.coeffs))


def bracket_coeffs(group_id, a, b):
    """Bracket on coefficient arrays; broadcasts over leading axes."""
    if group_id == U1:
        return np.zeros(np.broadcast(a, b).shape)
    return np.cross(a, b)


def bracket(X, Y):
    """Lie bracket [X, Y] = XY - YX in basis coefficients."""
    _check_same_group(X, Y)
    return LieAlgebraElement(X.group_id, bracket_coeffs(X.group_id, X.coeffs, Y.coeffs))


def form_k(X, Y, c=1.0):
    """Bi-invariant form with basis generators normalized to k-norm -c."""
    return BiInvariantForm(X.group_id, c)(X, Y)


def exp_coeffs(group_id, theta):
    """Matrix exponential of theta^a T_a; vectorized over leading axes.

    theta has shape (..., algebra_dim); returns (..., n, n) complex.
    Closed forms: U(1) is a scalar phase, SU(2) uses the half-angle
    Rodrigues formula exp(-(i/2) t.sigma) = cos(|t|/2) I - i sin(|t|/2) n.sigma.
    """
    theta = np.asarray(theta, dtype=float)
    if group_id == U1:
        return np.exp(1j * theta[..., 0])[..., None, None]
    t = np.linalg.norm(theta, axis=-1)
    half = 0.5 * t
    # sin(half)/t with the t -> 0 limit 1/2
    with np.errstate(invalid="ignore", divide="ignore"):
        fac = np.where(t > 1e-12, np.sin(half) / np.where(t > 0, t, 1.0), 0.5)
    nsig = np.einsum("...a,aij->...ij", theta, _SIGMA)
    eye = np.eye(2, dtype=complex)
    return np.cos(half)[..., None, None] * eye - 1j * fac[..., None, None] * nsig


def exp_map(X):
    """Group exponential of an algebra element."""
    return GroupElement(X.group_id, exp_coeffs(X.group_id, X.coeffs))


def coeffs_from_matrix(group_id, M):
    """Project a (near) anti-Hermitian matrix onto the basis {T_a}.

    Vectorized over leading axes of M.
    """
    M = np.asarray(M, dtype=complex)
    if group_id == U1:
        return M[..., 0, 0].imag[..., None]
    # theta^a = -2 Re tr(M T_a) since tr(T_a T_b) = -delta_ab / 2
    T = GENERATORS[SU2]
    return -2.0 * np.real(np.einsum("...ij,aji->...a", M, T))


def log_map(g):
    """Inverse of exp_map inside the injectivity domain.

    For SU(2) the domain excludes a neighbourhood of -I (half-angle pi);
    for U(1) it excludes -1 (phase pi).  Outside it raises ChartDomainError.
    """
    m = g.matrix
    if g.group_id == U1:
        phi = float(np.angle(m[0, 0]))
        if abs(phi) >= np.pi - 1e-12:
            raise ChartDomainError("U(1) element at or beyond the cut locus")
        return LieAlgebraElement(U1, np.array([phi]))
    cos_half = float(np.real(np.trace(m))) / 2.0
    cos_half = min(1.0, max(-1.0, cos_half))
    half = np.arccos(cos_half)
    if half >= np.pi - 1e-9:
        raise ChartDomainError("SU(2) element at or beyond the cut locus")
    # anti-Hermitian part equals -i sin(half) n.sigma = sin(half) n^a (2 T_a)
    anti = 0.5 * (m - m.conj().T)
    proj = coeffs_from_matrix(SU2, anti)  # equals 2 sin(half) n
    if half < 1e-8:
        fac = 0.5 * (1.0 + half * half / 6.0)
    else:
        fac = half / np.sin(half) * 0.5
    return LieAlgebraElement(SU2, 2.0 * fac * proj)


def adjoint(g, X):
    """Adjoint action Ad_g X = g X g^{-1} in basis coefficients."""
    _check_same_group(g, X)
    M = g.matrix @ X.matrix @ g.matrix.conj().T
    return LieAlgebraElement(g.group_id, coeffs_from_matrix(g.group_id, M))


def adjoint_coeff_matrix(group_id, gmat):
    """Real matrix of Ad_g on coefficients; vectorized over leading axes.

    gmat has shape (..., n, n); returns (..., d, d) with
    Ad(g) coeffs(X) = coeffs(g X g^{-1}).
    """
    gmat = np.asarray(gmat, dtype=complex)
    if group_id == U1:
        return np.ones(gmat.shape[:-2] + (1, 1))
    T = GENERATORS[SU2]
    conj = np.einsum("...ij,bjk,...lk->...bil", gmat, T, gmat.conj())
    return -2.0 * np.real(np.einsum("...bij,aji->...ab", conj, T))


def dexp_matrix(group_id, theta, n_terms=18):
    """Left-logarithmic derivative of the exponential chart.

    Returns S(theta) with coeffs(exp(-theta) d/dt exp(theta + t e_a)) =
    S(theta) @ e_a, i.e. S = (1 - exp(-ad_theta)) / ad_theta as a real
    (d, d) matrix.  Vectorized over leading axes of theta; evaluated by a
    truncated series, adequate for |theta| below the chart radius.
    """
    theta = np.asarray(theta, dtype=float)
    d = ALGEBRA_DIM[group_id]
    lead = theta.shape[:-1]
    if group_id == U1:
        return np.ones(lead + (1, 1))
    # ad_theta on coefficients: (ad)_cb = eps_abc theta^a
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c] = 1.0
        eps[a, c, b] = -1.0
    ad = np.einsum("...a,abc->...cb", theta, eps)
    S = np.zeros(lead + (d, d))
    term = np.broadcast_to(np.eye(d), lead + (d, d)).copy()
    for n in range(n_terms):
        S = S + term / _factorial(n + 1)
        term = np.einsum("...ij,...jk->...ik", -ad, term)
    return S


def _factorial(n):
    out = 1.0
    for i in range(2, n + 1):
        out *= i
    return out
