"""Sampled-trajectory containers shared by the integrators and classifier."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .liealg import ALGEBRA_DIM, GROUPS, GroupElement


def _as_samples(arr, name, width=None):
    a = np.asarray(arr, dtype=float)
    if a.ndim == 1 and width is None:
        pass
    elif a.ndim != 2 or (width is not None and a.shape[1] != width):
        raise InvalidInputError(f"{name} must have shape (n, {width}), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"non-finite entries in {name}")
    return a


@dataclass
class Trajectory:
    """Arc-length-parameterized samples of a base-space motion.

    s is strictly increasing; x and v are (n, 4); q is (n, d) gauge-frame
    charge coefficients or None for purely geometric curves.
    """

    s: np.ndarray
    x: np.ndarray
    v: np.ndarray | None = None
    q: np.ndarray | None = None
    group_id: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s = _as_samples(self.s, "s")
        n = len(self.s)
        if n < 2:
            raise InvalidInputError("trajectory needs at least 2 samples")
        if np.any(np.diff(self.s) <= 0):
            raise InvalidInputError("sample parameter s must be strictly increasing")
        self.x = _as_samples(self.x, "x", 4)
        if self.x.shape[0] != n:
            raise InvalidInputError("x sample count does not match s")
        if self.v is not None:
            self.v = _as_samples(self.v, "v", 4)
            if self.v.shape[0] != n:
                raise InvalidInputError("v sample count does not match s")
        if self.q is not None:
            if self.group_id not in GROUPS:
                raise InvalidInputError("q samples require a valid group_id")
            self.q = _as_samples(self.q, "q", ALGEBRA_DIM[self.group_id])
            if self.q.shape[0] != n:
                raise InvalidInputError("q sample count does not match s")

    def __len__(self):
        return len(self.s)

    @property
    def ds(self):
        """Uniform sample spacing; raises if the grid is not uniform."""
        d = np.diff(self.s)
        if np.max(np.abs(d - d[0])) > 1e-9 * max(1.0, abs(d[0])):
            raise InvalidInputError("trajectory samples are not uniformly spaced")
        return float(d[0])


@dataclass
class BundleTrajectory:
    """Samples of a curve upstairs on P = M x G.

    fiber is a list of GroupElement; v_fiber holds the left-logarithmic
    derivative g^{-1} g' in basis coefficients, shape (n, d).
    """

    group_id: str
    s: np.ndarray
    x: np.ndarray
    fiber: list
    v_base: np.ndarray
    v_fiber: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.group_id not in GROUPS:
            raise InvalidInputError(f"unknown group {self.group_id!r}")
        self.s = _as_samples(self.s, "s")
        n = len(self.s)
        if np.any(np.diff(self.s) <= 0):
            raise InvalidInputError("sample parameter s must be strictly increasing")
        self.x = _as_samples(self.x, "x", 4)
        self.v_base = _as_samples(self.v_base, "v_base", 4)
        self.v_fiber = _as_samples(self.v_fiber, "v_fiber", ALGEBRA_DIM[self.group_id])
        if not (self.x.shape[0] == self.v_base.shape[0] == self.v_fiber.shape[0]
                == len(self.fiber) == n):
            raise InvalidInputError("inconsistent sample counts")
        for g in self.fiber:
            if not isinstance(g, GroupElement) or g.group_id != self.group_id:
                raise InvalidInputError("fiber entries must be GroupElements of the group")

    def __len__(self):
        return len(self.s)

    def fiber_matrices(self):
        return np.stack([g.matrix for g in self.fiber])
