"""Convex block functions and their oracles.

Each supported function exposes the four oracles the solver and the
certificate checks rely on: value, proximal map, convex conjugate, and
the conjugate gap

    gap(u, x) = F(x) + F*(u) - <u, x>,

which is the least epsilon such that u is an epsilon-subgradient of F
at x (gap <= eps  iff  F(v) >= F(x) + <u, v - x> - eps for all v).

Three variants -- quadratics, scaled l1 norms, and the zero function --
cover the supported problem classes with closed-form conjugates, so the
epsilon-subgradient membership checks are exact up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import linalg
from .errors import InternalCheckError, NotPositiveDefiniteError

# Relative slack when testing membership in the domain of the l1 conjugate
# (the mu-ball): prox outputs land exactly on the boundary and rounding
# must not push them outside.
_BALL_SLACK = 1e-12

# Negative conjugate-gap band attributed to rounding; anything below it
# means a broken value/conjugate pair and raises.
_GAP_BAND = 1e-9

# Residual tolerance of the range test used by the conjugate of a
# singular quadratic.
_RANGE_TOL = 1e-8


def soft_threshold(v, thr) -> np.ndarray:
    """Componentwise shrinkage sign(v_i) * max(|v_i| - thr, 0)."""
    v = linalg.as_vector(v, name="v")
    return np.sign(v) * np.maximum(np.abs(v) - thr, 0.0)


@dataclass(frozen=True)
class Quadratic:
    """v -> (1/2) v'Pv + q'v + c with symmetric positive semidefinite P."""

    P: np.ndarray
    q: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        q = linalg.as_vector(self.q, name="q")
        P = linalg.as_matrix(self.P, rows=q.shape[0], cols=q.shape[0], name="P")
        if not linalg.is_symmetric(P):
            raise ValueError("P must be symmetric")
        if not linalg.is_psd(P):
            raise ValueError("P must be positive semidefinite")
        P = P.copy()
        P.setflags(write=False)
        q = q.copy()
        q.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def value(self, v) -> float:
        v = linalg.as_vector(v, dim=self.dim, name="v")
        return 0.5 * float(v @ (self.P @ v)) + float(self.q @ v) + self.c

    def grad(self, v) -> np.ndarray:
        v = linalg.as_vector(v, dim=self.dim, name="v")
        return self.P @ v + self.q

    def prox_solver(self, t):
        """Return v -> argmin_u value(u) + ||u - v||^2 / (2t), with the
        system matrix tP + I factored once."""
        if not t > 0:
            raise ValueError("prox step t must be positive")
        fac = linalg.SpdFactor(t * self.P + np.eye(self.dim))
        tq = t * self.q
        dim = self.dim
        return lambda v: fac.solve(linalg.as_vector(v, dim=dim, name="v") - tq)

    def prox(self, v, t) -> np.ndarray:
        return self.prox_solver(t)(v)

    def _p_factor(self):
        # Lazy cache; None = not attempted yet, False = P is singular.
        fac = getattr(self, "_pfac", None)
        if fac is None:
            try:
                fac = linalg.SpdFactor(self.P)
            except NotPositiveDefiniteError:
                fac = False
            object.__setattr__(self, "_pfac", fac)
        return fac

    def conjugate(self, u) -> float:
        """sup_v <u,v> - value(v).

        Equals (1/2)(u-q)' P^{-1} (u-q) - c when u - q lies in the range
        of P, and +inf otherwise (singular P handled by a least-squares
        solve plus a range test).
        """
        u = linalg.as_vector(u, dim=self.dim, name="u")
        r = u - self.q
        fac = self._p_factor()
        if fac:
            x = fac.solve(r)
        else:
            x, *_ = np.linalg.lstsq(self.P, r, rcond=None)
            resid = float(np.linalg.norm(self.P @ x - r))
            if resid > _RANGE_TOL * (1.0 + float(np.linalg.norm(r))):
                return math.inf
        return 0.5 * float(r @ x) - self.c


@dataclass(frozen=True)
class L1:
    """v -> mu * ||v||_1 with mu > 0."""

    mu: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        if not self.mu > 0:
            raise ValueError("mu must be positive")

    @property
    def dim(self):
        return None  # any dimension

    def value(self, v) -> float:
        v = linalg.as_vector(v, name="v")
        return self.mu * float(np.sum(np.abs(v)))

    def prox_solver(self, t):
        if not t > 0:
            raise ValueError("prox step t must be positive")
        thr = t * self.mu
        return lambda v: soft_threshold(v, thr)

    def prox(self, v, t) -> np.ndarray:
        return self.prox_solver(t)(v)

    def conjugate(self, u) -> float:
        """Indicator of the ||.||_inf ball of radius mu."""
        u = linalg.as_vector(u, name="u")
        if float(np.max(np.abs(u), initial=0.0)) <= self.mu * (1.0 + _BALL_SLACK) + _BALL_SLACK:
            return 0.0
        return math.inf


@dataclass(frozen=True)
class Zero:
    """v -> 0."""

    @property
    def dim(self):
        return None  # any dimension

    def value(self, v) -> float:
        linalg.as_vector(v, name="v")
        return 0.0

    def prox_solver(self, t):
        if not t > 0:
            raise ValueError("prox step t must be positive")
        return lambda v: linalg.as_vector(v, name="v").copy()

    def prox(self, v, t) -> np.ndarray:
        return self.prox_solver(t)(v)

    def conjugate(self, u) -> float:
        """Indicator of the origin (within an absolute tolerance)."""
        u = linalg.as_vector(u, name="u")
        if float(np.max(np.abs(u), initial=0.0)) <= linalg.PSD_TOL:
            return 0.0
        return math.inf


ConvexFunction = Union[Quadratic, L1, Zero]


def fenchel_gap(F: ConvexFunction, u, x) -> float:
    """Least eps such that u is an eps-subgradient of F at x.

    Returns F(x) + F*(u) - <u, x>, clamped at zero from below within a
    rounding band; +inf when u lies outside the domain of F*.  A negative
    value beyond the band signals a broken value/conjugate pair and raises.
    """
    u = linalg.as_vector(u, name="u")
    x = linalg.as_vector(x, dim=u.shape[0], name="x")
    conj = F.conjugate(u)
    if math.isinf(conj):
        return math.inf
    val = F.value(x)
    pairing = float(u @ x)
    gap = val + conj - pairing
    if gap < 0.0:
        band = _GAP_BAND * (1.0 + abs(val) + abs(conj) + abs(pairing))
        if gap < -band:
            raise InternalCheckError(
                f"conjugate gap {gap:.3e} below the rounding band: broken conjugate pair"
            )
        gap = 0.0
    return gap
