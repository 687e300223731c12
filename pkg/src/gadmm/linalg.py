"""Dense linear algebra: seminorms, SPD solves, spectral norms, PSD probes.

Everything is desk scale: dense numpy arrays and direct factorizations,
no sparsity, no Krylov methods.  All operations are pure functions and
never mutate their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import IterationLimitError, NotPositiveDefiniteError

# Absolute floor for symmetry / positive-semidefiniteness probes.  All
# downstream certificate checks budget at least 1e-6 of slack, two orders
# above the noise these tolerances admit.
PSD_TOL = 1e-9

# Relative residual required from direct SPD solves.
SOLVE_TOL = 1e-10


def as_vector(v, dim=None, name="vector") -> np.ndarray:
    """Coerce to a finite 1-D float array, optionally checking its length."""
    out = np.asarray(v, dtype=float)
    if out.ndim == 0:
        out = out.reshape(1)
    if out.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {out.shape}")
    if dim is not None and out.shape[0] != dim:
        raise ValueError(f"{name} has length {out.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} has non-finite entries")
    return out


def as_matrix(a, rows=None, cols=None, name="matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array, optionally checking its shape."""
    out = np.asarray(a, dtype=float)
    if out.ndim == 0:
        out = out.reshape(1, 1)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {out.shape}")
    if rows is not None and out.shape[0] != rows:
        raise ValueError(f"{name} has {out.shape[0]} rows, expected {rows}")
    if cols is not None and out.shape[1] != cols:
        raise ValueError(f"{name} has {out.shape[1]} columns, expected {cols}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} has non-finite entries")
    return out


def symmetry_gap(Q) -> float:
    Q = np.asarray(Q, dtype=float)
    if Q.size == 0:
        return 0.0
    return float(np.max(np.abs(Q - Q.T)))


def is_symmetric(Q, tol=PSD_TOL) -> bool:
    Q = as_matrix(Q)
    if Q.shape[0] != Q.shape[1]:
        return False
    scale = 1.0 + (float(np.max(np.abs(Q))) if Q.size else 0.0)
    return symmetry_gap(Q) <= tol * scale


def is_psd(Q, tol=PSD_TOL) -> bool:
    """Probe positive semidefiniteness with a pivoted outer-product Cholesky.

    Pivots below ``tol`` (relative to the largest diagonal entry) terminate
    the factorization; the matrix passes iff the remaining block is then
    negligible as well, which for a PSD matrix it must be.
    """
    Q = as_matrix(Q)
    if Q.shape[0] != Q.shape[1] or not is_symmetric(Q, tol):
        return False
    R = np.array(Q, dtype=float, copy=True)
    n = R.shape[0]
    scale = 1.0
    if n:
        scale = max(1.0, float(np.max(np.abs(np.diag(R)))))
    floor = tol * scale
    for j in range(n):
        rem_diag = np.diag(R)[j:]
        i = j + int(np.argmax(rem_diag))
        if R[i, i] <= floor:
            rem = R[j:, j:]
            if float(np.min(np.diag(rem))) < -floor:
                return False
            return float(np.max(np.abs(rem))) <= 10.0 * floor
        if i != j:
            R[[j, i], :] = R[[i, j], :]
            R[:, [j, i]] = R[:, [i, j]]
        col = R[j + 1 :, j] / R[j, j]
        R[j + 1 :, j + 1 :] -= np.outer(col, R[j + 1 :, j])
    return True


@dataclass(frozen=True)
class PsdOperator:
    """A validated symmetric positive semidefinite matrix."""

    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, mat, tol=PSD_TOL, name="operator") -> "PsdOperator":
        mat = as_matrix(mat, name=name)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"{name} must be square, got shape {mat.shape}")
        if not is_symmetric(mat, tol):
            raise NotPositiveDefiniteError(f"{name} is not symmetric")
        if not is_psd(mat, tol):
            raise NotPositiveDefiniteError(f"{name} is not positive semidefinite")
        mat = mat.copy()
        mat.setflags(write=False)
        return cls(mat)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]

    def seminorm_sq(self, v) -> float:
        return seminorm_sq(self.matrix, v)


def _unwrap(Q) -> np.ndarray:
    return Q.matrix if isinstance(Q, PsdOperator) else as_matrix(Q, name="Q")


def seminorm_sq(Q, v) -> float:
    """Squared seminorm <Qv, v> induced by a symmetric PSD Q.

    Tiny negative values from rounding are clamped to zero.  A negative
    value beyond the rounding band is returned as-is: it means Q was not
    PSD after all, and the caller's probes are expected to catch that.
    """
    Q = _unwrap(Q)
    if Q.shape[0] != Q.shape[1]:
        raise ValueError(f"Q must be square, got shape {Q.shape}")
    v = as_vector(v, dim=Q.shape[0], name="v")
    val = float(v @ (Q @ v))
    if val < 0.0:
        qscale = 1.0 + (float(np.max(np.abs(Q))) if Q.size else 0.0)
        band = PSD_TOL * (1.0 + float(v @ v) * qscale)
        if val >= -band:
            return 0.0
    return val


def seminorm(Q, v) -> float:
    return math.sqrt(max(seminorm_sq(Q, v), 0.0))


class SpdFactor:
    """Cached Cholesky factorization of a symmetric positive definite matrix.

    Refuses (raises) on non-PD input instead of regularizing: a silently
    perturbed subproblem would invalidate the certificate checks downstream.
    """

    def __init__(self, K, name="system matrix"):
        K = as_matrix(K, name=name)
        if K.shape[0] != K.shape[1]:
            raise ValueError(f"{name} must be square, got shape {K.shape}")
        if not is_symmetric(K):
            raise NotPositiveDefiniteError(f"{name} is not symmetric")
        try:
            self._cf = cho_factor(K, lower=True, check_finite=False)
        except LinAlgError as exc:
            raise NotPositiveDefiniteError(
                f"{name} is not positive definite (subproblem not strictly convex)"
            ) from exc
        self.side = K.shape[0]

    def solve(self, rhs) -> np.ndarray:
        rhs = as_vector(rhs, dim=self.side, name="right-hand side")
        return cho_solve(self._cf, rhs, check_finite=False)


def solve_spd(K, rhs) -> np.ndarray:
    """Solve K u = rhs for symmetric positive definite K via Cholesky."""
    return SpdFactor(K).solve(rhs)


def spectral_norm_sq(A, rel_tol=1e-8, max_iter=100_000) -> float:
    """Largest eigenvalue of AtA, by power iteration with a fixed start.

    The Rayleigh quotient along power iterates of a PSD matrix is
    nondecreasing, so stagnation of the estimate (well below ``rel_tol``)
    is a sound stopping test.  The start vector is drawn from a fixed-seed
    generator: deterministic, and almost surely not orthogonal to the
    leading eigenspace (an all-ones start can be).
    """
    A = as_matrix(A, name="A")
    if A.size == 0:
        raise ValueError("A must be nonempty")
    S = A.T @ A
    d = S.shape[0]
    v = np.random.default_rng(1789).standard_normal(d)
    v /= float(np.linalg.norm(v))
    w = S @ v
    lam = float(v @ w)
    tol = rel_tol * 1e-4
    for _ in range(max_iter):
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        w = S @ v
        new = float(v @ w)
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return new
        lam = new
    raise IterationLimitError("power iteration did not stabilize")
