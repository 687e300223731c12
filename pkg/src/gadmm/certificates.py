"""Pointwise and ergodic complexity certificates.

Two families of closed-form bounds are checked against a recorded
trajectory, both driven by d0 = ||z* - z0||^2_M and the relative-error
constant sigma = 1/(1 + alpha(2-alpha)):

Pointwise (alpha strictly inside (0, 2)):

    min_{i<=k} ||(dx_i, dy_i, dgamma_i)||_M
        <= sqrt( 2[alpha(1+sigma) + 8(2-alpha)sigma] d0 / (alpha(1-sigma)) ) / sqrt(k).

Ergodic (any alpha in (0, 2]), for the averaged iterates
(x_k^a, y_k^a, gamma_k^a, gt_k^a) over i = 1..k, the averaged steps
r_k^a = (z_k - z_0)/k, and the transported epsilon values

    eps_x = (1/k) sum_i <H1 dx_i - A'gt_i, x^a - x_i>,
    eps_y = (1/k) sum_i <(H2 + (beta/alpha)B'B) dy_i
                          + ((1-alpha)/alpha) B'dgamma_i - B'gt_i, y^a - y_i>:

    ||r_k^a||_M <= 2 sqrt(c d0) / k,        c  = (alpha + 4(2-alpha)sigma)/alpha,
    eps_x + eps_y <= ct d0 / k,             ct = 3[3 alpha^2 + 4(1+2alpha)sigma]
                                                  [alpha + 4(2-alpha)sigma] / (2 alpha^3),

with eps_x, eps_y >= 0, the averaged inclusion holding with those
epsilons, and eps_x + eps_y splitting the metric-level averaged epsilon

    eps^a = (1/k) sum_i <M dz_i, z~^a - z~_i>

exactly.  Averages use pairwise summation so iteration counts up to 1e5
do not push the identity residuals past their 1e-8 allowances.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from . import hpe, oracles
from .errors import CertificationError
from .hpe import CERT_REL_TOL, INCLUSION_GAP_TOL, ReportRow, cert_tol, sigma_alpha

if TYPE_CHECKING:  # pragma: no cover
    from .solver import Trajectory

# Allowance for the averaged constraint identity and the epsilon split.
ERGODIC_IDENTITY_TOL = 1e-8


def bound_constants(alpha) -> tuple[float, float, float]:
    """(sigma, c, ct): the relative-error constant and the two ergodic
    bound constants.  At alpha=1: (0.5, 3, 40.5); at alpha=2: (1, 1, 12)."""
    sig = sigma_alpha(alpha)
    c = (alpha + 4.0 * (2.0 - alpha) * sig) / alpha
    ct = (
        3.0
        * (3.0 * alpha**2 + 4.0 * (1.0 + 2.0 * alpha) * sig)
        * (alpha + 4.0 * (2.0 - alpha) * sig)
        / (2.0 * alpha**3)
    )
    return sig, c, ct


def pointwise_constant(alpha, d0) -> float:
    """The k-free factor of the pointwise bound; defined for alpha in (0,2)."""
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError("pointwise bound undefined at alpha = 2 (sigma = 1)")
    sig = sigma_alpha(alpha)
    return math.sqrt(
        2.0 * (alpha * (1.0 + sig) + 8.0 * (2.0 - alpha) * sig) * d0 / (alpha * (1.0 - sig))
    )


def checked_iterations(total, full=False) -> list[int]:
    """The k values at which ergodic quantities are evaluated: powers of
    two plus the final iteration, or every k in full mode."""
    if total < 1:
        return []
    if full:
        return list(range(1, total + 1))
    ks = []
    k = 1
    while k < total:
        ks.append(k)
        k *= 2
    ks.append(total)
    return ks


@dataclass(frozen=True)
class ErgodicPoint:
    """Averages over iterations 1..k and their transported epsilons."""

    k: int
    x_avg: np.ndarray
    y_avg: np.ndarray
    gamma_avg: np.ndarray
    gamma_tilde_avg: np.ndarray
    r_x: np.ndarray
    r_y: np.ndarray
    r_gamma: np.ndarray
    eps_x: float
    eps_y: float


class _Precomp:
    """Per-trajectory arrays shared by the certificate evaluations."""

    def __init__(self, traj: "Trajectory", metric: hpe.ProximalMetric):
        inst = traj.instance
        params = traj.params
        alpha, beta = params.alpha, params.beta
        states = traj.states[1:]
        if not states:
            raise ValueError("trajectory has no iterations")
        self.K = len(states)
        self.X = np.stack([st.x for st in states])
        self.Y = np.stack([st.y for st in states])
        self.G = np.stack([st.gamma for st in states])
        self.Gt = np.stack([st.gamma_tilde for st in states])
        self.DX = np.stack([st.dx for st in states])
        self.DY = np.stack([st.dy for st in states])
        self.DG = np.stack([st.dgamma for st in states])
        z0 = traj.states[0]
        self.z0 = np.concatenate([z0.x, z0.y, z0.gamma])
        self.Z = np.hstack([self.X, self.Y, self.G])
        self.Ztil = np.hstack([self.X, self.Y, self.Gt])
        A, B = inst.A, inst.B
        c = (1.0 - alpha) / alpha
        self.h2_total = traj.h2 + (beta / alpha) * (B.T @ B)
        # rows i: the exact subgradients produced by the two subproblems
        self.Vf = self.Gt @ A - self.DX @ traj.h1
        self.Vg = self.Gt @ B - self.DY @ self.h2_total - c * (self.DG @ B)
        DZ = np.hstack([self.DX, self.DY, self.DG])
        self.MDZ = DZ @ metric.matrix
        sq = np.einsum("ij,ij->i", DZ, self.MDZ)
        self.step_norms = np.sqrt(np.maximum(sq, 0.0))


def _ergodic_at(pre: _Precomp, k: int) -> ErgodicPoint:
    x_avg = pre.X[:k].mean(axis=0)
    y_avg = pre.Y[:k].mean(axis=0)
    gamma_avg = pre.G[:k].mean(axis=0)
    gt_avg = pre.Gt[:k].mean(axis=0)
    r = (pre.Z[k - 1] - pre.z0) / k
    n = pre.X.shape[1]
    p = pre.Y.shape[1]
    eps_x = float(np.sum(pre.Vf[:k] * (pre.X[:k] - x_avg))) / k
    eps_y = float(np.sum(pre.Vg[:k] * (pre.Y[:k] - y_avg))) / k
    return ErgodicPoint(
        k=k,
        x_avg=x_avg,
        y_avg=y_avg,
        gamma_avg=gamma_avg,
        gamma_tilde_avg=gt_avg,
        r_x=r[:n],
        r_y=r[n : n + p],
        r_gamma=r[n + p :],
        eps_x=eps_x,
        eps_y=eps_y,
    )


def ergodic_point(traj: "Trajectory", k: int) -> ErgodicPoint:
    """Averages over iterations 1..k (1 <= k <= recorded iterations)."""
    metric = hpe.metric_for(traj)
    pre = _Precomp(traj, metric)
    if not 1 <= k <= pre.K:
        raise ValueError(f"k={k} outside 1..{pre.K}")
    return _ergodic_at(pre, k)


def _metric_eps_at(pre: _Precomp, point: ErgodicPoint) -> float:
    """The metric-level averaged epsilon (1/k) sum <M dz_i, z~^a - z~_i>."""
    k = point.k
    ztil_avg = np.concatenate([point.x_avg, point.y_avg, point.gamma_tilde_avg])
    return float(np.sum(pre.MDZ[:k] * (ztil_avg - pre.Ztil[:k]))) / k


def epsilon_split_identity(traj: "Trajectory", k: int) -> float:
    """|eps^a - (eps_x + eps_y)| at iteration k; an algebraic identity, so
    the value is pure rounding."""
    metric = hpe.metric_for(traj)
    pre = _Precomp(traj, metric)
    if not 1 <= k <= pre.K:
        raise ValueError(f"k={k} outside 1..{pre.K}")
    point = _ergodic_at(pre, k)
    return abs(_metric_eps_at(pre, point) - (point.eps_x + point.eps_y))


@dataclass
class BoundRow:
    """Bound comparisons at one checked iteration (NaN where not applicable)."""

    k: int
    pointwise_lhs: float
    pointwise_rhs: float
    ergodic_r_lhs: float
    ergodic_r_rhs: float
    ergodic_eps_lhs: float
    ergodic_eps_rhs: float
    eps_x: float
    eps_y: float
    split_residual: float


@dataclass
class BoundReport:
    rows: list
    alpha: float
    sigma: float
    c_alpha: float
    c_tilde_alpha: float
    d0: float
    pointwise_factor: Optional[float]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "sigma": self.sigma,
            "c_alpha": self.c_alpha,
            "c_tilde_alpha": self.c_tilde_alpha,
            "d0": self.d0,
            "pointwise_factor": self.pointwise_factor,
            "rows": [vars(r) for r in self.rows],
        }


BOUND_CSV_COLUMNS = [
    "k",
    "pointwise_lhs",
    "pointwise_rhs",
    "ergodic_r_lhs",
    "ergodic_r_rhs",
    "ergodic_eps_lhs",
    "ergodic_eps_rhs",
    "eps_x",
    "eps_y",
    "split_residual",
]


def save_bound_report_csv(report: BoundReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BOUND_CSV_COLUMNS)
        for row in report.rows:
            writer.writerow(
                [row.k]
                + [
                    repr(float(getattr(row, col))) if not math.isnan(getattr(row, col)) else ""
                    for col in BOUND_CSV_COLUMNS[1:]
                ]
            )


def pointwise_certificate(traj: "Trajectory", z_star, raise_on_violation=True):
    """Check the pointwise bound at every recorded k and re-assert the
    per-iteration inclusion on the way.

    Returns (running_min, rhs) arrays indexed by k-1.  Rejects alpha = 2,
    where the bound is undefined.
    """
    alpha = traj.params.alpha
    if not alpha < 2.0:
        raise ValueError("pointwise bound undefined at alpha = 2 (sigma = 1)")
    inst = traj.instance
    hpe._check_reference(inst, z_star)
    metric = hpe.metric_for(traj)
    d0 = hpe.initial_distance_sq(traj, z_star, metric)
    factor = pointwise_constant(alpha, d0)
    pre = _Precomp(traj, metric)
    running_min = np.minimum.accumulate(pre.step_norms)
    ks = np.arange(1, pre.K + 1, dtype=float)
    rhs = factor / np.sqrt(ks)
    if raise_on_violation:
        for idx in range(pre.K):
            if running_min[idx] > rhs[idx] + cert_tol(running_min[idx], rhs[idx]):
                raise CertificationError(
                    f"pointwise bound violated at k={idx + 1} "
                    f"(lhs {running_min[idx]:.6g} > rhs {rhs[idx]:.6g})",
                    k=idx + 1,
                    check="pointwise_bound",
                )
        for st in traj.states[1:]:
            gap_f, gap_g, cons = hpe.inclusion_residuals(
                inst, traj.h1, traj.h2, traj.params.beta, alpha, st
            )
            if not max(gap_f, gap_g) <= INCLUSION_GAP_TOL:
                raise CertificationError(
                    f"pointwise inclusion gap {max(gap_f, gap_g):.3e} at k={st.k}",
                    k=st.k,
                    check="pointwise_inclusion",
                )
    return running_min, rhs


@dataclass
class ErgodicCheck:
    """All ergodic measurements at one checked iteration."""

    point: ErgodicPoint
    r_lhs: float
    r_rhs: float
    eps_rhs: float
    inclusion_gap_f: float
    inclusion_gap_g: float
    constraint_residual: float
    metric_eps: float
    split_residual: float


def _ergodic_checks(traj, z_star, metric, pre, ks) -> tuple[list, float, float, float]:
    inst = traj.instance
    params = traj.params
    alpha, beta = params.alpha, params.beta
    sig, c_a, ct_a = bound_constants(alpha)
    d0 = hpe.initial_distance_sq(traj, z_star, metric)
    A, B, b = inst.A, inst.B, inst.b
    cc = (1.0 - alpha) / alpha
    out = []
    for k in ks:
        pt = _ergodic_at(pre, k)
        r_full = np.concatenate([pt.r_x, pt.r_y, pt.r_gamma])
        r_lhs = metric.seminorm(r_full)
        r_rhs = 2.0 * math.sqrt(c_a * d0) / k
        eps_rhs = ct_a * d0 / k
        uf = A.T @ pt.gamma_tilde_avg - traj.h1 @ pt.r_x
        gap_f = oracles.fenchel_gap(inst.f, uf, pt.x_avg)
        ug = (
            B.T @ pt.gamma_tilde_avg
            - pre.h2_total @ pt.r_y
            - cc * (B.T @ pt.r_gamma)
        )
        gap_g = oracles.fenchel_gap(inst.g, ug, pt.y_avg)
        cons = float(
            np.linalg.norm(
                cc * (B @ pt.r_y)
                + pt.r_gamma / (alpha * beta)
                + A @ pt.x_avg
                + B @ pt.y_avg
                - b
            )
        )
        m_eps = _metric_eps_at(pre, pt)
        out.append(
            ErgodicCheck(
                point=pt,
                r_lhs=r_lhs,
                r_rhs=r_rhs,
                eps_rhs=eps_rhs,
                inclusion_gap_f=gap_f,
                inclusion_gap_g=gap_g,
                constraint_residual=cons,
                metric_eps=m_eps,
                split_residual=abs(m_eps - (pt.eps_x + pt.eps_y)),
            )
        )
    return out, d0, c_a, ct_a


def ergodic_certificate(traj: "Trajectory", z_star, full_grid=False, raise_on_violation=True):
    """Check the two ergodic bounds, the epsilon nonnegativity, the averaged
    inclusion, the averaged constraint identity, and the epsilon split at the
    checked iterations.  Returns the list of :class:`ErgodicCheck`."""
    inst = traj.instance
    hpe._check_reference(inst, z_star)
    metric = hpe.metric_for(traj)
    pre = _Precomp(traj, metric)
    ks = checked_iterations(pre.K, full=full_grid)
    checks, _, _, _ = _ergodic_checks(traj, z_star, metric, pre, ks)
    if raise_on_violation:
        for chk in checks:
            k = chk.point.k
            if chk.r_lhs > chk.r_rhs + cert_tol(chk.r_lhs, chk.r_rhs):
                raise CertificationError(
                    f"ergodic step-average bound violated at k={k}",
                    k=k,
                    check="ergodic_residual_bound",
                )
            eps_sum = chk.point.eps_x + chk.point.eps_y
            if eps_sum > chk.eps_rhs + cert_tol(eps_sum, chk.eps_rhs):
                raise CertificationError(
                    f"ergodic epsilon bound violated at k={k}",
                    k=k,
                    check="ergodic_eps_bound",
                )
            if chk.point.eps_x < -cert_tol(chk.point.eps_x) or chk.point.eps_y < -cert_tol(
                chk.point.eps_y
            ):
                raise CertificationError(
                    f"negative transported epsilon at k={k}",
                    k=k,
                    check="ergodic_eps_nonneg",
                )
            if chk.inclusion_gap_f > max(chk.point.eps_x, 0.0) + cert_tol(chk.point.eps_x):
                raise CertificationError(
                    f"averaged inclusion gap for the x block at k={k}",
                    k=k,
                    check="ergodic_inclusion_f",
                )
            if chk.inclusion_gap_g > max(chk.point.eps_y, 0.0) + cert_tol(chk.point.eps_y):
                raise CertificationError(
                    f"averaged inclusion gap for the y block at k={k}",
                    k=k,
                    check="ergodic_inclusion_g",
                )
            if chk.constraint_residual > ERGODIC_IDENTITY_TOL:
                raise CertificationError(
                    f"averaged constraint identity off by {chk.constraint_residual:.3e} at k={k}",
                    k=k,
                    check="ergodic_constraint_identity",
                )
            if chk.split_residual > ERGODIC_IDENTITY_TOL * (1.0 + abs(chk.metric_eps)):
                raise CertificationError(
                    f"epsilon split identity off by {chk.split_residual:.3e} at k={k}",
                    k=k,
                    check="eps_split_identity",
                )
    return checks


def bound_report(traj: "Trajectory", z_star, full_grid=False) -> BoundReport:
    """Bound comparisons at the checked iterations, as one table."""
    inst = traj.instance
    hpe._check_reference(inst, z_star)
    params = traj.params
    alpha = params.alpha
    metric = hpe.metric_for(traj)
    pre = _Precomp(traj, metric)
    d0 = hpe.initial_distance_sq(traj, z_star, metric)
    sig, c_a, ct_a = bound_constants(alpha)
    ks = checked_iterations(pre.K, full=full_grid)
    checks, _, _, _ = _ergodic_checks(traj, z_star, metric, pre, ks)
    has_pointwise = alpha < 2.0
    pw_factor = pointwise_constant(alpha, d0) if has_pointwise else None
    running_min = np.minimum.accumulate(pre.step_norms)
    rows = []
    for chk in checks:
        k = chk.point.k
        rows.append(
            BoundRow(
                k=k,
                pointwise_lhs=float(running_min[k - 1]) if has_pointwise else math.nan,
                pointwise_rhs=pw_factor / math.sqrt(k) if has_pointwise else math.nan,
                ergodic_r_lhs=chk.r_lhs,
                ergodic_r_rhs=chk.r_rhs,
                ergodic_eps_lhs=chk.point.eps_x + chk.point.eps_y,
                ergodic_eps_rhs=chk.eps_rhs,
                eps_x=max(chk.point.eps_x, 0.0),
                eps_y=max(chk.point.eps_y, 0.0),
                split_residual=chk.split_residual,
            )
        )
    return BoundReport(
        rows=rows,
        alpha=alpha,
        sigma=sig,
        c_alpha=c_a,
        c_tilde_alpha=ct_a,
        d0=d0,
        pointwise_factor=pw_factor,
    )


def rate_estimate(points) -> float:
    """Least-squares slope of log(value) against log(k) over the tail half
    of the series; needs at least 10 strictly positive points."""
    pts = sorted((int(k), float(v)) for k, v in points)
    if len(pts) < 10:
        raise ValueError(f"need at least 10 points, got {len(pts)}")
    if any(v <= 0.0 for _, v in pts):
        raise ValueError("rate estimation needs strictly positive values")
    tail = pts[len(pts) // 2 :]
    logk = np.log([k for k, _ in tail])
    logv = np.log([v for _, v in tail])
    slope, _ = np.polyfit(logk, logv, 1)
    return float(slope)


# ---------------------------------------------------------------------------
# whole-trajectory verification report


@dataclass
class VerificationReport:
    rows: list
    meta: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def first_failure(self) -> Optional[ReportRow]:
        for r in self.rows:
            if not r.passed:
                return r
        return None

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "meta": self.meta,
            "checks": [r.to_dict() for r in self.rows],
        }


def _hpe_rows(certs) -> list:
    ineq = [(c.k, c.slack + cert_tol(c.lhs, c.rhs)) for c in certs]
    inc_f = [(c.k, INCLUSION_GAP_TOL - c.inclusion_gap_f) for c in certs]
    inc_g = [(c.k, INCLUSION_GAP_TOL - c.inclusion_gap_g) for c in certs]
    mult = [(c.k, c.identity_tol - c.multiplier_residual) for c in certs]
    cons = [(c.k, c.identity_tol - c.constraint_residual) for c in certs]
    rel = f"{CERT_REL_TOL:g} relative"
    return [
        hpe._row_from_slacks("hpe_inequality", ineq, rel),
        hpe._row_from_slacks("hpe_inclusion_f", inc_f, f"{INCLUSION_GAP_TOL:g}"),
        hpe._row_from_slacks("hpe_inclusion_g", inc_g, f"{INCLUSION_GAP_TOL:g}"),
        hpe._row_from_slacks("multiplier_identity", mult, f"{hpe.IDENTITY_TOL:g} scaled"),
        hpe._row_from_slacks("constraint_identity", cons, f"{hpe.IDENTITY_TOL:g} scaled"),
    ]


def full_verification(traj: "Trajectory", z_star, full_grid=False) -> VerificationReport:
    """Run every check on a recorded trajectory and collect the outcomes.

    Nothing raises here; failures land in the report so callers can name
    the first failing check and iteration.
    """
    inst = traj.instance
    hpe._check_reference(inst, z_star)
    params = traj.params
    alpha = params.alpha
    metric = hpe.metric_for(traj)
    d0 = hpe.initial_distance_sq(traj, z_star, metric)
    sig, c_a, ct_a = bound_constants(alpha)
    if len(traj.states) <= 1:
        return VerificationReport(
            rows=[],
            meta={
                "alpha": alpha,
                "beta": params.beta,
                "iterations": 0,
                "d0": d0,
                "note": "no iterations recorded; all checks vacuous",
            },
        )
    rows = []
    certs = hpe.certify_hpe(traj, z_star, raise_on_violation=False)
    rows.extend(_hpe_rows(certs))
    rows.append(hpe.check_delta_inequalities(traj, z_star, raise_on_violation=False))
    rows.append(hpe.check_rho_bound(traj, z_star, raise_on_violation=False))
    if alpha < 2.0:
        rows.append(hpe.check_rho_contractive_bound(traj, z_star, raise_on_violation=False))
    else:
        rows.append(
            ReportRow(
                "rho_contractive_bound", True, math.inf, None, "-", "not-applicable at alpha=2"
            )
        )
    rows.append(hpe.check_fejer(traj, z_star, raise_on_violation=False))
    rel = f"{CERT_REL_TOL:g} relative"
    if alpha < 2.0:
        running_min, rhs = pointwise_certificate(traj, z_star, raise_on_violation=False)
        pw = [
            (k + 1, float(rhs[k] + cert_tol(running_min[k], rhs[k]) - running_min[k]))
            for k in range(len(rhs))
        ]
        rows.append(hpe._row_from_slacks("pointwise_bound", pw, rel))
    else:
        rows.append(
            ReportRow("pointwise_bound", True, math.inf, None, "-", "not-applicable at alpha=2")
        )
    pre = _Precomp(traj, metric)
    ks = checked_iterations(pre.K, full=full_grid)
    checks, _, _, _ = _ergodic_checks(traj, z_star, metric, pre, ks)
    r_b, e_b, e_nn, i_f, i_g, cons_rows, split_rows = [], [], [], [], [], [], []
    for chk in checks:
        k = chk.point.k
        eps_sum = chk.point.eps_x + chk.point.eps_y
        r_b.append((k, chk.r_rhs + cert_tol(chk.r_lhs, chk.r_rhs) - chk.r_lhs))
        e_b.append((k, chk.eps_rhs + cert_tol(eps_sum, chk.eps_rhs) - eps_sum))
        e_nn.append(
            (k, min(chk.point.eps_x + cert_tol(chk.point.eps_x), chk.point.eps_y + cert_tol(chk.point.eps_y)))
        )
        i_f.append((k, max(chk.point.eps_x, 0.0) + cert_tol(chk.point.eps_x) - chk.inclusion_gap_f))
        i_g.append((k, max(chk.point.eps_y, 0.0) + cert_tol(chk.point.eps_y) - chk.inclusion_gap_g))
        cons_rows.append((k, ERGODIC_IDENTITY_TOL - chk.constraint_residual))
        split_rows.append(
            (k, ERGODIC_IDENTITY_TOL * (1.0 + abs(chk.metric_eps)) - chk.split_residual)
        )
    rows.append(hpe._row_from_slacks("ergodic_residual_bound", r_b, rel))
    rows.append(hpe._row_from_slacks("ergodic_eps_bound", e_b, rel))
    rows.append(hpe._row_from_slacks("ergodic_eps_nonneg", e_nn, rel))
    rows.append(hpe._row_from_slacks("ergodic_inclusion_f", i_f, rel))
    rows.append(hpe._row_from_slacks("ergodic_inclusion_g", i_g, rel))
    rows.append(
        hpe._row_from_slacks("ergodic_constraint_identity", cons_rows, f"{ERGODIC_IDENTITY_TOL:g}")
    )
    rows.append(
        hpe._row_from_slacks(
            "eps_split_identity", split_rows, f"{ERGODIC_IDENTITY_TOL:g} relative"
        )
    )
    meta = {
        "alpha": alpha,
        "beta": params.beta,
        "iterations": len(traj.states) - 1,
        "d0": d0,
        "sigma": sig,
        "c_alpha": c_a,
        "c_tilde_alpha": ct_a,
        "checked_iterations": ks,
        "full_grid": bool(full_grid),
    }
    return VerificationReport(rows=rows, meta=meta)
