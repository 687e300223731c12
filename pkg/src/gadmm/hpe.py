"""Per-iteration certificates in the relaxed proximal metric.

The iteration of :mod:`gadmm.solver` is an inexact proximal-point scheme
for the first-order operator

    T(x, y, gamma) = ( df(x) - A'gamma,  dg(y) - B'gamma,  Ax + By - b )

in the seminorm induced by the block operator

    M = [ H1        0                  0              ]
        [ 0    H2 + (beta/alpha) B'B   c B'           ]      c = (1-alpha)/alpha,
        [ 0    c B                     I/(alpha*beta) ]

which is symmetric positive semidefinite for every beta > 0 and alpha in
(0, 2].  With z_k = (x_k, y_k, gamma_k), the extragradient point
z~_k = (x_k, y_k, gamma_tilde_k), the relative-error constant

    sigma_alpha = 1 / (1 + alpha(2 - alpha))        (= 1 exactly at alpha = 2)

and the error budget

    eta_0 = 4(2-alpha) sigma_alpha d0 / alpha,
    eta_k = (2-alpha) sigma_alpha ||dy_k||^2_{H2} / alpha,
    d0    = ||z* - z0||^2_M   for a first-order-optimal z*,

every iteration must satisfy the inclusion M(z_{k-1} - z_k) in T(z~_k)
(three block residuals: two conjugate gaps and one linear identity) and
the relative-error inequality

    ||z~_k - z_k||^2_M + eta_k  <=  sigma_alpha ||z~_k - z_{k-1}||^2_M + eta_{k-1}.

This module assembles M and certifies those conditions on a recorded
trajectory, together with the companion inequalities: the bound on the
running maximum rho_k = max_i ||z~_i - z_{i-1}||^2_M, the <B dy, dgamma>
inequalities that feed the error budget, and the Fejer-type monotonicity
of ||z* - z_k||^2_M + eta_k.  Certification is post-hoc and shares no
state with the iteration engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from . import linalg, oracles, problems
from .errors import CertificationError, GadmmError, NotPositiveDefiniteError

if TYPE_CHECKING:  # pragma: no cover
    from .solver import Trajectory

# Relative certificate tolerance: inequalities get 1e-7 * (1 + magnitude)
# of slack, since they compare differences of squared seminorms whose
# rounding noise scales with magnitude.
CERT_REL_TOL = 1e-7

# Conjugate-gap allowance for the per-iteration inclusions.
INCLUSION_GAP_TOL = 1e-8

# Allowance for the linear identities tying the recorded sequences together.
IDENTITY_TOL = 1e-10


def cert_tol(*magnitudes) -> float:
    big = max((abs(float(m)) for m in magnitudes), default=0.0)
    return CERT_REL_TOL * (1.0 + big)


def sigma_alpha(alpha) -> float:
    """Relative-error constant 1/(1 + alpha(2-alpha)); equals 1 at alpha=2."""
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ValueError("alpha must lie in (0, 2]")
    return 1.0 / (1.0 + alpha * (2.0 - alpha))


@dataclass(frozen=True)
class ProximalMetric:
    """The validated block operator M with the block sizes it was built for."""

    op: linalg.PsdOperator
    n: int
    p: int
    m: int

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def side(self) -> int:
        return self.op.side

    def stack(self, x, y, gamma) -> np.ndarray:
        return np.concatenate(
            [
                linalg.as_vector(x, dim=self.n, name="x"),
                linalg.as_vector(y, dim=self.p, name="y"),
                linalg.as_vector(gamma, dim=self.m, name="gamma"),
            ]
        )

    def apply(self, v) -> np.ndarray:
        return self.matrix @ linalg.as_vector(v, dim=self.side, name="v")

    def seminorm_sq(self, v) -> float:
        return self.op.seminorm_sq(v)

    def seminorm(self, v) -> float:
        return math.sqrt(max(self.seminorm_sq(v), 0.0))


def build_metric(inst, h1, h2, beta, alpha) -> ProximalMetric:
    """Assemble the block operator M and run the PSD probe on it."""
    n, p, m = inst.n, inst.p, inst.m
    h1 = linalg.as_matrix(h1, rows=n, cols=n, name="h1")
    h2 = linalg.as_matrix(h2, rows=p, cols=p, name="h2")
    beta = float(beta)
    alpha = float(alpha)
    sigma_alpha(alpha)  # range check
    if not beta > 0:
        raise ValueError("beta must be positive")
    c = (1.0 - alpha) / alpha
    B = inst.B
    M = np.zeros((n + p + m, n + p + m))
    M[:n, :n] = h1
    M[n : n + p, n : n + p] = h2 + (beta / alpha) * (B.T @ B)
    M[n : n + p, n + p :] = c * B.T
    M[n + p :, n : n + p] = c * B
    M[n + p :, n + p :] = np.eye(m) / (alpha * beta)
    try:
        op = linalg.PsdOperator.from_matrix(M, name="proximal metric")
    except NotPositiveDefiniteError as exc:
        raise GadmmError(
            "assembled proximal metric failed the PSD probe (assembly bug)"
        ) from exc
    return ProximalMetric(op=op, n=n, p=p, m=m)


def metric_for(traj: "Trajectory") -> ProximalMetric:
    return build_metric(traj.instance, traj.h1, traj.h2, traj.params.beta, traj.params.alpha)


def initial_distance_sq(traj: "Trajectory", z_star: problems.KktPoint, metric=None) -> float:
    """d0 = ||z* - z0||^2_M for the trajectory's initial point."""
    if metric is None:
        metric = metric_for(traj)
    z0 = traj.states[0]
    diff = metric.stack(z_star.x - z0.x, z_star.y - z0.y, z_star.gamma - z0.gamma)
    return metric.seminorm_sq(diff)


def eta_sequence(traj: "Trajectory", d0: float) -> np.ndarray:
    """Error budgets eta_0..eta_K for a recorded trajectory."""
    alpha = traj.params.alpha
    sig = sigma_alpha(alpha)
    coef = (2.0 - alpha) * sig / alpha
    out = np.empty(len(traj.states))
    out[0] = 4.0 * coef * d0
    for st in traj.states[1:]:
        out[st.k] = coef * linalg.seminorm_sq(traj.h2, st.dy)
    return out


def _check_reference(inst, z_star) -> problems.KktPoint:
    gap = problems.kkt_gap(inst, z_star)
    if not gap <= problems.SOLUTION_GAP_TOL:
        raise ValueError(f"reference point fails the optimality check (gap {gap:.3e})")
    return z_star


def inclusion_residuals(inst, h1, h2, beta, alpha, state) -> tuple[float, float, float]:
    """Block residuals of M(z_{k-1} - z_k) in T(z~_k):

    - conjugate gap of A'gamma_tilde - H1 dx at x (must vanish),
    - conjugate gap of B'gamma_tilde - (H2 + (beta/alpha)B'B) dy
      - ((1-alpha)/alpha) B' dgamma at y (must vanish),
    - norm of ((1-alpha)/alpha) B dy + dgamma/(alpha beta) + Ax + By - b.
    """
    A, B, b = inst.A, inst.B, inst.b
    c = (1.0 - alpha) / alpha
    uf = A.T @ state.gamma_tilde - h1 @ state.dx
    gap_f = oracles.fenchel_gap(inst.f, uf, state.x)
    Bdy = B @ state.dy
    ug = (
        B.T @ state.gamma_tilde
        - h2 @ state.dy
        - (beta / alpha) * (B.T @ Bdy)
        - c * (B.T @ state.dgamma)
    )
    gap_g = oracles.fenchel_gap(inst.g, ug, state.y)
    cons = float(
        np.linalg.norm(
            c * Bdy + state.dgamma / (alpha * beta) + A @ state.x + B @ state.y - b
        )
    )
    return gap_f, gap_g, cons


@dataclass(frozen=True)
class HpeCertificate:
    """Residuals and slack of the per-iteration conditions at one k."""

    k: int
    lhs: float          # ||z~_k - z_k||^2_M + eta_k
    rhs: float          # sigma ||z~_k - z_{k-1}||^2_M + eta_{k-1}
    slack: float        # rhs - lhs (must be >= -tol)
    inclusion_gap_f: float
    inclusion_gap_g: float
    constraint_residual: float   # linear identity on (dy, dgamma, Ax+By-b)
    multiplier_residual: float   # || gamma_tilde - gamma_prev - (dgamma + beta B dy)/alpha ||
    eta: float
    identity_tol: float          # resolved allowance for the two identities at this k


def certify_hpe(traj: "Trajectory", z_star: problems.KktPoint, raise_on_violation=True):
    """Evaluate the per-iteration conditions at every k >= 1.

    Returns the list of :class:`HpeCertificate`; with ``raise_on_violation``
    the first violated condition raises a :class:`CertificationError`
    naming the iteration and the check.
    """
    if not traj.states:
        raise ValueError("empty trajectory")
    inst = traj.instance
    _check_reference(inst, z_star)
    params = traj.params
    alpha, beta = params.alpha, params.beta
    sig = sigma_alpha(alpha)
    metric = metric_for(traj)
    d0 = initial_distance_sq(traj, z_star, metric)
    eta = eta_sequence(traj, d0)
    B = inst.B
    certs = []
    for prev, st in zip(traj.states, traj.states[1:]):
        k = st.k
        gap_to_iter = metric.stack(np.zeros(inst.n), np.zeros(inst.p), st.gamma_tilde - st.gamma)
        gap_to_prev = metric.stack(st.x - prev.x, st.y - prev.y, st.gamma_tilde - prev.gamma)
        lhs = metric.seminorm_sq(gap_to_iter) + eta[k]
        rhs = sig * metric.seminorm_sq(gap_to_prev) + eta[k - 1]
        slack = rhs - lhs
        gap_f, gap_g, cons = inclusion_residuals(inst, traj.h1, traj.h2, beta, alpha, st)
        mult = float(
            np.linalg.norm(
                st.gamma_tilde - prev.gamma - (st.dgamma + beta * (B @ st.dy)) / alpha
            )
        )
        scale = 1.0 + float(
            max(
                np.max(np.abs(st.gamma_tilde)),
                np.max(np.abs(st.gamma)),
                np.max(np.abs(prev.gamma)),
            )
        )
        cert = HpeCertificate(
            k=k,
            lhs=lhs,
            rhs=rhs,
            slack=slack,
            inclusion_gap_f=gap_f,
            inclusion_gap_g=gap_g,
            constraint_residual=cons,
            multiplier_residual=mult,
            eta=eta[k],
            identity_tol=IDENTITY_TOL * scale,
        )
        certs.append(cert)
        if raise_on_violation:
            if slack < -cert_tol(lhs, rhs):
                raise CertificationError(
                    f"relative-error inequality violated at k={k} (slack {slack:.3e})",
                    k=k,
                    check="hpe_inequality",
                )
            if not gap_f <= INCLUSION_GAP_TOL:
                raise CertificationError(
                    f"inclusion gap for the x block at k={k} is {gap_f:.3e}",
                    k=k,
                    check="hpe_inclusion_f",
                )
            if not gap_g <= INCLUSION_GAP_TOL:
                raise CertificationError(
                    f"inclusion gap for the y block at k={k} is {gap_g:.3e}",
                    k=k,
                    check="hpe_inclusion_g",
                )
            if mult > cert.identity_tol:
                raise CertificationError(
                    f"intermediate-multiplier identity off by {mult:.3e} at k={k}",
                    k=k,
                    check="multiplier_identity",
                )
            if cons > cert.identity_tol:
                raise CertificationError(
                    f"constraint identity off by {cons:.3e} at k={k}",
                    k=k,
                    check="constraint_identity",
                )
    return certs


def extragradient_gaps_sq(traj: "Trajectory", metric=None) -> np.ndarray:
    """||z~_k - z_{k-1}||^2_M for k = 1..K."""
    if metric is None:
        metric = metric_for(traj)
    out = np.empty(len(traj.states) - 1)
    for prev, st in zip(traj.states, traj.states[1:]):
        diff = metric.stack(st.x - prev.x, st.y - prev.y, st.gamma_tilde - prev.gamma)
        out[st.k - 1] = metric.seminorm_sq(diff)
    return out


def rho_sequence(traj: "Trajectory", metric=None) -> np.ndarray:
    """Running maximum rho_k = max_{i<=k} ||z~_i - z_{i-1}||^2_M (k = 1..K)."""
    return np.maximum.accumulate(extragradient_gaps_sq(traj, metric))


@dataclass
class ReportRow:
    """One named check over a whole trajectory, with its worst slack."""

    name: str
    passed: bool
    worst_slack: float
    worst_k: Optional[int]
    tolerance: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "worst_slack": self.worst_slack,
            "worst_k": self.worst_k,
            "tolerance": self.tolerance,
            "note": self.note,
        }


def _row_from_slacks(name, slacks, tolerance, note="") -> ReportRow:
    slacks = list(slacks)
    if not slacks:
        return ReportRow(name, True, math.inf, None, tolerance, note or "no iterations")
    worst_idx = int(np.argmin([s for _, s in slacks]))
    worst_k, worst = slacks[worst_idx]
    return ReportRow(name, all(s >= 0 for _, s in slacks), worst, worst_k, tolerance, note)


def check_rho_bound(traj, z_star, raise_on_violation=True) -> ReportRow:
    """rho_k <= 4(1+2alpha)[alpha + 4(2-alpha)sigma] d0 / alpha^3 for all k.

    This is the bound that keeps the ergodic certificates finite even at
    alpha = 2, where the relative-error constant equals one.
    """
    _check_reference(traj.instance, z_star)
    alpha = traj.params.alpha
    sig = sigma_alpha(alpha)
    metric = metric_for(traj)
    d0 = initial_distance_sq(traj, z_star, metric)
    bound = 4.0 * (1.0 + 2.0 * alpha) * (alpha + 4.0 * (2.0 - alpha) * sig) * d0 / alpha**3
    rho = rho_sequence(traj, metric)
    slacks = [(k + 1, bound + cert_tol(bound, r) - r) for k, r in enumerate(rho)]
    row = _row_from_slacks(
        "rho_bound", slacks, f"{CERT_REL_TOL:g} relative", note=f"bound={bound:.6g}"
    )
    if raise_on_violation and not row.passed:
        raise CertificationError(
            f"running-maximum bound violated at k={row.worst_k} (slack {row.worst_slack:.3e})",
            k=row.worst_k,
            check="rho_bound",
        )
    return row


def check_rho_contractive_bound(traj, z_star, raise_on_violation=True) -> ReportRow:
    """rho_k <= (d0 + eta_0)/(1 - sigma), valid only when sigma < 1 (alpha < 2)."""
    alpha = traj.params.alpha
    sig = sigma_alpha(alpha)
    if sig >= 1.0:
        raise ValueError("contractive rho bound undefined at alpha = 2 (sigma = 1)")
    _check_reference(traj.instance, z_star)
    metric = metric_for(traj)
    d0 = initial_distance_sq(traj, z_star, metric)
    eta0 = 4.0 * (2.0 - alpha) * sig * d0 / alpha
    bound = (d0 + eta0) / (1.0 - sig)
    rho = rho_sequence(traj, metric)
    slacks = [(k + 1, bound + cert_tol(bound, r) - r) for k, r in enumerate(rho)]
    row = _row_from_slacks(
        "rho_contractive_bound", slacks, f"{CERT_REL_TOL:g} relative", note=f"bound={bound:.6g}"
    )
    if raise_on_violation and not row.passed:
        raise CertificationError(
            f"contractive running-maximum bound violated at k={row.worst_k}",
            k=row.worst_k,
            check="rho_contractive_bound",
        )
    return row


def check_delta_inequalities(traj, z_star, raise_on_violation=True) -> ReportRow:
    """The <B dy_k, dgamma_k> inequalities that feed the error budget:

        2 <B dy_1, dgamma_1> >= ||dy_1||^2_{H2} - 4 d0,
        2 <B dy_k, dgamma_k> >= ||dy_k||^2_{H2} - ||dy_{k-1}||^2_{H2}   (k >= 2).
    """
    _check_reference(traj.instance, z_star)
    metric = metric_for(traj)
    d0 = initial_distance_sq(traj, z_star, metric)
    B = traj.instance.B
    h2 = traj.h2
    slacks = []
    prev_sq = None
    for st in traj.states[1:]:
        inner = 2.0 * float((B @ st.dy) @ st.dgamma)
        dy_sq = linalg.seminorm_sq(h2, st.dy)
        if st.k == 1:
            lower = dy_sq - 4.0 * d0
        else:
            lower = dy_sq - prev_sq
        slacks.append((st.k, inner - lower + cert_tol(inner, lower)))
        prev_sq = dy_sq
    row = _row_from_slacks("delta_y_gamma_inequality", slacks, f"{CERT_REL_TOL:g} relative")
    if raise_on_violation and not row.passed:
        raise CertificationError(
            f"step-coupling inequality violated at k={row.worst_k}",
            k=row.worst_k,
            check="delta_y_gamma_inequality",
        )
    return row


def check_fejer(traj, z_star, raise_on_violation=True) -> ReportRow:
    """Monotonicity of ||z* - z_k||^2_M + eta_k along the run."""
    _check_reference(traj.instance, z_star)
    metric = metric_for(traj)
    d0 = initial_distance_sq(traj, z_star, metric)
    eta = eta_sequence(traj, d0)
    vals = []
    for st in traj.states:
        diff = metric.stack(z_star.x - st.x, z_star.y - st.y, z_star.gamma - st.gamma)
        vals.append(metric.seminorm_sq(diff) + eta[st.k])
    slacks = [
        (k, vals[k - 1] - vals[k] + cert_tol(vals[k - 1], vals[k]))
        for k in range(1, len(vals))
    ]
    row = _row_from_slacks("fejer_monotonicity", slacks, f"{CERT_REL_TOL:g} relative")
    if raise_on_violation and not row.passed:
        raise CertificationError(
            f"Fejer monotonicity violated at k={row.worst_k}",
            k=row.worst_k,
            check="fejer_monotonicity",
        )
    return row


def metric_identity_residual(metric, z_prev, z_k, z_tilde, probe) -> float:
    """Residual of the algebraic expansion used by the Fejer argument:

        ||z-z_k||^2_M - ||z-z_{k-1}||^2_M
      = ||z~-z_k||^2_M - ||z~-z_{k-1}||^2_M + 2 <M(z_{k-1}-z_k), z-z~>

    for an arbitrary probe point z; holds identically, so the residual is
    pure rounding.
    """
    lhs = metric.seminorm_sq(probe - z_k) - metric.seminorm_sq(probe - z_prev)
    rhs = (
        metric.seminorm_sq(z_tilde - z_k)
        - metric.seminorm_sq(z_tilde - z_prev)
        + 2.0 * float(metric.apply(z_prev - z_k) @ (probe - z_tilde))
    )
    return abs(lhs - rhs)
