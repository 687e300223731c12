"""The relaxed proximal ADMM iteration engine.

One iteration, for penalty beta > 0, relaxation factor alpha in (0, 2]
and symmetric PSD proximal weights H1, H2:

    x_k = argmin_x  f(x) - <gamma_{k-1}, Ax> + (beta/2)||Ax + B y_{k-1} - b||^2
                    + (1/2)||x - x_{k-1}||^2_{H1}

    y_k = argmin_y  g(y) - <gamma_{k-1}, By>
                    + (beta/2)||alpha(A x_k + B y_{k-1} - b) + B(y - y_{k-1})||^2
                    + (1/2)||y - y_{k-1}||^2_{H2}

    gamma_k = gamma_{k-1} - beta[alpha(A x_k + B y_{k-1} - b) + B(y_k - y_{k-1})]

together with the intermediate multiplier

    gamma_tilde_k = gamma_{k-1} - beta(A x_k + B y_{k-1} - b),

the point at which both subproblems' optimality inclusions hold.  With
alpha = 1 and H1 = H2 = 0 this is the standard two-block ADMM.

The linearized mode picks H = tau*I - beta*Op'Op (Op the block's
constraint matrix), which cancels the quadratic coupling and reduces the
subproblem to a single proximal step of the block function:

    x_k = prox_{f/tau1}( x_{k-1} + (1/tau1) A'(gamma_{k-1}
                          - beta(A x_{k-1} + B y_{k-1} - b)) )
    y_k = prox_{g/tau2}( y_{k-1} + (1/tau2) B'(gamma_{k-1}
                          - alpha*beta(A x_k + B y_{k-1} - b)) )

requiring tau >= beta*||Op||^2 so that H stays PSD.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import hpe, linalg, problems
from .errors import ConfigError

# Auto mode picks tau = AUTO_TAU_MARGIN * beta * ||Op||^2, strictly above
# the PSD threshold so H = tau*I - beta*Op'Op is positive definite.
AUTO_TAU_MARGIN = 1.01


@dataclass(frozen=True)
class ZeroH:
    """No proximal weight (H = 0)."""


@dataclass(frozen=True)
class ExplicitH:
    """A user-supplied symmetric PSD proximal weight."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = linalg.as_matrix(self.matrix, name="H").copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True)
class LinearizedH:
    """H = tau*I - beta*Op'Op; tau=None resolves to a margin above beta*||Op||^2."""

    tau: Optional[float] = None


HMode = Union[ZeroH, ExplicitH, LinearizedH]


@dataclass(frozen=True)
class GadmmParams:
    """Algorithm configuration.

    ``stop_tol`` = 0 disables the early-stopping rule and always runs the
    full ``max_iter`` iterations (useful when exercising the bounds).
    """

    beta: float
    alpha: float = 1.0
    h1: HMode = field(default_factory=ZeroH)
    h2: HMode = field(default_factory=ZeroH)
    max_iter: int = 1000
    stop_tol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "stop_tol", float(self.stop_tol))
        if not self.beta > 0:
            raise ConfigError("beta must be positive")
        if not 0.0 < self.alpha <= 2.0:
            raise ConfigError("alpha must lie in (0, 2]")
        if not isinstance(self.max_iter, int) or self.max_iter < 0:
            raise ConfigError("max_iter must be a nonnegative integer")
        if not self.stop_tol >= 0:
            raise ConfigError("stop_tol must be nonnegative")
        for name, mode in (("h1", self.h1), ("h2", self.h2)):
            if not isinstance(mode, (ZeroH, ExplicitH, LinearizedH)):
                raise ConfigError(f"{name} must be ZeroH, ExplicitH or LinearizedH")
            if isinstance(mode, LinearizedH) and mode.tau is not None and not mode.tau > 0:
                raise ConfigError(f"{name}: tau must be positive")


@dataclass(frozen=True)
class IterateState:
    """One recorded iterate.  Deltas and the intermediate multiplier are
    absent at k = 0."""

    k: int
    x: np.ndarray
    y: np.ndarray
    gamma: np.ndarray
    gamma_tilde: Optional[np.ndarray] = None
    dx: Optional[np.ndarray] = None
    dy: Optional[np.ndarray] = None
    dgamma: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    """A recorded run: the instance, the configuration, the resolved
    proximal weights, and the iterate sequence from k = 0 on."""

    instance: problems.SeparableInstance
    params: GadmmParams
    h1: np.ndarray
    h2: np.ndarray
    states: list

    @property
    def iterations(self) -> int:
        return len(self.states) - 1

    @property
    def final(self) -> IterateState:
        return self.states[-1]


def _resolve_h(mode: HMode, op: np.ndarray, beta: float, dim: int, name: str):
    """Return (H, tau) for one block; tau is None unless linearized."""
    if isinstance(mode, ZeroH):
        return np.zeros((dim, dim)), None
    if isinstance(mode, ExplicitH):
        mat = linalg.as_matrix(mode.matrix, rows=dim, cols=dim, name=name)
        try:
            linalg.PsdOperator.from_matrix(mat, name=name)
        except linalg.NotPositiveDefiniteError as exc:
            raise ConfigError(str(exc)) from exc
        return mat, None
    gram_norm = linalg.spectral_norm_sq(op)
    tau = mode.tau if mode.tau is not None else AUTO_TAU_MARGIN * beta * gram_norm
    if not tau > 0:
        raise ConfigError(f"{name}: resolved tau must be positive (operator block is zero?)")
    if tau < beta * gram_norm * (1.0 - 1e-12):
        raise ConfigError(
            f"{name}: tau={tau:g} is below beta*||Op||^2={beta * gram_norm:g}; "
            "the linearized proximal weight would not be PSD"
        )
    return tau * np.eye(dim) - beta * (op.T @ op), tau


def resolve_prox_terms(inst, params) -> tuple[np.ndarray, np.ndarray]:
    """Resolve the two proximal-weight modes into concrete matrices."""
    h1, _ = _resolve_h(params.h1, inst.A, params.beta, inst.n, "h1")
    h2, _ = _resolve_h(params.h2, inst.B, params.beta, inst.p, "h2")
    return h1, h2


class _Engine:
    """Per-run state: resolved weights and prefactored subproblem solvers."""

    def __init__(self, inst: problems.SeparableInstance, params: GadmmParams):
        self.inst = inst
        self.params = params
        A, B = inst.A, inst.B
        beta, alpha = params.beta, params.alpha
        self.h1, self.tau1 = _resolve_h(params.h1, A, beta, inst.n, "h1")
        self.h2, self.tau2 = _resolve_h(params.h2, B, beta, inst.p, "h2")
        self._x_direct = self._direct_solver(inst.f, A, self.h1, params.h1, "x")
        self._y_direct = self._direct_solver(inst.g, B, self.h2, params.h2, "y")
        if self.tau1 is not None:
            self._x_prox = inst.f.prox_solver(1.0 / self.tau1)
        if self.tau2 is not None:
            self._y_prox = inst.g.prox_solver(1.0 / self.tau2)

    def _direct_solver(self, F, op, h, mode, block):
        if isinstance(mode, LinearizedH):
            return None
        parts = problems._quadratic_parts(F, op.shape[1])
        if parts is None:
            raise ConfigError(
                f"{block} block: a nonsmooth objective requires the linearized mode"
            )
        P, q = parts
        K = P + self.params.beta * (op.T @ op) + h
        return linalg.SpdFactor(K, name=f"{block}-subproblem matrix"), q

    def x_update(self, x_prev, y_prev, gamma_prev, By_prev=None):
        A, B, b = self.inst.A, self.inst.B, self.inst.b
        beta = self.params.beta
        if By_prev is None:
            By_prev = B @ y_prev
        if self._x_direct is not None:
            fac, q = self._x_direct
            rhs = A.T @ gamma_prev - q - beta * (A.T @ (By_prev - b)) + self.h1 @ x_prev
            return fac.solve(rhs)
        tau = self.tau1
        resid = A @ x_prev + By_prev - b
        v = x_prev + (A.T @ (gamma_prev - beta * resid)) / tau
        return self._x_prox(v)

    def y_update(self, x_new, y_prev, gamma_prev, Ax_new=None, By_prev=None):
        A, B, b = self.inst.A, self.inst.B, self.inst.b
        beta, alpha = self.params.beta, self.params.alpha
        if Ax_new is None:
            Ax_new = A @ x_new
        if By_prev is None:
            By_prev = B @ y_prev
        relaxed = alpha * (Ax_new + By_prev - b)
        if self._y_direct is not None:
            fac, q = self._y_direct
            rhs = (
                B.T @ gamma_prev
                - q
                - beta * (B.T @ (relaxed - By_prev))
                + self.h2 @ y_prev
            )
            return fac.solve(rhs)
        v = y_prev + (B.T @ (gamma_prev - beta * relaxed)) / self.tau2
        return self._y_prox(v)

    def step(self, state: IterateState, By_prev=None):
        """Advance one iteration; returns (new state, B y_k) so the caller
        can carry the product forward."""
        A, B, b = self.inst.A, self.inst.B, self.inst.b
        beta, alpha = self.params.beta, self.params.alpha
        if By_prev is None:
            By_prev = B @ state.y
        x = self.x_update(state.x, state.y, state.gamma, By_prev=By_prev)
        Ax = A @ x
        half_resid = Ax + By_prev - b
        y = self.y_update(x, state.y, state.gamma, Ax_new=Ax, By_prev=By_prev)
        By = B @ y
        gamma = state.gamma - beta * (alpha * half_resid + (By - By_prev))
        gamma_tilde = state.gamma - beta * half_resid
        new = IterateState(
            k=state.k + 1,
            x=x,
            y=y,
            gamma=gamma,
            gamma_tilde=gamma_tilde,
            dx=x - state.x,
            dy=y - state.y,
            dgamma=gamma - state.gamma,
        )
        return new, By


def solve_x_subproblem(inst, params, y_prev, x_prev, gamma_prev) -> np.ndarray:
    return _Engine(inst, params).x_update(
        linalg.as_vector(x_prev, dim=inst.n, name="x_prev"),
        linalg.as_vector(y_prev, dim=inst.p, name="y_prev"),
        linalg.as_vector(gamma_prev, dim=inst.m, name="gamma_prev"),
    )


def solve_y_subproblem(inst, params, x_new, y_prev, gamma_prev) -> np.ndarray:
    return _Engine(inst, params).y_update(
        linalg.as_vector(x_new, dim=inst.n, name="x_new"),
        linalg.as_vector(y_prev, dim=inst.p, name="y_prev"),
        linalg.as_vector(gamma_prev, dim=inst.m, name="gamma_prev"),
    )


def step(inst, params, state: IterateState) -> IterateState:
    """One iteration from an arbitrary state (resolves and factors per call;
    use :func:`run` for whole trajectories)."""
    new, _ = _Engine(inst, params).step(state)
    return new


def initial_state(inst, x0=None, y0=None, gamma0=None) -> IterateState:
    x0 = np.zeros(inst.n) if x0 is None else linalg.as_vector(x0, dim=inst.n, name="x0")
    y0 = np.zeros(inst.p) if y0 is None else linalg.as_vector(y0, dim=inst.p, name="y0")
    gamma0 = (
        np.zeros(inst.m) if gamma0 is None else linalg.as_vector(gamma0, dim=inst.m, name="gamma0")
    )
    return IterateState(k=0, x=x0, y=y0, gamma=gamma0)


def run(inst, params, x0=None, y0=None, gamma0=None) -> Trajectory:
    """Iterate until max_iter or until the stopping rule fires.

    The stopping rule (when stop_tol > 0) is
        max( ||(dx_k, dy_k, dgamma_k)||_M ,
             first-order gap at (x_k, y_k, gamma_tilde_k) ) <= stop_tol,
    i.e. the certified pointwise residual plus the gap at the point where
    the subproblem inclusions hold.
    """
    eng = _Engine(inst, params)
    state = initial_state(inst, x0, y0, gamma0)
    states = [state]
    metric = None
    if params.stop_tol > 0:
        metric = hpe.build_metric(inst, eng.h1, eng.h2, params.beta, params.alpha)
    By = inst.B @ state.y
    for _ in range(params.max_iter):
        state, By = eng.step(state, By_prev=By)
        states.append(state)
        if metric is not None:
            dz = np.concatenate([state.dx, state.dy, state.dgamma])
            step_size = math.sqrt(metric.seminorm_sq(dz))
            gap = problems.kkt_gap(
                inst, problems.KktPoint(state.x, state.y, state.gamma_tilde)
            )
            if max(step_size, gap) <= params.stop_tol:
                break
    return Trajectory(instance=inst, params=params, h1=eng.h1, h2=eng.h2, states=states)


# ---------------------------------------------------------------------------
# trajectory files (CSV)


def _fmt(v) -> str:
    return repr(float(v))


def trajectory_header(inst) -> list[str]:
    cols = ["k"]
    cols += [f"x{i}" for i in range(inst.n)]
    cols += [f"y{i}" for i in range(inst.p)]
    cols += [f"gamma{i}" for i in range(inst.m)]
    cols += [f"gamma_tilde{i}" for i in range(inst.m)]
    cols += ["dxM", "kkt_gap"]
    return cols


def save_trajectory_csv(traj: Trajectory, path) -> None:
    """Write one row per iteration: k, x, y, gamma, gamma_tilde, the
    M-seminorm of the step, and the first-order gap.  Floats are written
    with full round-trip precision."""
    inst = traj.instance
    metric = hpe.metric_for(traj)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trajectory_header(inst))
        for st in traj.states:
            row = [str(st.k)]
            row += [_fmt(v) for v in st.x]
            row += [_fmt(v) for v in st.y]
            row += [_fmt(v) for v in st.gamma]
            if st.k == 0:
                row += [""] * inst.m
                row += ["", _fmt(problems.kkt_gap(inst, problems.KktPoint(st.x, st.y, st.gamma)))]
            else:
                row += [_fmt(v) for v in st.gamma_tilde]
                dz = np.concatenate([st.dx, st.dy, st.dgamma])
                row.append(_fmt(math.sqrt(metric.seminorm_sq(dz))))
                row.append(
                    _fmt(
                        problems.kkt_gap(
                            inst, problems.KktPoint(st.x, st.y, st.gamma_tilde)
                        )
                    )
                )
            writer.writerow(row)


def load_trajectory_csv(path, inst, params) -> Trajectory:
    """Rebuild a trajectory from a CSV written by :func:`save_trajectory_csv`.

    Deltas are recomputed as successive differences; the recorded
    intermediate multipliers are taken from the file so that the
    certificate checks exercise what was actually written.
    """
    n, p, m = inst.n, inst.p, inst.m
    expected = trajectory_header(inst)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise ValueError(f"trajectory file: unexpected header {header}")
        states = []
        prev = None
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise ValueError(f"trajectory file: row {lineno} has {len(row)} cells")
            k = int(row[0])
            if k != len(states):
                raise ValueError(f"trajectory file: iteration indices not contiguous at row {lineno}")
            vals = row[1:]
            x = np.array([float(v) for v in vals[:n]])
            y = np.array([float(v) for v in vals[n : n + p]])
            gamma = np.array([float(v) for v in vals[n + p : n + p + m]])
            if k == 0:
                state = IterateState(k=0, x=x, y=y, gamma=gamma)
            else:
                gamma_tilde = np.array(
                    [float(v) for v in vals[n + p + m : n + p + 2 * m]]
                )
                state = IterateState(
                    k=k,
                    x=x,
                    y=y,
                    gamma=gamma,
                    gamma_tilde=gamma_tilde,
                    dx=x - prev.x,
                    dy=y - prev.y,
                    dgamma=gamma - prev.gamma,
                )
            states.append(state)
            prev = state
    if not states:
        raise ValueError("trajectory file: no rows")
    h1, h2 = resolve_prox_terms(inst, params)
    return Trajectory(instance=inst, params=params, h1=h1, h2=h2, states=states)
