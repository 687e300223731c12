"""Relaxed proximal ADMM with per-iteration numerical convergence certificates.

The solver handles linearly constrained separable convex problems

    min f(x) + g(y)   subject to   A x + B y = b

with a relaxation factor alpha in (0, 2], a penalty beta > 0, and
optional proximal weights (including the linearized mode that reduces
each subproblem to a single proximal step).  The certificate modules
re-derive, on a recorded trajectory, every inequality the method is
supposed to satisfy: the inexact proximal-point conditions in the block
seminorm, the pointwise O(1/sqrt(k)) bound, and the ergodic O(1/k)
bounds including the extreme relaxation alpha = 2.
"""

from .certificates import (
    ErgodicPoint,
    VerificationReport,
    bound_constants,
    bound_report,
    epsilon_split_identity,
    ergodic_certificate,
    ergodic_point,
    full_verification,
    pointwise_certificate,
    rate_estimate,
)
from .errors import (
    CertificationError,
    ConfigError,
    GadmmError,
    InternalCheckError,
    IterationLimitError,
    NotPositiveDefiniteError,
)
from .hpe import (
    HpeCertificate,
    ProximalMetric,
    build_metric,
    certify_hpe,
    check_delta_inequalities,
    check_fejer,
    check_rho_bound,
    metric_for,
    rho_sequence,
    sigma_alpha,
)
from .oracles import L1, Quadratic, Zero, fenchel_gap
from .problems import (
    KktPoint,
    SeparableInstance,
    generate_lasso,
    generate_qp,
    kkt_gap,
    load_instance,
    save_instance,
    solve_ground_truth,
)
from .solver import (
    ExplicitH,
    GadmmParams,
    IterateState,
    LinearizedH,
    Trajectory,
    ZeroH,
    load_trajectory_csv,
    run,
    save_trajectory_csv,
    step,
)

__all__ = [
    "CertificationError",
    "ConfigError",
    "ErgodicPoint",
    "ExplicitH",
    "GadmmError",
    "GadmmParams",
    "HpeCertificate",
    "InternalCheckError",
    "IterateState",
    "IterationLimitError",
    "KktPoint",
    "L1",
    "LinearizedH",
    "NotPositiveDefiniteError",
    "ProximalMetric",
    "Quadratic",
    "SeparableInstance",
    "Trajectory",
    "VerificationReport",
    "Zero",
    "ZeroH",
    "bound_constants",
    "bound_report",
    "build_metric",
    "certify_hpe",
    "check_delta_inequalities",
    "check_fejer",
    "check_rho_bound",
    "epsilon_split_identity",
    "ergodic_certificate",
    "ergodic_point",
    "fenchel_gap",
    "full_verification",
    "generate_lasso",
    "generate_qp",
    "kkt_gap",
    "load_instance",
    "load_trajectory_csv",
    "metric_for",
    "pointwise_certificate",
    "rate_estimate",
    "rho_sequence",
    "run",
    "save_instance",
    "save_trajectory_csv",
    "sigma_alpha",
    "solve_ground_truth",
    "step",
]

__version__ = "0.1.0"
