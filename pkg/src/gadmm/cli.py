"""Command-line front end.

Subcommands: generate an instance, run the solver, verify the recorded
certificates, and sweep the relaxation factor over a grid.  Exit codes
are a stable contract for scripts: 0 success, 1 configuration or I/O
error, 2 solver error, 3 certification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import certificates, hpe, problems, solver
from .errors import (
    CertificationError,
    ConfigError,
    IterationLimitError,
    NotPositiveDefiniteError,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_CERT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parse_h_mode(raw: str):
    if raw == "zero":
        return solver.ZeroH()
    if raw == "linearized":
        return solver.LinearizedH()
    if raw.startswith("linearized:"):
        try:
            return solver.LinearizedH(tau=float(raw.split(":", 1)[1]))
        except ValueError as exc:
            raise ConfigError(f"bad tau in '{raw}'") from exc
    if raw.startswith("file:"):
        path = raw.split(":", 1)[1]
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = data.get("matrix")
        return solver.ExplicitH(np.asarray(data, dtype=float))
    raise ConfigError(f"unrecognized proximal-weight mode '{raw}'")


def _add_solver_flags(p):
    p.add_argument("--alpha", type=float, default=1.0, help="relaxation factor in (0, 2]")
    p.add_argument("--beta", type=float, default=1.0, help="penalty parameter > 0")
    p.add_argument("--h1", default="zero", help="zero | linearized[:tau] | file:PATH")
    p.add_argument("--h2", default="zero", help="zero | linearized[:tau] | file:PATH")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--stop-tol", type=float, default=1e-8, help="0 disables early stopping")


def _params(args, alpha=None):
    return solver.GadmmParams(
        beta=args.beta,
        alpha=args.alpha if alpha is None else alpha,
        h1=_parse_h_mode(args.h1),
        h2=_parse_h_mode(args.h2),
        max_iter=args.max_iter,
        stop_tol=args.stop_tol,
    )


def _write_json(doc, path):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cmd_generate(args) -> int:
    if args.kind == "qp":
        inst = problems.generate_qp(args.seed, args.n, args.p, args.m)
    else:
        inst = problems.generate_lasso(args.seed, args.n, args.m_data, args.mu)
    problems.save_instance(inst, args.out)
    print(f"wrote {args.kind} instance (n={inst.n}, p={inst.p}, m={inst.m}) to {args.out}")
    return EXIT_OK


def _run_summary(traj, metric) -> dict:
    final = traj.final
    if final.k == 0:
        step_metric = None
        gap = problems.kkt_gap(
            traj.instance, problems.KktPoint(final.x, final.y, final.gamma)
        )
    else:
        dz = np.concatenate([final.dx, final.dy, final.dgamma])
        step_metric = math.sqrt(metric.seminorm_sq(dz))
        gap = problems.kkt_gap(
            traj.instance, problems.KktPoint(final.x, final.y, final.gamma_tilde)
        )
    return {
        "iterations": traj.iterations,
        "final_kkt_gap": gap,
        "final_step_metric": step_metric,
        "alpha": traj.params.alpha,
        "beta": traj.params.beta,
        "stopped_early": traj.iterations < traj.params.max_iter,
    }


def _cmd_run(args) -> int:
    inst = problems.load_instance(args.instance)
    params = _params(args)
    traj = solver.run(inst, params)
    os.makedirs(args.out, exist_ok=True)
    solver.save_trajectory_csv(traj, os.path.join(args.out, "trajectory.csv"))
    metric = hpe.metric_for(traj)
    _write_json(_run_summary(traj, metric), os.path.join(args.out, "summary.json"))
    print(f"ran {traj.iterations} iterations; outputs in {args.out}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    inst = problems.load_instance(args.instance)
    if inst.solution is None:
        raise ConfigError("verification needs an instance with a stored solution")
    params = _params(args)
    traj = solver.load_trajectory_csv(args.trajectory, inst, params)
    report = certificates.full_verification(traj, inst.solution, full_grid=args.verify_full)
    doc = report.to_dict()
    if args.out:
        _write_json(doc, args.out)
    else:
        json.dump(doc, sys.stdout, indent=1)
        print()
    if not report.passed:
        bad = report.first_failure
        print(
            f"certification failed: {bad.name} at k={bad.worst_k} "
            f"(slack {bad.worst_slack:.3e})",
            file=sys.stderr,
        )
        return EXIT_CERT
    print("all checks pass", file=sys.stderr)
    return EXIT_OK


_BENCH_COLUMNS = [
    "alpha",
    "iterations",
    "stopped_early",
    "final_kkt_gap",
    "pointwise_ratio",
    "ergodic_r_ratio",
    "ergodic_eps_ratio",
    "verification",
    "first_failure",
]


def _cmd_bench(args) -> int:
    inst = problems.load_instance(args.instance)
    if inst.solution is None:
        raise ConfigError("bench needs an instance with a stored solution")
    try:
        grid = [float(v) for v in args.alpha_grid.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad --alpha-grid '{args.alpha_grid}'") from exc
    if not grid:
        raise ConfigError("empty --alpha-grid")
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for alpha in grid:
        params = _params(args, alpha=alpha)
        traj = solver.run(inst, params)
        metric = hpe.metric_for(traj)
        summary = _run_summary(traj, metric)
        report = certificates.full_verification(traj, inst.solution)
        bounds = certificates.bound_report(traj, inst.solution)
        last = bounds.rows[-1] if bounds.rows else None
        pw = ""
        if last is not None and not math.isnan(last.pointwise_lhs) and last.pointwise_rhs > 0:
            pw = repr(last.pointwise_lhs / last.pointwise_rhs)
        r_ratio = repr(last.ergodic_r_lhs / last.ergodic_r_rhs) if last else ""
        e_ratio = (
            repr(last.ergodic_eps_lhs / last.ergodic_eps_rhs)
            if last and last.ergodic_eps_rhs > 0
            else ""
        )
        failure = report.first_failure
        rows.append(
            [
                repr(alpha),
                str(summary["iterations"]),
                str(summary["stopped_early"]).lower(),
                repr(summary["final_kkt_gap"]),
                pw,
                r_ratio,
                e_ratio,
                "pass" if report.passed else "fail",
                "" if failure is None else f"{failure.name}@k={failure.worst_k}",
            ]
        )
    out_path = os.path.join(args.out, "bench.csv")
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_BENCH_COLUMNS)
            writer.writerows(rows)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    print(f"wrote {len(rows)}-row sweep to {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gadmm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a random instance")
    gen.add_argument("--kind", choices=("qp", "lasso"), required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, default=8)
    gen.add_argument("--p", type=int, default=6, help="qp only")
    gen.add_argument("--m", type=int, default=4, help="qp only")
    gen.add_argument("--m-data", type=int, default=20, help="lasso only")
    gen.add_argument("--mu", type=float, default=0.1, help="lasso only")
    gen.add_argument("--out", required=True, help="instance JSON path")
    gen.set_defaults(func=_cmd_generate)

    run_p = sub.add_parser("run", help="run the solver on an instance")
    run_p.add_argument("--instance", required=True)
    _add_solver_flags(run_p)
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.set_defaults(func=_cmd_run)

    ver = sub.add_parser("verify", help="verify a recorded trajectory")
    ver.add_argument("--instance", required=True)
    ver.add_argument("--trajectory", required=True, help="trajectory CSV from 'run'")
    _add_solver_flags(ver)
    ver.add_argument("--out", help="verification report JSON path")
    ver.add_argument(
        "--verify-full",
        action="store_true",
        help="evaluate ergodic checks at every k instead of the power-of-two grid",
    )
    ver.set_defaults(func=_cmd_verify)

    bench = sub.add_parser("bench", help="sweep the relaxation factor")
    bench.add_argument("--instance", required=True)
    bench.add_argument("--alpha-grid", required=True, help="comma-separated alphas")
    _add_solver_flags(bench)
    bench.add_argument("--out", required=True, help="output directory")
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotPositiveDefiniteError, IterationLimitError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except CertificationError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
