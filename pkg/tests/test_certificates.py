import math

import numpy as np
import pytest

from gadmm import certificates, hpe, problems, solver
from gadmm.certificates import (
    bound_constants,
    bound_report,
    checked_iterations,
    epsilon_split_identity,
    ergodic_certificate,
    ergodic_point,
    full_verification,
    pointwise_certificate,
    rate_estimate,
)
from gadmm.solver import GadmmParams, LinearizedH

from conftest import run_full


class TestBoundConstants:
    def test_alpha_one(self):
        sig, c, ct = bound_constants(1.0)
        assert sig == pytest.approx(0.5)
        assert c == pytest.approx(3.0)
        assert ct == pytest.approx(40.5)

    def test_alpha_two(self):
        sig, c, ct = bound_constants(2.0)
        assert sig == pytest.approx(1.0)
        assert c == pytest.approx(1.0)
        assert ct == pytest.approx(12.0)

    def test_pointwise_factor_alpha_one(self):
        # 2[alpha(1+sigma) + 8(2-alpha)sigma] / (alpha(1-sigma)) = 22 at alpha=1
        assert certificates.pointwise_constant(1.0, 1.0) == pytest.approx(math.sqrt(22.0))

    def test_pointwise_factor_rejects_alpha_two(self):
        with pytest.raises(ValueError):
            certificates.pointwise_constant(2.0, 1.0)


class TestCheckedIterations:
    def test_log_grid(self):
        assert checked_iterations(10) == [1, 2, 4, 8, 10]
        assert checked_iterations(8) == [1, 2, 4, 8]
        assert checked_iterations(1) == [1]

    def test_full(self):
        assert checked_iterations(5, full=True) == [1, 2, 3, 4, 5]

    def test_empty(self):
        assert checked_iterations(0) == []


class TestErgodicPoint:
    def test_k_one_is_first_iterate(self, one_d_instance):
        traj = run_full(one_d_instance, alpha=1.0, iters=5)
        pt = ergodic_point(traj, 1)
        st = traj.states[1]
        assert np.allclose(pt.x_avg, st.x)
        assert np.allclose(pt.y_avg, st.y)
        assert np.allclose(pt.gamma_tilde_avg, st.gamma_tilde)
        assert pt.eps_x == pytest.approx(0.0, abs=1e-15)
        assert pt.eps_y == pytest.approx(0.0, abs=1e-15)

    def test_residual_average_telescopes(self):
        inst = problems.generate_qp(1, 4, 3, 2)
        traj = run_full(inst, alpha=1.5, beta=1.1, iters=50)
        for k in (1, 7, 50):
            pt = ergodic_point(traj, k)
            dsum = np.zeros(inst.n)
            for st in traj.states[1 : k + 1]:
                dsum += st.dx
            assert np.allclose(pt.r_x, dsum / k, atol=1e-12)
            z0, zk = traj.states[0], traj.states[k]
            assert np.allclose(pt.r_gamma, (zk.gamma - z0.gamma) / k, atol=1e-15)

    def test_hand_cross_check_k_two(self, one_d_instance):
        # oracle: direct evaluation of the two-term averaged sums with the
        # metric assembled explicitly (diag(0, 1, 1) for this instance)
        traj = run_full(one_d_instance, alpha=1.0, iters=2)
        s1, s2 = traj.states[1], traj.states[2]
        M = np.diag([0.0, 1.0, 1.0])
        x_avg = (s1.x + s2.x) / 2
        y_avg = (s1.y + s2.y) / 2
        gt_avg = (s1.gamma_tilde + s2.gamma_tilde) / 2
        ztil_avg = np.concatenate([x_avg, y_avg, gt_avg])
        eps_metric = 0.0
        for st in (s1, s2):
            dz = np.concatenate([st.dx, st.dy, st.dgamma])
            ztil = np.concatenate([st.x, st.y, st.gamma_tilde])
            eps_metric += float((M @ dz) @ (ztil_avg - ztil))
        eps_metric /= 2.0
        pt = ergodic_point(traj, 2)
        assert np.allclose(pt.x_avg, x_avg)
        assert pt.eps_x + pt.eps_y == pytest.approx(eps_metric, abs=1e-12)
        assert epsilon_split_identity(traj, 2) <= 1e-12

    def test_k_out_of_range(self, one_d_instance):
        traj = run_full(one_d_instance, alpha=1.0, iters=3)
        with pytest.raises(ValueError):
            ergodic_point(traj, 0)
        with pytest.raises(ValueError):
            ergodic_point(traj, 4)


class TestEpsilonSplit:
    def test_k_one_both_sides_zero(self, one_d_instance):
        traj = run_full(one_d_instance, alpha=1.0, iters=1)
        assert epsilon_split_identity(traj, 1) <= 1e-15

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
    def test_random_qp_relative(self, alpha):
        inst = problems.generate_qp(2, 5, 4, 3)
        traj = run_full(inst, alpha=alpha, beta=0.9, iters=120)
        metric = hpe.metric_for(traj)
        pre = certificates._Precomp(traj, metric)
        for k in checked_iterations(120):
            pt = certificates._ergodic_at(pre, k)
            eps_m = certificates._metric_eps_at(pre, pt)
            resid = abs(eps_m - (pt.eps_x + pt.eps_y))
            assert resid <= 1e-8 * (1.0 + abs(eps_m))


class TestPointwise:
    def test_bound_holds_random_qp(self):
        inst = problems.generate_qp(1, 5, 4, 3)
        for alpha in (0.5, 1.0, 1.5, 1.9):
            traj = run_full(inst, alpha=alpha, beta=1.0, iters=400)
            running_min, rhs = pointwise_certificate(traj, inst.solution)
            assert np.all(running_min <= rhs + 1e-7 * (1.0 + rhs))

    def test_alpha_two_rejected(self):
        inst = problems.generate_qp(1, 4, 3, 2)
        traj = run_full(inst, alpha=2.0, beta=1.0, iters=10)
        with pytest.raises(ValueError, match="alpha = 2"):
            pointwise_certificate(traj, inst.solution)

    def test_start_at_solution(self):
        inst = problems.generate_qp(3, 4, 3, 2)
        sol = inst.solution
        params = GadmmParams(beta=1.0, alpha=1.0, max_iter=5, stop_tol=0.0)
        traj = solver.run(inst, params, x0=sol.x, y0=sol.y, gamma0=sol.gamma)
        running_min, rhs = pointwise_certificate(traj, sol)
        assert np.all(running_min <= 1e-9)
        assert np.all(rhs <= 1e-6)  # d0 = 0 makes the bound collapse too


class TestErgodicCertificate:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
    def test_random_qp(self, alpha):
        inst = problems.generate_qp(4, 5, 4, 3)
        traj = run_full(inst, alpha=alpha, beta=1.2, iters=300)
        checks = ergodic_certificate(traj, inst.solution)
        assert checks[-1].point.k == 300

    def test_lasso_linearized_alpha_two(self):
        # the headline configuration: relaxation at its extreme value with
        # both blocks linearized
        inst = problems.generate_lasso(7, 8, 16, 0.2)
        traj = run_full(
            inst, alpha=2.0, beta=1.0, iters=600, h1=LinearizedH(), h2=LinearizedH()
        )
        checks = ergodic_certificate(traj, inst.solution)
        for chk in checks:
            assert chk.r_lhs <= chk.r_rhs + 1e-7 * (1.0 + chk.r_rhs)
            eps_sum = chk.point.eps_x + chk.point.eps_y
            assert eps_sum <= chk.eps_rhs + 1e-7 * (1.0 + chk.eps_rhs)

    def test_eps_nonnegative(self):
        inst = problems.generate_qp(5, 4, 4, 2)
        for alpha in (0.5, 1.0, 1.5, 2.0):
            traj = run_full(inst, alpha=alpha, beta=0.8, iters=200)
            for chk in ergodic_certificate(traj, inst.solution):
                assert chk.point.eps_x >= -1e-7 * (1.0 + abs(chk.point.eps_x))
                assert chk.point.eps_y >= -1e-7 * (1.0 + abs(chk.point.eps_y))

    def test_full_grid_mode(self):
        inst = problems.generate_qp(6, 4, 3, 2)
        traj = run_full(inst, alpha=1.0, beta=1.0, iters=40)
        checks = ergodic_certificate(traj, inst.solution, full_grid=True)
        assert [c.point.k for c in checks] == list(range(1, 41))


class TestRateEstimate:
    def test_one_over_k(self):
        pts = [(k, 1.0 / k) for k in range(1, 101)]
        assert rate_estimate(pts) == pytest.approx(-1.0, abs=1e-10)

    def test_one_over_sqrt_k(self):
        pts = [(k, 1.0 / math.sqrt(k)) for k in range(1, 101)]
        assert rate_estimate(pts) == pytest.approx(-0.5, abs=1e-10)

    def test_too_few_points(self):
        with pytest.raises(ValueError, match="10"):
            rate_estimate([(k, 1.0 / k) for k in range(1, 9)])

    def test_nonpositive_values(self):
        pts = [(k, 1.0 / k) for k in range(1, 20)] + [(20, 0.0)]
        with pytest.raises(ValueError, match="positive"):
            rate_estimate(pts)


class TestReports:
    def test_bound_report_csv(self, tmp_path):
        inst = problems.generate_qp(7, 4, 3, 2)
        traj = run_full(inst, alpha=1.5, beta=1.0, iters=64)
        report = bound_report(traj, inst.solution)
        path = tmp_path / "bounds.csv"
        certificates.save_bound_report_csv(report, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0].split(",") == certificates.BOUND_CSV_COLUMNS
        assert len(lines) == 1 + len(checked_iterations(64))
        assert report.c_alpha == pytest.approx(bound_constants(1.5)[1])

    def test_bound_report_alpha_two_leaves_pointwise_empty(self, tmp_path):
        inst = problems.generate_qp(7, 4, 3, 2)
        traj = run_full(inst, alpha=2.0, beta=1.0, iters=16)
        report = bound_report(traj, inst.solution)
        assert report.pointwise_factor is None
        assert all(math.isnan(r.pointwise_lhs) for r in report.rows)
        path = tmp_path / "bounds.csv"
        certificates.save_bound_report_csv(report, path)
        first_data = path.read_text().strip().splitlines()[1].split(",")
        assert first_data[1] == "" and first_data[2] == ""

    def test_full_verification_passes(self):
        inst = problems.generate_qp(8, 5, 4, 3)
        for alpha in (1.0, 2.0):
            traj = run_full(inst, alpha=alpha, beta=1.0, iters=150)
            report = full_verification(traj, inst.solution)
            assert report.passed, report.first_failure
            names = {r.name for r in report.rows}
            assert "hpe_inequality" in names
            assert "rho_bound" in names
            assert "pointwise_bound" in names
            assert "ergodic_eps_bound" in names
            assert "eps_split_identity" in names

    def test_full_verification_alpha_two_marks_pointwise(self):
        inst = problems.generate_qp(8, 4, 3, 2)
        traj = run_full(inst, alpha=2.0, beta=1.0, iters=20)
        report = full_verification(traj, inst.solution)
        row = next(r for r in report.rows if r.name == "pointwise_bound")
        assert row.passed and row.note == "not-applicable at alpha=2"

    def test_full_verification_catches_corruption(self):
        inst = problems.generate_qp(9, 4, 3, 2)
        traj = run_full(inst, alpha=1.0, beta=1.0, iters=30)
        st = traj.states[10]
        traj.states[10] = solver.IterateState(
            k=st.k,
            x=st.x,
            y=st.y,
            gamma=st.gamma,
            gamma_tilde=st.gamma_tilde + 0.25,
            dx=st.dx,
            dy=st.dy,
            dgamma=st.dgamma,
        )
        report = full_verification(traj, inst.solution)
        assert not report.passed
        assert report.first_failure.worst_k == 10
