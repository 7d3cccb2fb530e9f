import numpy as np
import pytest

from paretobez.dataio import example1_problem
from paretobez.diagnostics import (
    brute_force_path_1d,
    check_continuity,
    check_hoelder_bound,
    check_weak_dominance,
    remark_objectives,
    remark_solution_path,
    restart_spread,
    subgradient_certificate,
)
from paretobez.elasticnet import SolverConfig, sample_pareto, solve_scalarized
from paretobez.simplex import grid_points

EPS = 1e-6


class TestRemarkPath:
    def test_piecewise_values(self):
        assert remark_solution_path(0.0) == 1.0
        assert remark_solution_path(0.5) == 0.5
        assert remark_solution_path(0.9) == 0.0

    def test_branch_boundaries(self):
        assert remark_solution_path(0.25) == 1.0
        assert remark_solution_path(0.75) == 0.0

    def test_domain_rejected(self):
        with pytest.raises(ValueError):
            remark_solution_path(-0.01)
        with pytest.raises(ValueError):
            remark_solution_path(1.01)

    def test_objectives_shape(self):
        f1, f2 = remark_objectives(np.array([0.0, 1.0]))
        assert np.array_equal(f1, [0.0, 2.0])
        assert np.array_equal(f2, [2.0, 0.0])

    def test_against_brute_force_grid(self):
        # independent oracle: argmin over 1e6 equispaced points on [-1, 2]
        for w1 in np.linspace(0.0, 1.0, 11):
            assert abs(brute_force_path_1d(w1) - remark_solution_path(w1)) <= 2e-6


class TestHoelderBound:
    def test_equality_pair(self):
        # between w1 = 1/4 and w1 = 3/4 the path moves by exactly 1 while the
        # bound is sqrt((2/2) * (2 * 1/2)) = 1: equality, zero violation
        weights = np.array([[0.25, 0.75], [0.75, 0.25]])
        points = np.array([[1.0], [0.0]])
        report = check_hoelder_bound(weights, points, alpha0=2.0, k0=2.0)
        assert report.lhs == 1.0
        assert report.rhs == 1.0
        assert abs(report.max_violation) <= 1e-15

    def test_identical_weights_zero_both_sides(self):
        weights = np.array([[0.5, 0.5], [0.5, 0.5]])
        points = np.array([[0.3], [0.3]])
        report = check_hoelder_bound(weights, points, alpha0=2.0, k0=2.0)
        assert report.lhs == 0.0 and report.rhs == 0.0

    def test_dense_remark_grid_all_pairs(self):
        w1s = np.linspace(0.0, 1.0, 101)
        weights = np.column_stack([w1s, 1.0 - w1s])
        points = np.array([[remark_solution_path(w)] for w in w1s])
        report = check_hoelder_bound(weights, points, alpha0=2.0, k0=2.0)
        assert report.max_violation <= 1e-12
        assert report.passed

    def test_positive_violation_is_reported_not_raised(self):
        weights = np.array([[1.0, 0.0], [0.0, 1.0]])
        points = np.array([[0.0], [10.0]])
        report = check_hoelder_bound(weights, points, alpha0=2.0, k0=2.0)
        assert report.max_violation > 0.0
        assert not report.passed

    def test_input_validation(self):
        with pytest.raises(ValueError):
            check_hoelder_bound(np.ones((1, 2)), np.ones((1, 1)), 2.0, 2.0)
        with pytest.raises(ValueError):
            check_hoelder_bound(np.ones((2, 2)), np.ones((2, 1)), 0.0, 2.0)


class TestWeakDominance:
    def test_single_record_empty(self):
        losses = np.array([[1.0, 2.0, 3.0]])
        assert check_weak_dominance(losses, tol=0.0).violations == []

    def test_corrupted_record_flagged(self):
        prob = example1_problem(EPS)
        sample = sample_pareto(prob, grid_points(3, 5))
        sample.losses[7] += 1.0  # strictly worse than some other record everywhere
        report = check_weak_dominance(sample, tol=1e-7)
        assert any(r == 7 for r, _ in report.violations)

    def test_converged_sample_clean(self):
        prob = example1_problem(EPS)
        sample = sample_pareto(prob, grid_points(3, 20))
        report = check_weak_dominance(sample, tol=1e-7)
        assert report.passed

    def test_tol_must_be_nonnegative(self):
        with pytest.raises(ValueError):
            check_weak_dominance(np.ones((2, 3)), tol=-1.0)


class TestCertificate:
    def test_solver_output_passes(self):
        prob = example1_problem(EPS)
        config = SolverConfig()
        for w in grid_points(3, 5):
            if w[0] == 0.0:
                continue
            theta = solve_scalarized(prob, w, config)
            cert = subgradient_certificate(prob, w.components, theta)
            assert cert.passed(10 * config.tolerance)

    def test_arbitrary_point_fails(self):
        prob = example1_problem(EPS)
        cert = subgradient_certificate(prob, (0.5, 0.25, 0.25), np.array([1.0, -1.0, 2.0]))
        assert cert.max_residual > 1e-3

    def test_residual_shape(self):
        prob = example1_problem(EPS)
        cert = subgradient_certificate(prob, (1.0, 0.0, 0.0), np.zeros(3))
        assert cert.residuals.shape == (3,)


class TestRestartSpread:
    def test_small_on_example1(self):
        prob = example1_problem(EPS)
        config = SolverConfig()
        for w in [(1.0, 0.0, 0.0), (0.5, 0.5, 0.0), (0.2, 0.3, 0.5)]:
            assert restart_spread(prob, w, config, n_starts=5, seed=3) <= \
                100 * config.tolerance


class TestContinuity:
    def test_example1_grid_within_bound(self):
        prob = example1_problem(EPS)
        sample = sample_pareto(prob, grid_points(3, 10))
        report = check_continuity(sample, resolution=10)
        assert report.n_pairs > 0
        assert report.passed

    def test_detects_artificial_jump(self):
        prob = example1_problem(EPS)
        sample = sample_pareto(prob, grid_points(3, 10))
        sample.thetas[30] += 1e6  # absurd jump between lattice neighbors
        report = check_continuity(sample, resolution=10)
        assert not report.passed
