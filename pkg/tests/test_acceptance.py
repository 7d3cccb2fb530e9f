"""Acceptance suite: one test per release criterion, each printing a
pass/fail line (run with ``pytest tests/test_acceptance.py -s``)."""

import subprocess
import sys
import time

import numpy as np
import pytest

from paretobez.bezier import (
    degree_sweep,
    evaluate,
    evaluate_many,
    fit_all_at_once,
    mse,
    restrict_to_face,
)
from paretobez.dataio import example1_problem, make_synthetic
from paretobez.diagnostics import (
    check_weak_dominance,
    remark_objectives,
    remark_solution_path,
    restart_spread,
    subgradient_certificate,
)
from paretobez.elasticnet import (
    SolverConfig,
    hyperparams_to_weight,
    sample_pareto,
    solve_scalarized,
    weight_to_hyperparams,
)
from paretobez.simplex import (
    bernstein_design,
    embed_face,
    exponent_matrix,
    grid_array,
    grid_points,
    multi_index_count,
)
from paretobez.bezier import BezierSimplexModel

RUN = [sys.executable, "-m", "paretobez"]
EPS = 1e-6


def report(name: str, passed: bool, detail: str = "") -> None:
    tag = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{tag}] {name}{suffix}")
    assert passed, f"{name}{suffix}"


def test_remark_oracle_brute_force_agreement():
    started = time.perf_counter()
    xs = np.linspace(-1.0, 2.0, 1_000_000)
    f1, f2 = remark_objectives(xs)
    w1s = np.arange(101) / 100.0
    worst = 0.0
    for w1 in w1s:
        brute = xs[np.argmin(w1 * f1 + (1.0 - w1) * f2)]
        worst = max(worst, abs(brute - remark_solution_path(w1)))
    elapsed = time.perf_counter() - started
    report("remark oracle: brute-force grid vs closed form (2e-6, <10s)",
           worst <= 2e-6 and elapsed < 10.0,
           f"max err {worst:.2e}, {elapsed:.1f}s")


def test_hoelder_bound_on_remark_path():
    w1s = np.arange(101) / 100.0
    path = np.array([remark_solution_path(w) for w in w1s])
    lhs = np.abs(path[:, None] - path[None, :])
    l1w = 2.0 * np.abs(w1s[:, None] - w1s[None, :])
    rhs = np.sqrt((2.0 / 2.0) * l1w)
    max_violation = float((lhs - rhs).max())
    equality_slack = abs(lhs[25, 75] - rhs[25, 75])
    ok = max_violation <= 1e-12 and equality_slack <= 1e-12 and lhs[25, 75] == 1.0
    report("hoelder bound: all 101x101 pairs, equality at (1/4, 3/4) (1e-12)",
           ok, f"max violation {max_violation:.2e}, equality slack {equality_slack:.2e}")


def test_conversion_round_trip_on_grid():
    W = grid_array(3, 100)
    W = W[W[:, 0] > 0.0]
    assert W.shape[0] == 5050
    worst = 0.0
    validity_ok = True
    for row in W:
        h = weight_to_hyperparams(tuple(row), EPS)
        if h.mu * EPS > (h.lam - EPS) + 1e-12:
            validity_ok = False
        back = hyperparams_to_weight(h, EPS)  # raises if outside the validity region
        worst = max(worst, float(np.abs(np.array(back.components) - row).max()))
    report("conversion round trip: 5050 weights within 1e-9, validity holds",
           worst <= 1e-9 and validity_ok, f"max err {worst:.2e}")


def test_solver_certificates_on_example1_grid():
    started = time.perf_counter()
    problem = example1_problem(EPS)
    config = SolverConfig()
    grid = grid_points(3, 10)
    assert len(grid) == 66
    sample = sample_pareto(problem, grid, config, dataset="example1", resolution=10)

    worst_cert = 0.0
    for k in range(len(sample)):
        cert = subgradient_certificate(problem, tuple(sample.weights[k]), sample.thetas[k])
        worst_cert = max(worst_cert, cert.max_residual)
    certs_ok = worst_cert <= 10.0 * config.tolerance

    worst_spread = 0.0
    for w in grid:
        spread = restart_spread(problem, w, config, n_starts=10, seed=17)
        worst_spread = max(worst_spread, spread)
    spread_ok = worst_spread <= 100.0 * config.tolerance

    dom = check_weak_dominance(sample, tol=1e-7)
    elapsed = time.perf_counter() - started
    report("solver certificates: 66 weights, 10x cert, 100x restarts, dominance (<30s)",
           certs_ok and spread_ok and dom.passed and elapsed < 30.0,
           f"cert {worst_cert:.2e}, spread {worst_spread:.2e}, "
           f"{len(dom.violations)} dominated, {elapsed:.1f}s")


def test_ridge_closed_form_on_example1():
    worst = 0.0
    for eps in (1e-2, 1e-4, 1e-6):
        problem = example1_problem(eps)
        theta = solve_scalarized(problem, (1.0, 0.0, 0.0))
        A = problem.X.T @ problem.X / problem.n_observations + eps * np.eye(3)
        oracle = np.linalg.solve(A, problem.X.T @ problem.y / problem.n_observations)
        worst = max(worst, float(np.abs(theta - oracle).max()))
    report("ridge closed form: eps in {1e-2,1e-4,1e-6} within 1e-6 per coefficient",
           worst <= 1e-6, f"max err {worst:.2e}")


def test_bernstein_suite():
    rng = np.random.default_rng(123)
    worst_partition = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 5))
        d = int(rng.integers(0, 31))
        raw = rng.random(m) + 1e-9
        w = raw / raw.sum()
        B = bernstein_design(d, w[None, :])
        worst_partition = max(worst_partition, abs(float(B.sum()) - 1.0))
        if B.min() < 0.0:
            worst_partition = np.inf
    partition_ok = worst_partition <= 1e-12

    corners_ok = True
    for trial in range(20):
        m = int(rng.integers(2, 5))
        d = int(rng.integers(1, 8))
        count = multi_index_count(m, d)
        model = BezierSimplexModel(m=m, degree=d,
                                   control_points=rng.normal(size=(count, 3)))
        for k in range(m):
            w = tuple(1.0 if j == k else 0.0 for j in range(m))
            value = evaluate(model, w)
            # the pure-k corner index (d * e_k) sits where all mass is on slot k
            row = next(r for r, exps in enumerate(exponent_matrix(m, d).tolist())
                       if exps[k] == d)
            if not np.array_equal(value, model.control_points[row]):
                corners_ok = False

    worst_face = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 5))
        d = int(rng.integers(1, 7))
        count = multi_index_count(m, d)
        model = BezierSimplexModel(m=m, degree=d,
                                   control_points=rng.normal(size=(count, 2)))
        size = int(rng.integers(1, m + 1))
        members = tuple(sorted(rng.choice(np.arange(1, m + 1), size=size, replace=False).tolist()))
        sub = restrict_to_face(model, members)
        raw = rng.random(size) + 1e-9
        w_face = tuple(raw / raw.sum())
        diff = np.abs(evaluate(sub, w_face) -
                      evaluate(model, embed_face(members, w_face, m))).max()
        worst_face = max(worst_face, float(diff))
    face_ok = worst_face <= 1e-12

    report("bernstein suite: partition of unity, exact corners, face restriction",
           partition_ok and corners_ok and face_ok,
           f"partition {worst_partition:.2e}, faces {worst_face:.2e}")


def test_exact_recovery_of_degree3_model():
    rng = np.random.default_rng(99)
    truth = BezierSimplexModel(
        m=3, degree=3, control_points=rng.normal(size=(multi_index_count(3, 3), 5)))
    W = grid_array(3, 19)[:200]
    T = evaluate_many(truth, W)
    fit = fit_all_at_once(W, T, degree=3)
    rel = mse(fit.model, W, T) / float((T * T).mean())
    report("exact recovery: degree-3 data refit at degree 3, relative MSE <= 1e-16",
           rel <= 1e-16, f"relative mse {rel:.2e}")


@pytest.mark.slow
def test_degree_sweep_trend_on_synthetic_problem():
    started = time.perf_counter()
    problem = make_synthetic(n_predictors=6, n_observations=500, seed=0, epsilon=EPS)
    sample = sample_pareto(problem, grid_points(3, 100), SolverConfig(),
                           dataset="synthetic", resolution=100)
    W, T = sample.training_data()
    result = degree_sweep(W, T, degrees=list(range(1, 9)), train_counts=[51],
                          trials=10, base_seed=11)
    by_degree = {s.degree: s for s in result.summaries}
    train_means = [by_degree[d].mean_train_mse for d in range(1, 9)]
    monotone = all(b <= a + 1e-12 for a, b in zip(train_means, train_means[1:]))
    best = result.best_degree[51]
    improves = by_degree[best].mean_test_mse <= by_degree[1].mean_test_mse
    elapsed = time.perf_counter() - started
    report("scaled sweep trend: train MSE non-increasing, best degree beats d=1 (<10min)",
           monotone and improves and elapsed < 600.0,
           f"best d*={best}, test {by_degree[best].mean_test_mse:.3e} "
           f"vs d=1 {by_degree[1].mean_test_mse:.3e}, {elapsed:.0f}s")


def test_cli_determinism_and_thread_independence(tmp_path):
    outputs = []
    for name, threads in [("r1.csv", "1"), ("r2.csv", "1"), ("r4.csv", "4")]:
        out = tmp_path / name
        run = subprocess.run([*RUN, "sample", "--builtin", "example1",
                              "--resolution", "10", "--epsilon", "1e-6",
                              "--threads", threads, "--output", str(out)],
                             capture_output=True, text=True)
        assert run.returncode == 0, run.stderr
        outputs.append(out.read_bytes() + out.with_suffix(".meta.json").read_bytes())
    sample_ok = outputs[0] == outputs[1] == outputs[2]

    sweeps = []
    for name in ("w1.csv", "w2.csv"):
        out = tmp_path / name
        run = subprocess.run([*RUN, "sweep", str(tmp_path / "r1.csv"),
                              "--degrees", "1,2,3", "--train-counts", "20",
                              "--trials", "3", "--seed", "5", "--output", str(out)],
                             capture_output=True, text=True)
        assert run.returncode == 0, run.stderr
        sweeps.append(out.read_bytes())
    sweep_ok = sweeps[0] == sweeps[1]

    report("determinism: sample and sweep outputs byte-identical across reruns/threads",
           sample_ok and sweep_ok)
