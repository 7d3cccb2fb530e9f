"""Numerical health checks for sampled Pareto data.

Includes the closed-form solution path of a small non-smooth benchmark (two
shifted quadratic-plus-kink objectives on the line), a Hoelder-type distance
bound over weight pairs, a pairwise weak-dominance scan, and the per-point
subgradient optimality certificate for the scalarized solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elasticnet import (
    ElasticNetProblem,
    ParetoSample,
    SolverConfig,
    DEFAULT_CONFIG,
    scalarization_coefficients,
    solve_scalarized,
)
from .simplex import WeightVector


# -- 1-D benchmark: f1 = x^2 + |x|, f2 = (x-1)^2 + |x-1| ---------------------

def remark_objectives(x: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
    """The two benchmark objectives, vectorized over x."""
    xv = np.asarray(x, dtype=float)
    f1 = xv * xv + np.abs(xv)
    f2 = (xv - 1.0) ** 2 + np.abs(xv - 1.0)
    return f1, f2


def remark_solution_path(w1: float) -> float:
    """Closed-form minimizer of w1*f1 + (1-w1)*f2 for the 1-D benchmark.

    The path is constant 1 for w1 < 1/4, descends linearly as (3 - 4*w1)/2 on
    [1/4, 3/4], and is constant 0 beyond: distinct weights can share their
    minimizer, so the weight-to-solution map need not be injective.
    """
    w = float(w1)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"w1 must lie in [0, 1], got {w!r}")
    if w < 0.25:
        return 1.0
    if w <= 0.75:
        return (3.0 - 4.0 * w) / 2.0
    return 0.0


def brute_force_path_1d(w1: float, lo: float = -1.0, hi: float = 2.0,
                        num: int = 1_000_000) -> float:
    """Independent grid-search minimizer of w1*f1 + (1-w1)*f2 on [lo, hi].

    Evaluates the scalarized benchmark objective on ``num`` equispaced points
    and returns the argmin; accuracy is limited by the grid spacing.
    """
    if not 0.0 <= w1 <= 1.0:
        raise ValueError(f"w1 must lie in [0, 1], got {w1!r}")
    xs = np.linspace(lo, hi, num)
    f1, f2 = remark_objectives(xs)
    return float(xs[np.argmin(w1 * f1 + (1.0 - w1) * f2)])


# -- Hoelder-type bound over weight pairs -------------------------------------

@dataclass
class HoelderReport:
    """Worst slack of ||x(w) - x(w')|| <= sqrt(K0/alpha0 * sum|w - w'|) over pairs."""

    max_violation: float
    worst_pair: tuple[int, int]
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= 0.0


def check_hoelder_bound(weights: np.ndarray, points: np.ndarray,
                        alpha0: float, k0: float) -> HoelderReport:
    """Check the square-root distance bound for all pairs of sampled solutions.

    ``weights`` is (N, m) and ``points`` (N, n); ``alpha0`` is a lower bound on
    the objectives' strong-convexity parameters and ``k0`` an upper bound on
    each objective's variation over the solution set. The report carries the
    maximum of lhs - rhs; a positive value is an observation, not an error.
    """
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if W.shape[0] != P.shape[0]:
        raise ValueError("weights and points must have matching row counts")
    if W.shape[0] < 2:
        raise ValueError("need at least two points to compare")
    if not (alpha0 > 0.0 and k0 > 0.0):
        raise ValueError("alpha0 and k0 must be positive")

    lhs = np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(axis=2))
    l1w = np.abs(W[:, None, :] - W[None, :, :]).sum(axis=2)
    rhs = np.sqrt((k0 / alpha0) * l1w)
    slack = lhs - rhs
    np.fill_diagonal(slack, -np.inf)
    flat = int(np.argmax(slack))
    i, j = divmod(flat, slack.shape[1])
    return HoelderReport(
        max_violation=float(slack[i, j]),
        worst_pair=(i, j),
        lhs=float(lhs[i, j]),
        rhs=float(rhs[i, j]),
    )


# -- weak dominance scan -------------------------------------------------------

@dataclass
class DominanceReport:
    """Pairs (dominated, dominator) where one record beats another in every loss."""

    violations: list[tuple[int, int]]

    @property
    def passed(self) -> bool:
        return not self.violations


def check_weak_dominance(sample: ParetoSample | np.ndarray, tol: float = 0.0) -> DominanceReport:
    """Find records strictly improved upon in all three losses by another record.

    Every solver output should be Pareto-optimal, so any pair where record s
    improves every loss of record r by more than ``tol`` indicates a solver
    failure at r.
    """
    if tol < 0.0:
        raise ValueError("tol must be non-negative")
    L = sample.losses if isinstance(sample, ParetoSample) else np.asarray(sample, dtype=float)
    N = L.shape[0]
    violations: list[tuple[int, int]] = []
    for r in range(N):
        better = np.all(L < L[r] - tol, axis=1)
        for s in np.nonzero(better)[0]:
            violations.append((r, int(s)))
    return DominanceReport(violations=violations)


# -- subgradient certificate ---------------------------------------------------

@dataclass
class CertificateReport:
    """Per-coordinate stationarity residuals of a scalarized solution."""

    residuals: np.ndarray
    max_residual: float

    def passed(self, threshold: float) -> bool:
        return self.max_residual <= threshold


def subgradient_certificate(problem: ElasticNetProblem, w: WeightVector | tuple,
                            theta: np.ndarray) -> CertificateReport:
    """Measure how far theta is from satisfying the first-order conditions.

    With g = a * X^T (X theta - y) / m_obs + c * theta, optimality demands
    g_j = -b * sign(theta_j) on nonzero coordinates and |g_j| <= b on zero
    ones; the residual is the absolute violation per coordinate.
    """
    a, b, c = scalarization_coefficients(w, problem.epsilon)
    t = np.asarray(theta, dtype=float)
    g = a * problem.X.T @ (problem.X @ t - problem.y) / problem.n_observations + c * t
    res = np.where(t != 0.0, np.abs(g + b * np.sign(t)), np.maximum(np.abs(g) - b, 0.0))
    return CertificateReport(residuals=res, max_residual=float(res.max(initial=0.0)))


def restart_spread(problem: ElasticNetProblem, w: WeightVector | tuple,
                   config: SolverConfig = DEFAULT_CONFIG, n_starts: int = 10,
                   seed: int | None = None, scale: float = 1.0) -> float:
    """Max pairwise distance among solutions from randomized starts.

    The scalarized problem has a unique minimizer, so the spread should stay
    within a small multiple of the solver tolerance.
    """
    rng = np.random.default_rng(config.seed if seed is None else seed)
    solutions = [solve_scalarized(problem, w, config)]
    for _ in range(n_starts - 1):
        theta0 = rng.normal(scale=scale, size=problem.n_predictors)
        solutions.append(solve_scalarized(problem, w, config, theta0=theta0))
    S = np.array(solutions)
    return float(np.sqrt(((S[:, None, :] - S[None, :, :]) ** 2).sum(axis=2)).max())


# -- continuity smoke test -------------------------------------------------------

@dataclass
class ContinuityReport:
    """Largest neighbor jump against the Hoelder bound on grid-adjacent weights."""

    max_slack: float
    worst_pair: tuple[int, int]
    n_pairs: int
    k0_estimate: float

    @property
    def passed(self) -> bool:
        return self.max_slack <= 0.0


def check_continuity(sample: ParetoSample, resolution: int,
                     alpha0: float | None = None, inflation: float = 2.0) -> ContinuityReport:
    """Compare theta jumps between lattice-adjacent weights with the bound.

    K0 is estimated from the sampled losses (their per-objective range) and
    inflated, since a finite sample can only underestimate the true variation;
    alpha0 defaults to the perturbation epsilon, the guaranteed lower bound on
    the strong-convexity parameters.
    """
    if alpha0 is None:
        alpha0 = sample.meta.epsilon
    ranges = sample.losses.max(axis=0) - sample.losses.min(axis=0)
    k0 = inflation * float(ranges.max(initial=0.0))
    if k0 <= 0.0:
        k0 = inflation

    key_to_row = {tuple(k): i for i, k in
                  enumerate(np.rint(sample.weights * resolution).astype(int).tolist())}
    max_slack = -np.inf
    worst = (0, 0)
    n_pairs = 0
    for key, i in key_to_row.items():
        for p in range(3):
            for q in range(3):
                if p == q or key[p] == 0:
                    continue
                nb = list(key)
                nb[p] -= 1
                nb[q] += 1
                j = key_to_row.get(tuple(nb))
                if j is None or j <= i:
                    continue
                n_pairs += 1
                lhs = float(np.linalg.norm(sample.thetas[i] - sample.thetas[j]))
                l1w = float(np.abs(sample.weights[i] - sample.weights[j]).sum())
                rhs = float(np.sqrt(k0 / alpha0 * l1w))
                if lhs - rhs > max_slack:
                    max_slack = lhs - rhs
                    worst = (i, j)
    return ContinuityReport(max_slack=float(max_slack), worst_pair=worst,
                            n_pairs=n_pairs, k0_estimate=k0)
