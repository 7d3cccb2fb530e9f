"""Three-objective elastic net: objectives, weight conversions, scalarized solver.

The vector objective splits the elastic net into data fit, L1 and L2 terms

    f1 = ||X theta - y||^2 / (2 m_obs),   f2 = ||theta||_1,   f3 = ||theta||^2 / 2,

then perturbs each by ``epsilon * f3`` so all three become strongly convex.
Minimizing the weighted sum over a barycentric weight w traces the whole
Pareto set as w sweeps the 2-simplex; faces of the simplex recover OLS, lasso
and ridge limits. ``sample_pareto`` evaluates this map on a grid of weights.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Literal, NamedTuple, Sequence

import numpy as np

from .simplex import WeightVector, as_weight

N_OBJECTIVES = 3

#: Grid points per warm-start block. Blocks are cold-started, so the sampled
#: output is independent of how many workers process them.
WARM_START_BLOCK = 512


class ConvergenceError(RuntimeError):
    """The scalarized solver ran out of iterations.

    Carries the last iterate and the final full-sweep coefficient change so
    callers can inspect or resume.
    """

    def __init__(self, message: str, *, theta: np.ndarray, sweep_delta: float,
                 sweeps: int, weight: tuple[float, ...] | None = None):
        super().__init__(message)
        self.theta = theta
        self.sweep_delta = sweep_delta
        self.sweeps = sweeps
        self.weight = weight


@dataclass(frozen=True)
class ElasticNetProblem:
    """Design matrix, response and the strong-convexity perturbation epsilon."""

    X: np.ndarray
    y: np.ndarray
    epsilon: float

    def __post_init__(self) -> None:
        X = np.ascontiguousarray(self.X, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D matrix")
        if y.ndim != 1:
            raise ValueError("y must be a 1-D vector")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("X must have at least one row and one column")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValueError("X and y must be finite")
        eps = float(self.epsilon)
        if not eps > 0.0:
            raise ValueError("epsilon must be strictly positive")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "epsilon", eps)

    @property
    def n_observations(self) -> int:
        return self.X.shape[0]

    @property
    def n_predictors(self) -> int:
        return self.X.shape[1]

    def degenerate_columns(self) -> list[int]:
        """0-based indices of zero-norm predictor columns (their coefficients stay 0)."""
        norms = np.linalg.norm(self.X, axis=0)
        return [int(j) for j in np.nonzero(norms == 0.0)[0]]


@dataclass(frozen=True)
class Hyperparams:
    """Elastic net regularization pair: mu scales the L1 term, lam the L2 term."""

    mu: float
    lam: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.mu) and np.isfinite(self.lam)):
            raise ValueError("hyper-parameters must be finite")
        if self.mu < 0.0 or self.lam < 0.0:
            raise ValueError("hyper-parameters must be non-negative")


@dataclass(frozen=True)
class SolverConfig:
    """Coordinate-descent settings.

    ``tolerance`` bounds the max absolute coefficient change over a full sweep;
    ``polish_interval`` is the sweep period at which an exact active-set solve
    is attempted and accepted only if the full optimality certificate holds.
    ``seed`` feeds any randomized initialization (the default start is zero).
    """

    tolerance: float = 1e-8
    max_iterations: int = 100_000
    seed: int = 0
    polish_interval: int = 10

    def __post_init__(self) -> None:
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.polish_interval < 1:
            raise ValueError("polish_interval must be >= 1")


DEFAULT_CONFIG = SolverConfig()


def objectives(problem: ElasticNetProblem, theta: Sequence[float] | np.ndarray) -> tuple[float, float, float]:
    """(data fit, L1 norm, half squared L2 norm) at theta."""
    t = _check_theta(problem, theta)
    r = problem.X @ t - problem.y
    f1 = float(r @ r) / (2.0 * problem.n_observations)
    f2 = float(np.abs(t).sum())
    f3 = float(t @ t) / 2.0
    return f1, f2, f3


def perturbed_objectives(problem: ElasticNetProblem, theta: Sequence[float] | np.ndarray) -> tuple[float, float, float]:
    """Strongly convexified objectives: each plain objective plus epsilon * f3."""
    f1, f2, f3 = objectives(problem, theta)
    shift = problem.epsilon * f3
    return f1 + shift, f2 + shift, f3 + shift


def perturbed_objectives_batch(problem: ElasticNetProblem, thetas: np.ndarray) -> np.ndarray:
    """Perturbed objectives for each row of ``thetas``; returns an (N, 3) array."""
    T = np.asarray(thetas, dtype=float)
    if T.ndim != 2 or T.shape[1] != problem.n_predictors:
        raise ValueError(f"thetas must have shape (N, {problem.n_predictors})")
    R = T @ problem.X.T - problem.y[None, :]
    f1 = (R * R).sum(axis=1) / (2.0 * problem.n_observations)
    f2 = np.abs(T).sum(axis=1)
    f3 = (T * T).sum(axis=1) / 2.0
    shift = problem.epsilon * f3
    return np.column_stack([f1 + shift, f2 + shift, f3 + shift])


def weight_to_hyperparams(w: WeightVector | Sequence[float], epsilon: float) -> Hyperparams:
    """Convert a weight on the 2-simplex to the (mu, lam) regularization pair.

    mu = w2 / w1 and lam = (w3 + epsilon) / w1. Undefined on the w1 = 0 face,
    where the scalarized problem no longer corresponds to an elastic net fit.
    """
    wv = as_weight(w, m=N_OBJECTIVES)
    w1, w2, w3 = wv.components
    if w1 <= 0.0:
        raise ValueError("conversion is undefined on the w1 = 0 face (pure-regularizer subproblem)")
    return Hyperparams(mu=w2 / w1, lam=(w3 + float(epsilon)) / w1)


#: Relative slack accepted on the lam >= epsilon * (mu + 1) validity boundary,
#: so that weights converted to (mu, lam) round-trip despite rounding.
_VALIDITY_SLACK = 1e-12


def hyperparams_to_weight(h: Hyperparams, epsilon: float) -> WeightVector:
    """Convert (mu, lam) back to a weight on the 2-simplex.

    Valid only for 0 <= mu <= (lam - epsilon) / epsilon; outside that region
    the pair does not correspond to any weight with w1 > 0.
    """
    eps = float(epsilon)
    if not eps > 0.0:
        raise ValueError("epsilon must be strictly positive")
    mu, lam = h.mu, h.lam
    den = lam + mu + 1.0
    w3_num = lam - eps * (mu + 1.0)
    if w3_num < -_VALIDITY_SLACK * den:
        raise ValueError(
            f"(mu={mu!r}, lam={lam!r}) lies outside the validity region "
            f"0 <= mu <= (lam - epsilon)/epsilon for epsilon={eps!r}"
        )
    w1 = (1.0 + eps) / den
    w2 = (1.0 + eps) * mu / den
    w3 = max(w3_num / den, 0.0)
    return WeightVector((w1, w2, w3))


def scalarization_coefficients(w: WeightVector | Sequence[float], epsilon: float) -> tuple[float, float, float]:
    """Coefficients (a, b, c) of the scalarized objective.

    The weighted sum of the perturbed objectives collapses to
    a * f1 + b * f2 + c * f3 with a = w1, b = w2, c = w3 + epsilon.
    """
    wv = as_weight(w, m=N_OBJECTIVES)
    return wv[0], wv[1], wv[2] + float(epsilon)


def scalarized_objective(problem: ElasticNetProblem, w: WeightVector | Sequence[float],
                         theta: Sequence[float] | np.ndarray) -> float:
    """Value of the weighted-sum objective at theta."""
    a, b, c = scalarization_coefficients(w, problem.epsilon)
    f1, f2, f3 = objectives(problem, theta)
    return a * f1 + b * f2 + c * f3


def _check_theta(problem: ElasticNetProblem, theta: Sequence[float] | np.ndarray) -> np.ndarray:
    t = np.asarray(theta, dtype=float)
    if t.shape != (problem.n_predictors,):
        raise ValueError(f"theta must have shape ({problem.n_predictors},), got {t.shape}")
    return t


def _soft(z: float, threshold: float) -> float:
    if z > threshold:
        return z - threshold
    if z < -threshold:
        return z + threshold
    return 0.0


def _kkt_polish(G: np.ndarray, rhs: np.ndarray, b: float, signs: np.ndarray,
                tol: float) -> np.ndarray | None:
    """Exact minimizer candidate from an active-set solve, or None.

    ``G`` is the (positive definite) Hessian of the smooth part and ``rhs`` its
    unpenalized gradient offset, so stationarity reads G theta - rhs = -b * s.
    Starting from the sign pattern ``signs``, coordinates whose solved value
    contradicts their sign are released and zero coordinates violating the
    subgradient bound are activated, until the pattern is self-consistent.
    The candidate is returned only if the full certificate holds within
    ``tol``; otherwise None, and coordinate descent carries on.
    """
    n = G.shape[0]
    if b == 0.0:
        cand = np.linalg.solve(G, rhs)
        return cand if np.abs(G @ cand - rhs).max() <= tol else None
    s = signs.astype(float).copy()
    for _ in range(4 * n + 16):
        active = np.nonzero(s)[0]
        cand = np.zeros(n)
        if active.size:
            sub = G[np.ix_(active, active)]
            cand[active] = np.linalg.solve(sub, rhs[active] - b * s[active])
        g = G @ cand - rhs
        flipped = active[np.sign(cand[active]) != s[active]] if active.size else active
        if flipped.size:
            s[flipped] = 0.0
            continue
        inactive = np.nonzero(s == 0.0)[0]
        violating = inactive[np.abs(g[inactive]) > b + tol] if inactive.size else inactive
        if violating.size:
            s[violating] = -np.sign(g[violating])
            continue
        ok_active = not active.size or np.abs(g[active] + b * s[active]).max() <= tol
        ok_zero = not inactive.size or (np.abs(g[inactive]) - b).max() <= tol
        return cand if (ok_active and ok_zero) else None
    return None


def solve_scalarized(problem: ElasticNetProblem, w: WeightVector | Sequence[float],
                     config: SolverConfig = DEFAULT_CONFIG,
                     theta0: np.ndarray | None = None,
                     on_sweep: Callable[[np.ndarray, float], None] | None = None) -> np.ndarray:
    """Minimize the weighted-sum objective a*f1 + b*f2 + c*f3 over theta.

    On the w1 = 0 face the minimizer of the pure regularizer part is the zero
    vector, returned exactly. Otherwise cyclic coordinate descent runs with the
    exact single-coordinate update

        theta_j <- soft(a * X_j^T r_j / m_obs, b) / (a * ||X_j||^2 / m_obs + c)

    where r_j is the residual with coordinate j removed. Sweeping stops once
    the max absolute coefficient change falls below ``config.tolerance``; in
    addition, every ``config.polish_interval`` sweeps an exact linear solve on
    the current sign pattern is attempted and returned early when the full
    subgradient certificate validates it. The polish step is what delivers
    certificate-grade accuracy on rank-deficient designs, where plain
    coordinate descent creeps along near-null directions of the Gram matrix.

    Raises ConvergenceError with the last iterate attached once
    ``config.max_iterations`` sweeps are exhausted.
    """
    wv = as_weight(w, m=N_OBJECTIVES)
    a, b, c = scalarization_coefficients(wv, problem.epsilon)
    X, y = problem.X, problem.y
    m_obs, n = X.shape

    if a == 0.0:
        return np.zeros(n)

    theta = np.zeros(n) if theta0 is None else _check_theta(problem, theta0).copy()
    col_norm2 = (X * X).sum(axis=0)
    denom = a * col_norm2 / m_obs + c
    r = y - X @ theta

    G: np.ndarray | None = None
    rhs: np.ndarray | None = None
    tol = config.tolerance
    next_polish = config.polish_interval

    for sweep in range(1, config.max_iterations + 1):
        delta = 0.0
        for j in range(n):
            old = theta[j]
            if old != 0.0:
                r += old * X[:, j]
            z = a * (X[:, j] @ r) / m_obs
            new = _soft(z, b) / denom[j]
            theta[j] = new
            if new != 0.0:
                r -= new * X[:, j]
            change = abs(new - old)
            if change > delta:
                delta = change
        if on_sweep is not None:
            on_sweep(theta.copy(), delta)
        if delta < tol or sweep >= next_polish:
            if G is None:
                G = a * (X.T @ X) / m_obs + c * np.eye(n)
                rhs = a * (X.T @ y) / m_obs
            cand = _kkt_polish(G, rhs, b, np.sign(theta), tol)
            if cand is not None:
                return cand
            next_polish = sweep + config.polish_interval

    raise ConvergenceError(
        f"no certified solution within {config.max_iterations} sweeps "
        f"(last sweep delta {delta:.3e})",
        theta=theta, sweep_delta=delta, sweeps=config.max_iterations,
        weight=wv.components,
    )


class SampleRecord(NamedTuple):
    w: tuple[float, float, float]
    theta: np.ndarray
    losses: tuple[float, float, float]


@dataclass
class SampleMeta:
    """Provenance of a Pareto sample: dataset, perturbation, grid and solver."""

    dataset: str
    epsilon: float
    resolution: int | None
    solver: SolverConfig
    n_predictors: int
    failed_weights: list[tuple[float, float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "dataset": self.dataset,
            "epsilon": self.epsilon,
            "resolution": self.resolution,
            "n": self.n_predictors,
            "solver": {
                "tolerance": self.solver.tolerance,
                "max_iterations": self.solver.max_iterations,
                "seed": self.solver.seed,
            },
        }
        if self.failed_weights:
            d["failed_weights"] = [list(w) for w in self.failed_weights]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SampleMeta":
        solver = d.get("solver", {})
        return cls(
            dataset=d.get("dataset", ""),
            epsilon=float(d["epsilon"]),
            resolution=None if d.get("resolution") is None else int(d["resolution"]),
            solver=SolverConfig(
                tolerance=float(solver.get("tolerance", DEFAULT_CONFIG.tolerance)),
                max_iterations=int(solver.get("max_iterations", DEFAULT_CONFIG.max_iterations)),
                seed=int(solver.get("seed", 0)),
            ),
            n_predictors=int(d["n"]),
            failed_weights=[tuple(w) for w in d.get("failed_weights", [])],
        )


@dataclass
class ParetoSample:
    """Solutions of the scalarized problem over a set of weights.

    ``weights`` is (N, 3), ``thetas`` is (N, n) and ``losses`` is (N, 3) with
    the perturbed objectives evaluated at each returned theta. Rows follow the
    order of the weight grid that produced them.
    """

    weights: np.ndarray
    thetas: np.ndarray
    losses: np.ndarray
    meta: SampleMeta

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.losses = np.asarray(self.losses, dtype=float)
        N = self.weights.shape[0]
        if self.weights.ndim != 2 or self.weights.shape[1] != N_OBJECTIVES:
            raise ValueError("weights must have shape (N, 3)")
        if self.thetas.ndim != 2 or self.thetas.shape[0] != N:
            raise ValueError("thetas must have shape (N, n)")
        if self.losses.shape != (N, N_OBJECTIVES):
            raise ValueError("losses must have shape (N, 3)")

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def n_predictors(self) -> int:
        return self.thetas.shape[1]

    def records(self) -> Iterator[SampleRecord]:
        for k in range(len(self)):
            yield SampleRecord(tuple(self.weights[k]), self.thetas[k], tuple(self.losses[k]))

    def training_data(self) -> tuple[np.ndarray, np.ndarray]:
        """(weights, targets) pairs for surrogate fitting; targets are [theta, losses]."""
        return self.weights, np.hstack([self.thetas, self.losses])

    def validate(self, problem: ElasticNetProblem | None = None, tol: float = 1e-10) -> None:
        """Re-check invariants: weights on the simplex and distinct, losses consistent.

        The L1/L2-derived losses are recomputed from theta and epsilon alone.
        The data-fit loss additionally needs the design matrix, so it is only
        checked when ``problem`` is given.
        """
        if not np.isfinite(self.weights).all() or not np.isfinite(self.thetas).all() \
                or not np.isfinite(self.losses).all():
            raise ValueError("sample contains non-finite entries")
        for k in range(len(self)):
            as_weight(tuple(self.weights[k]))
        if len(np.unique(self.weights, axis=0)) != len(self):
            raise ValueError("sample weights are not pairwise distinct")
        eps = self.meta.epsilon
        f3_plain = (self.thetas * self.thetas).sum(axis=1) / 2.0
        shift = eps * f3_plain
        f2 = np.abs(self.thetas).sum(axis=1) + shift
        f3 = f3_plain + shift
        err2 = np.abs(self.losses[:, 1] - f2).max(initial=0.0)
        err3 = np.abs(self.losses[:, 2] - f3).max(initial=0.0)
        worst = max(err2, err3)
        if problem is not None:
            recomputed = perturbed_objectives_batch(problem, self.thetas)
            worst = max(worst, float(np.abs(self.losses - recomputed).max(initial=0.0)))
        if worst > tol:
            raise ValueError(f"losses disagree with re-evaluated objectives by {worst:.3e} (> {tol:g})")


def _solve_block(problem: ElasticNetProblem, block: np.ndarray, config: SolverConfig,
                 warm_start: bool, on_failure: str) -> tuple[np.ndarray, np.ndarray, list]:
    n = problem.n_predictors
    thetas = np.zeros((block.shape[0], n))
    ok = np.ones(block.shape[0], dtype=bool)
    failures: list[tuple[tuple[float, ...], ConvergenceError]] = []
    prev: np.ndarray | None = None
    for k, w in enumerate(block):
        if w[0] == 0.0:
            theta = np.zeros(n)
        else:
            try:
                theta = solve_scalarized(problem, tuple(w), config,
                                         theta0=prev if warm_start else None)
            except ConvergenceError as exc:
                if on_failure == "raise":
                    raise
                failures.append((tuple(w), exc))
                ok[k] = False
                prev = None
                continue
        thetas[k] = theta
        prev = theta if warm_start else None
    return thetas, ok, failures


def sample_pareto(problem: ElasticNetProblem,
                  grid: Sequence[WeightVector] | np.ndarray,
                  config: SolverConfig = DEFAULT_CONFIG,
                  *,
                  dataset: str = "",
                  resolution: int | None = None,
                  warm_start: bool = True,
                  n_jobs: int = 1,
                  on_failure: Literal["raise", "skip"] = "raise") -> ParetoSample:
    """Solve the scalarized problem at every grid weight, in grid order.

    The grid is processed in fixed blocks of ``WARM_START_BLOCK`` points; warm
    starts chain within a block only, so results do not depend on ``n_jobs``.
    With ``on_failure="skip"``, non-converged points are dropped from the
    sample and listed in ``meta.failed_weights``; with ``"raise"`` the first
    failure aborts with the offending weight attached.
    """
    if on_failure not in ("raise", "skip"):
        raise ValueError("on_failure must be 'raise' or 'skip'")
    W = np.array([as_weight(w, m=N_OBJECTIVES).components for w in grid], dtype=float) \
        if not isinstance(grid, np.ndarray) else np.asarray(grid, dtype=float)
    if W.ndim != 2 or W.shape[1] != N_OBJECTIVES:
        raise ValueError("grid must be a sequence of 3-component weights")
    blocks = [W[i:i + WARM_START_BLOCK] for i in range(0, W.shape[0], WARM_START_BLOCK)]

    def run(block: np.ndarray):
        return _solve_block(problem, block, config, warm_start, on_failure)

    if n_jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(b) for b in blocks]

    thetas = np.vstack([r[0] for r in results]) if results else np.zeros((0, problem.n_predictors))
    keep = np.concatenate([r[1] for r in results]) if results else np.zeros(0, dtype=bool)
    failures = [wf for r in results for wf, _ in r[2]]

    W, thetas = W[keep], thetas[keep]
    losses = perturbed_objectives_batch(problem, thetas) if len(W) else np.zeros((0, N_OBJECTIVES))
    meta = SampleMeta(dataset=dataset, epsilon=problem.epsilon, resolution=resolution,
                      solver=config, n_predictors=problem.n_predictors,
                      failed_weights=list(failures))
    return ParetoSample(weights=W, thetas=thetas, losses=losses, meta=meta)
