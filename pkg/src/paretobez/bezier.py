"""Bezier simplex surrogates: evaluation, least-squares fitting, degree sweeps.

A model of degree d over the (m-1)-simplex maps a barycentric point w to
sum_i C(d, i) w^i p_i, a polynomial that is linear in its control points p_i.
Fitting all control points to sampled (w, target) pairs is therefore a linear
least-squares problem on the Bernstein design matrix, solved here by a
rank-revealing orthogonal factorization with a minimum-norm fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .simplex import (
    FaceIndex,
    WeightVector,
    as_weight,
    bernstein_design,
    exponent_matrix,
    multi_index_count,
)

#: Index-order tag written into serialized models.
INDEX_ORDER = "revlex"


@dataclass
class BezierSimplexModel:
    """Control points of a Bezier simplex, rows in canonical revlex index order."""

    m: int
    degree: int
    control_points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        P = np.asarray(self.control_points, dtype=float)
        if P.ndim != 2:
            raise ValueError("control_points must be a 2-D array (index, out_dim)")
        expected = multi_index_count(self.m, self.degree)
        if P.shape[0] != expected:
            raise ValueError(
                f"degree {self.degree} over m={self.m} needs {expected} control points, got {P.shape[0]}"
            )
        if P.shape[1] < 1:
            raise ValueError("output dimension must be >= 1")
        if not np.isfinite(P).all():
            raise ValueError("control points must be finite")
        self.control_points = P

    @property
    def out_dim(self) -> int:
        return self.control_points.shape[1]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "d": self.degree,
            "out_dim": self.out_dim,
            "index_order": INDEX_ORDER,
            "control_points": self.control_points.tolist(),
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BezierSimplexModel":
        order = d.get("index_order", INDEX_ORDER)
        if order != INDEX_ORDER:
            raise ValueError(f"unsupported index order {order!r} (expected {INDEX_ORDER!r})")
        model = cls(
            m=int(d["m"]),
            degree=int(d["d"]),
            control_points=np.asarray(d["control_points"], dtype=float),
            meta=dict(d.get("meta", {})),
        )
        if "out_dim" in d and int(d["out_dim"]) != model.out_dim:
            raise ValueError(
                f"declared out_dim {d['out_dim']} does not match control points ({model.out_dim})"
            )
        return model


def evaluate(model: BezierSimplexModel, w: WeightVector | Sequence[float]) -> np.ndarray:
    """Evaluate the model at one barycentric point."""
    wv = as_weight(w, m=model.m)
    B = bernstein_design(model.degree, wv.as_array()[None, :])
    return (B @ model.control_points)[0]


def evaluate_many(model: BezierSimplexModel, weights: np.ndarray) -> np.ndarray:
    """Evaluate the model at each row of an (N, m) array of barycentric points."""
    W = np.asarray(weights, dtype=float)
    if W.ndim != 2 or W.shape[1] != model.m:
        raise ValueError(f"weights must have shape (N, {model.m})")
    return bernstein_design(model.degree, W) @ model.control_points


def restrict_to_face(model: BezierSimplexModel, face: FaceIndex | Iterable[int]) -> BezierSimplexModel:
    """The model induced on a face of the simplex.

    Keeps exactly the control points whose exponents vanish off the face and
    re-indexes them over the face's own multi-index set; evaluating the
    restriction at a face point equals evaluating the full model at the
    embedded point, exactly.
    """
    fi = face if isinstance(face, FaceIndex) else FaceIndex(tuple(face))
    fi.validate_ambient(model.m)
    cols = [label - 1 for label in fi.members]
    exps = exponent_matrix(model.m, model.degree)
    off = np.ones(model.m, dtype=bool)
    off[cols] = False
    keep = (exps[:, off] == 0).all(axis=1)

    sub_exps = exponent_matrix(fi.size, model.degree)
    row_of = {tuple(e): r for r, e in enumerate(sub_exps.tolist())}
    points = np.empty((sub_exps.shape[0], model.out_dim))
    for idx in np.nonzero(keep)[0]:
        projected = tuple(exps[idx, cols].tolist())
        points[row_of[projected]] = model.control_points[idx]
    return BezierSimplexModel(m=fi.size, degree=model.degree, control_points=points,
                              meta={"face": list(fi.members), **model.meta})


@dataclass
class FitResult:
    """A fitted model plus conditioning diagnostics of the normal problem."""

    model: BezierSimplexModel
    condition_diagnostic: float
    rank: int
    n_basis: int

    @property
    def truncated(self) -> bool:
        return self.rank < self.n_basis


def fit_all_at_once(weights: np.ndarray, targets: np.ndarray, degree: int,
                    m: int | None = None) -> FitResult:
    """Least-squares fit of all control points to sampled (w, target) pairs.

    Solved jointly for every output coordinate via SVD-based lstsq; when the
    design is rank deficient (fewer samples than basis functions, or degenerate
    sample placement) the minimum-norm solution is returned and flagged through
    ``condition_diagnostic`` (ratio of the extreme retained singular values)
    and ``truncated``.
    """
    W = np.asarray(weights, dtype=float)
    T = np.asarray(targets, dtype=float)
    if W.ndim != 2:
        raise ValueError("weights must be a 2-D array")
    if T.ndim == 1:
        T = T[:, None]
    if T.shape[0] != W.shape[0]:
        raise ValueError("weights and targets must have matching row counts")
    if W.shape[0] < 1:
        raise ValueError("need at least one sample")
    if m is None:
        m = W.shape[1]
    elif m != W.shape[1]:
        raise ValueError(f"weights have dimension {W.shape[1]}, expected m={m}")

    B = bernstein_design(degree, W)
    P, _, rank, sv = np.linalg.lstsq(B, T, rcond=None)
    retained = sv[:rank] if rank > 0 else sv[:1]
    condition = float(retained[0] / retained[-1]) if retained.size and retained[-1] > 0 else math.inf
    model = BezierSimplexModel(m=m, degree=degree, control_points=P)
    return FitResult(model=model, condition_diagnostic=condition, rank=int(rank),
                     n_basis=B.shape[1])


def mse(model: BezierSimplexModel, weights: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error per output coordinate over the sample."""
    W = np.asarray(weights, dtype=float)
    T = np.asarray(targets, dtype=float)
    if T.ndim == 1:
        T = T[:, None]
    if W.shape[0] != T.shape[0] or W.shape[0] < 1:
        raise ValueError("weights and targets must be non-empty with matching row counts")
    R = evaluate_many(model, W) - T
    return float((R * R).sum() / (R.shape[0] * model.out_dim))


# -- reproducible splits --------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    # SplitMix64 finalizer (Steele, Lea & Flood 2014).
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def splitmix_key(seed: int, k: int) -> int:
    """The k-th output of a SplitMix64 stream seeded with ``seed``.

    Counter-based (random access) and trivially portable: the key is
    mix64(seed + (k + 1) * 0x9E3779B97F4A7C15 mod 2^64) with the standard
    SplitMix64 finalizer.
    """
    return _mix64((seed + (k + 1) * _GAMMA) & _MASK64)


def split_indices(n_samples: int, train_count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic uniform partition into train/test index arrays.

    Every sample index is ranked by its SplitMix64 key (ties broken by index);
    the ``train_count`` smallest keys form the training set. Both halves are
    returned sorted in original order, so any implementation of SplitMix64
    reproduces the partition exactly.
    """
    if not 1 <= train_count < n_samples:
        raise ValueError(f"train_count must be in [1, {n_samples - 1}], got {train_count}")
    keys = [(splitmix_key(seed, k), k) for k in range(n_samples)]
    keys.sort()
    chosen = sorted(k for _, k in keys[:train_count])
    rest = sorted(k for _, k in keys[train_count:])
    return np.array(chosen, dtype=np.int64), np.array(rest, dtype=np.int64)


def train_test_split(weights: np.ndarray, targets: np.ndarray, train_count: int,
                     seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split (weights, targets) rows into train and test sets, reproducibly.

    Returns (train_weights, train_targets, test_weights, test_targets).
    """
    W = np.asarray(weights, dtype=float)
    T = np.asarray(targets, dtype=float)
    if W.shape[0] != T.shape[0]:
        raise ValueError("weights and targets must have matching row counts")
    tr, te = split_indices(W.shape[0], train_count, seed)
    return W[tr], T[tr], W[te], T[te]


# -- degree sweep -----------------------------------------------------------------

@dataclass
class FitReport:
    """One fit-and-score cell of a sweep."""

    degree: int
    train_count: int
    test_count: int
    trial: int
    seed: int
    train_mse: float
    test_mse: float
    condition_diagnostic: float
    truncated: bool

    def __post_init__(self) -> None:
        if self.train_mse < 0.0 or self.test_mse < 0.0:
            raise ValueError("mse values cannot be negative")


@dataclass
class SweepCellSummary:
    """Mean and standard deviation of MSEs over the trials of one (split, degree)."""

    train_count: int
    degree: int
    trials: int
    mean_train_mse: float
    mean_test_mse: float
    std_test_mse: float


@dataclass
class SweepResult:
    reports: list[FitReport]
    summaries: list[SweepCellSummary]
    best_degree: dict[int, int]  # train_count -> degree minimizing mean test MSE


def degree_sweep(weights: np.ndarray, targets: np.ndarray, degrees: Sequence[int],
                 train_counts: Sequence[int], trials: int, base_seed: int) -> SweepResult:
    """Split/fit/score every (train_count, degree, trial) combination.

    The split seed for a cell depends on (train_count, trial) only, so all
    degrees of a given trial see identical training rows; with the fit itself
    deterministic, trial-to-trial variance comes purely from the random split.
    Singular fits are recorded with their diagnostics rather than aborting the
    sweep.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    W = np.asarray(weights, dtype=float)
    T = np.asarray(targets, dtype=float)
    reports: list[FitReport] = []
    summaries: list[SweepCellSummary] = []
    best: dict[int, int] = {}

    for train_count in train_counts:
        by_degree: dict[int, list[FitReport]] = {d: [] for d in degrees}
        for trial in range(trials):
            seed = splitmix_key(splitmix_key(base_seed, train_count), trial)
            Wtr, Ttr, Wte, Tte = train_test_split(W, T, train_count, seed)
            for d in degrees:
                fit = fit_all_at_once(Wtr, Ttr, d)
                rep = FitReport(
                    degree=d, train_count=train_count, test_count=W.shape[0] - train_count,
                    trial=trial, seed=seed,
                    train_mse=mse(fit.model, Wtr, Ttr),
                    test_mse=mse(fit.model, Wte, Tte),
                    condition_diagnostic=fit.condition_diagnostic,
                    truncated=fit.truncated,
                )
                reports.append(rep)
                by_degree[d].append(rep)
        split_summaries = []
        for d in degrees:
            tests = np.array([r.test_mse for r in by_degree[d]])
            trains = np.array([r.train_mse for r in by_degree[d]])
            split_summaries.append(SweepCellSummary(
                train_count=train_count, degree=d, trials=trials,
                mean_train_mse=float(trains.mean()),
                mean_test_mse=float(tests.mean()),
                std_test_mse=float(tests.std(ddof=1)) if trials > 1 else 0.0,
            ))
        summaries.extend(split_summaries)
        best[train_count] = min(split_summaries, key=lambda s: (s.mean_test_mse, s.degree)).degree

    return SweepResult(reports=reports, summaries=summaries, best_degree=best)
