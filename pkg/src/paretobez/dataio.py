"""Dataset loading, sample/model persistence, and explorer bundle export.

All numeric text is written with 17 significant digits, which round-trips
IEEE double exactly, so save/load cycles reproduce arrays bit for bit.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bezier import BezierSimplexModel, FitReport, evaluate_many
from .elasticnet import ElasticNetProblem, ParetoSample, SampleMeta
from .simplex import FaceIndex, embed_face

EDGE_TRACE_POINTS = 201

#: Edge faces of the weight simplex and what each sub-path approximates.
EDGE_LABELS = {(1, 2): "lasso", (1, 3): "ridge", (2, 3): "l1-l2"}

LOSS_LABELS = ["data-fit", "l1", "l2"]


class DatasetFormatError(ValueError):
    """A delimited text file failed to parse; carries the offending location."""

    def __init__(self, message: str, *, row: int | None = None, column: str | int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class DatasetSpec:
    """Where a regression dataset lives and which columns play which role.

    Columns are names when the file has a header, 0-based indices otherwise.
    ``normalize`` controls the column-wise min-max rescale to [0, 1]; bundled
    fixtures that must be used verbatim set it to False.
    """

    path: str | Path
    predictor_columns: tuple[str | int, ...]
    response_column: str | int
    delimiter: str = ","
    has_header: bool = True
    normalize: bool = True
    name: str = ""

    def __post_init__(self) -> None:
        preds = tuple(self.predictor_columns)
        object.__setattr__(self, "predictor_columns", preds)
        if not preds:
            raise ValueError("at least one predictor column is required")
        if self.response_column in preds:
            raise ValueError("predictor and response columns must be disjoint")
        if len(set(preds)) != len(preds):
            raise ValueError("predictor columns must be distinct")


@dataclass
class LoadedDataset:
    """A parsed dataset plus the scaling actually applied to each column."""

    problem: ElasticNetProblem
    name: str
    predictor_names: list[str]
    predictor_ranges: list[tuple[float, float]]
    response_range: tuple[float, float]
    constant_predictors: list[str] = field(default_factory=list)


def _scale_column(values: np.ndarray) -> tuple[np.ndarray, tuple[float, float], bool]:
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.zeros_like(values), (lo, hi), True
    return (values - lo) / (hi - lo), (lo, hi), False


def load_dataset(spec: DatasetSpec, epsilon: float) -> LoadedDataset:
    """Read a delimited dataset and build the elastic net problem.

    Each predictor column and the response are min-max scaled to [0, 1]
    (unless the spec disables normalization); constant columns become all
    zeros and are flagged. Parse failures raise DatasetFormatError with the
    file location attached.
    """
    path = Path(spec.path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DatasetFormatError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in csv.reader(text.splitlines(), delimiter=spec.delimiter)]
    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if not rows:
        raise DatasetFormatError(f"{path} is empty")

    if spec.has_header:
        header = [h.strip() for h in rows[0]]
        data_rows = rows[1:]
        first_data_row = 2

        def col_pos(col: str | int) -> int:
            if isinstance(col, int):
                if not 0 <= col < len(header):
                    raise DatasetFormatError(f"column index {col} out of range", column=col)
                return col
            try:
                return header.index(col)
            except ValueError:
                raise DatasetFormatError(f"column {col!r} not found in header {header}", column=col) from None
    else:
        data_rows = rows
        first_data_row = 1
        width = len(rows[0])

        def col_pos(col: str | int) -> int:
            if not isinstance(col, int):
                raise DatasetFormatError(f"headerless files need integer column indices, got {col!r}", column=col)
            if not 0 <= col < width:
                raise DatasetFormatError(f"column index {col} out of range", column=col)
            return col

    if not data_rows:
        raise DatasetFormatError(f"{path} has no data rows")

    positions = [col_pos(c) for c in spec.predictor_columns]
    response_pos = col_pos(spec.response_column)

    def parse_cell(row_cells: list[str], row_number: int, pos: int, label: str | int) -> float:
        if pos >= len(row_cells):
            raise DatasetFormatError("row is too short", row=row_number, column=label)
        cell = row_cells[pos].strip()
        try:
            return float(cell)
        except ValueError:
            raise DatasetFormatError(f"non-numeric cell {cell!r}", row=row_number, column=label) from None

    X = np.empty((len(data_rows), len(positions)))
    y = np.empty(len(data_rows))
    for r, cells in enumerate(data_rows):
        row_number = first_data_row + r
        for k, (pos, label) in enumerate(zip(positions, spec.predictor_columns)):
            X[r, k] = parse_cell(cells, row_number, pos, label)
        y[r] = parse_cell(cells, row_number, response_pos, spec.response_column)

    predictor_names = [str(c) for c in spec.predictor_columns]
    constant: list[str] = []
    pred_ranges: list[tuple[float, float]] = []
    if spec.normalize:
        for k, label in enumerate(predictor_names):
            X[:, k], rng, is_const = _scale_column(X[:, k])
            pred_ranges.append(rng)
            if is_const:
                constant.append(label)
        y, resp_range, _ = _scale_column(y)
    else:
        pred_ranges = [(float(X[:, k].min()), float(X[:, k].max())) for k in range(X.shape[1])]
        resp_range = (float(y.min()), float(y.max()))

    return LoadedDataset(
        problem=ElasticNetProblem(X=X, y=y, epsilon=epsilon),
        name=spec.name or path.stem,
        predictor_names=predictor_names,
        predictor_ranges=pred_ranges,
        response_range=resp_range,
        constant_predictors=constant,
    )


# -- bundled fixture and synthetic data ------------------------------------------

def example1_spec() -> DatasetSpec:
    """Spec for the bundled 4x3 fixture, loaded verbatim (no rescaling)."""
    path = resources.files("paretobez.data").joinpath("example1.csv")
    return DatasetSpec(
        path=str(path),
        predictor_columns=("x1", "x2", "x3"),
        response_column="y",
        normalize=False,
        name="example1",
    )


def example1_problem(epsilon: float) -> ElasticNetProblem:
    """The bundled 4x3 fixture as an ElasticNetProblem, values exactly as shipped."""
    X = np.array([
        [1.0, 2.0, 3.0],
        [6.0, 5.0, 4.0],
        [7.0, 8.0, 9.0],
        [12.0, 11.0, 10.0],
    ])
    y = np.array([1.0, 2.0, 3.0, 4.0])
    return ElasticNetProblem(X=X, y=y, epsilon=epsilon)


def make_synthetic(n_predictors: int = 6, n_observations: int = 500, seed: int = 0,
                   noise: float = 0.1, epsilon: float = 1e-6) -> ElasticNetProblem:
    """A random dense regression problem with all columns min-max scaled to [0, 1]."""
    rng = np.random.default_rng(seed)
    X = rng.random((n_observations, n_predictors))
    coef = rng.normal(size=n_predictors)
    y = X @ coef + noise * rng.normal(size=n_observations)
    y = (y - y.min()) / (y.max() - y.min())
    return ElasticNetProblem(X=X, y=y, epsilon=epsilon)


# -- sample persistence ------------------------------------------------------------

def sidecar_path(sample_path: str | Path) -> Path:
    return Path(sample_path).with_suffix(".meta.json")


def save_sample(sample: ParetoSample, path: str | Path) -> None:
    """Write a sample as CSV plus a JSON metadata sidecar.

    The CSV schema is ``w1,w2,w3,theta_1..theta_n,f1,f2,f3`` with 17
    significant digits per value.
    """
    path = Path(path)
    n = sample.n_predictors
    header = ["w1", "w2", "w3"] + [f"theta_{j + 1}" for j in range(n)] + ["f1", "f2", "f3"]
    lines = [",".join(header)]
    table = np.hstack([sample.weights, sample.thetas, sample.losses])
    for row in table:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    sidecar_path(path).write_text(json.dumps(sample.meta.to_dict(), indent=2, sort_keys=True) + "\n")


def load_sample(path: str | Path, problem: ElasticNetProblem | None = None) -> ParetoSample:
    """Read a sample CSV and its sidecar, re-validating the sample invariants.

    Loss consistency with theta is always checked for the L1/L2-derived
    losses; pass ``problem`` to also verify the data-fit loss.
    """
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise DatasetFormatError(f"missing metadata sidecar {side}")
    meta = SampleMeta.from_dict(json.loads(side.read_text()))

    lines = path.read_text().splitlines()
    if not lines:
        raise DatasetFormatError(f"{path} is empty")
    header = lines[0].split(",")
    n = meta.n_predictors
    expected = ["w1", "w2", "w3"] + [f"theta_{j + 1}" for j in range(n)] + ["f1", "f2", "f3"]
    if header != expected:
        raise DatasetFormatError(f"unexpected sample header {header[:6]}..., wanted {expected[:6]}...")
    width = len(expected)
    data = np.empty((len(lines) - 1, width))
    for r, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise DatasetFormatError(f"expected {width} fields, got {len(cells)}", row=r)
        try:
            data[r - 2] = [float(c) for c in cells]
        except ValueError as exc:
            raise DatasetFormatError(f"non-numeric cell: {exc}", row=r) from None
    if not np.isfinite(data).all():
        raise DatasetFormatError("sample contains non-finite values")

    sample = ParetoSample(weights=data[:, :3], thetas=data[:, 3:3 + n],
                          losses=data[:, 3 + n:], meta=meta)
    sample.validate(problem=problem)
    return sample


# -- model persistence -----------------------------------------------------------

def save_model(model: BezierSimplexModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2, sort_keys=True) + "\n")


def load_model(path: str | Path) -> BezierSimplexModel:
    return BezierSimplexModel.from_dict(json.loads(Path(path).read_text()))


def write_fit_reports_csv(reports: Sequence[FitReport], path: str | Path) -> None:
    """Sweep cells as CSV: split, degree, trial, train/test MSE plus diagnostics."""
    lines = ["split,degree,trial,seed,train_mse,test_mse,condition,truncated"]
    for r in reports:
        lines.append(",".join([
            str(r.train_count), str(r.degree), str(r.trial), str(r.seed),
            _fmt(r.train_mse), _fmt(r.test_mse), _fmt(r.condition_diagnostic),
            "1" if r.truncated else "0",
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


# -- explorer bundle ---------------------------------------------------------------

def export_model_bundle(model: BezierSimplexModel, sample_meta: SampleMeta,
                        out_dir: str | Path, created_at: str | None = None) -> Path:
    """Write model.json, manifest.json and edges.json for the explorer.

    The edge traces evaluate the model along the three edges of the weight
    simplex at ``EDGE_TRACE_POINTS`` points each; the (1,2) edge follows the
    lasso path, (1,3) the ridge path, and (2,3) the pure-regularizer edge.
    """
    if model.m != 3:
        raise ValueError("explorer bundles require a 3-input model")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / "model.json")

    manifest = {
        "dataset": sample_meta.dataset,
        "epsilon": sample_meta.epsilon,
        "n": sample_meta.n_predictors,
        "resolution": sample_meta.resolution,
        "out_dim": model.out_dim,
        "loss_labels": LOSS_LABELS,
        "created_at": created_at if created_at is not None
        else time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "tool_version": __version__,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    ts = np.linspace(0.0, 1.0, EDGE_TRACE_POINTS)
    edges = []
    for members, label in EDGE_LABELS.items():
        face = FaceIndex(members)
        weights = [embed_face(face, (1.0 - t, t), 3) for t in ts]
        W = np.array([w.components for w in weights])
        values = evaluate_many(model, W)
        edges.append({
            "members": list(members),
            "label": label,
            "t": ts.tolist(),
            "weights": W.tolist(),
            "values": values.tolist(),
        })
    (out / "edges.json").write_text(
        json.dumps({"n_points": EDGE_TRACE_POINTS, "edges": edges}, indent=2, sort_keys=True) + "\n")
    return out
