#!/usr/bin/env python3
"""Regenerate the explorer's cross-implementation fixtures.

Fits a degree-3 surrogate to the bundled example1 problem and freezes 20
(w, b(w)) evaluation pairs plus the model and manifest the explorer consumes.
Run from the repository root:

    python3 tools/make_ui_fixtures.py
"""

import json
from pathlib import Path

import numpy as np

from paretobez.bezier import evaluate, fit_all_at_once
from paretobez.dataio import LOSS_LABELS, example1_problem
from paretobez.elasticnet import SolverConfig, sample_pareto
from paretobez.simplex import grid_points

OUT = Path(__file__).resolve().parent.parent / "frontend" / "fixtures" / "evaluation_fixtures.json"

CASE_WEIGHTS = [
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (0.5, 0.5, 0.0),
    (0.5, 0.0, 0.5),
    (0.0, 0.5, 0.5),
    (1 / 3, 1 / 3, 1 / 3),
    (0.8, 0.1, 0.1),
    (0.1, 0.8, 0.1),
    (0.1, 0.1, 0.8),
    (0.6, 0.3, 0.1),
    (0.6, 0.1, 0.3),
    (0.25, 0.5, 0.25),
    (0.25, 0.25, 0.5),
    (0.9, 0.05, 0.05),
    (0.05, 0.45, 0.5),
    (0.7, 0.0, 0.3),
    (0.3, 0.7, 0.0),
    (0.15, 0.35, 0.5),
    (0.42, 0.17, 0.41),
]


def main() -> None:
    epsilon = 1e-6
    problem = example1_problem(epsilon)
    sample = sample_pareto(problem, grid_points(3, 10), SolverConfig(),
                           dataset="example1", resolution=10)
    W, T = sample.training_data()
    model = fit_all_at_once(W, T, degree=3).model

    cases = [{"w": list(w), "value": evaluate(model, w).tolist()} for w in CASE_WEIGHTS]
    payload = {
        "model": model.to_dict(),
        "manifest": {
            "dataset": "example1",
            "epsilon": epsilon,
            "n": problem.n_predictors,
            "resolution": 10,
            "out_dim": model.out_dim,
            "loss_labels": LOSS_LABELS,
        },
        "cases": cases,
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(cases)} cases -> {OUT}")


if __name__ == "__main__":
    main()
