"""Command-line pipeline: sample, fit, sweep, verify, export, serve.

Every subcommand is deterministic given its flags: outputs carry no
timestamps (except the export manifest), thread counts only change wall
time, and all randomness flows through explicit seeds. Failures print a
machine-readable JSON object on stderr; exit codes are 0 for success, 1 for
verification failures, 2 for input errors, and 3 for solver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlsplit

import numpy as np

from . import __version__
from .bezier import degree_sweep, fit_all_at_once, mse, train_test_split
from .dataio import (
    DatasetFormatError,
    DatasetSpec,
    example1_problem,
    export_model_bundle,
    load_dataset,
    load_model,
    load_sample,
    make_synthetic,
    save_model,
    save_sample,
    sidecar_path,
    write_fit_reports_csv,
)
from .diagnostics import (
    brute_force_path_1d,
    check_hoelder_bound,
    check_weak_dominance,
    remark_solution_path,
    subgradient_certificate,
)
from .elasticnet import (
    ConvergenceError,
    ElasticNetProblem,
    SolverConfig,
    perturbed_objectives_batch,
    sample_pareto,
)
from .simplex import grid_points

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3


class VerificationFailure(Exception):
    """One or more verification checks did not pass."""

    def __init__(self, report: dict):
        super().__init__("verification failed")
        self.report = report


def _solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=1e-16,
                   help="strong-convexity perturbation (default 1e-16)")
    p.add_argument("--tolerance", type=float, default=1e-8,
                   help="coordinate-descent sweep tolerance (default 1e-8)")
    p.add_argument("--max-iters", type=int, default=100_000,
                   help="maximum coordinate-descent sweeps (default 100000)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; never changes outputs (default 1)")


def _dataset_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="path to a delimited dataset")
    src.add_argument("--builtin", choices=["example1", "synthetic"],
                     help="bundled fixture or generated dataset")
    p.add_argument("--predictors", help="comma-separated predictor column names/indices")
    p.add_argument("--response", help="response column name/index")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true", help="columns are 0-based indices")
    p.add_argument("--name", default="", help="dataset name recorded in metadata")
    p.add_argument("--synthetic-predictors", type=int, default=6)
    p.add_argument("--synthetic-observations", type=int, default=500)


def _parse_columns(raw: str) -> tuple[str | int, ...]:
    cols: list[str | int] = []
    for tok in raw.split(","):
        tok = tok.strip()
        cols.append(int(tok) if tok.lstrip("-").isdigit() else tok)
    return tuple(cols)


def _resolve_problem(args: argparse.Namespace) -> tuple[ElasticNetProblem, str]:
    if args.builtin == "example1":
        return example1_problem(args.epsilon), "example1"
    if args.builtin == "synthetic":
        problem = make_synthetic(n_predictors=args.synthetic_predictors,
                                 n_observations=args.synthetic_observations,
                                 seed=args.seed, epsilon=args.epsilon)
        return problem, args.name or f"synthetic-{args.synthetic_predictors}x{args.synthetic_observations}"
    if not args.predictors or args.response is None:
        raise DatasetFormatError("--data requires --predictors and --response")
    response = args.response.strip()
    spec = DatasetSpec(
        path=args.data,
        predictor_columns=_parse_columns(args.predictors),
        response_column=int(response) if response.lstrip("-").isdigit() else response,
        delimiter=args.delimiter,
        has_header=not args.no_header,
        name=args.name,
    )
    loaded = load_dataset(spec, epsilon=args.epsilon)
    if loaded.constant_predictors:
        print(f"warning: constant predictor columns mapped to zero: "
              f"{', '.join(loaded.constant_predictors)}", file=sys.stderr)
    return loaded.problem, loaded.name


def _config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(tolerance=args.tolerance, max_iterations=args.max_iters, seed=args.seed)


def cmd_sample(args: argparse.Namespace) -> int:
    problem, name = _resolve_problem(args)
    grid = grid_points(3, args.resolution)
    started = time.perf_counter()
    sample = sample_pareto(problem, grid, _config(args), dataset=name,
                           resolution=args.resolution, n_jobs=args.threads,
                           on_failure=args.on_failure)
    save_sample(sample, args.output)
    elapsed = time.perf_counter() - started
    failed = len(sample.meta.failed_weights)
    print(f"sampled {len(sample)}/{len(grid)} grid points "
          f"({failed} convergence failures) in {elapsed:.1f}s -> {args.output}",
          file=sys.stderr)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    sample = load_sample(args.sample)
    W, T = sample.training_data()
    Wtr, Ttr, Wte, Tte = train_test_split(W, T, args.train_count, args.seed)
    fit = fit_all_at_once(Wtr, Ttr, args.degree)
    fit.model.meta.update({"dataset": sample.meta.dataset, "epsilon": sample.meta.epsilon,
                           "train_count": args.train_count, "seed": args.seed})
    save_model(fit.model, args.output)
    report = {
        "degree": args.degree,
        "train_count": int(args.train_count),
        "test_count": int(W.shape[0] - args.train_count),
        "seed": args.seed,
        "train_mse": mse(fit.model, Wtr, Ttr),
        "test_mse": mse(fit.model, Wte, Tte),
        "condition_diagnostic": fit.condition_diagnostic,
        "truncated": fit.truncated,
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.report:
        Path(args.report).write_text(text + "\n")
    return EXIT_OK


def _parse_int_list(raw: str) -> list[int]:
    return [int(tok) for tok in raw.split(",") if tok.strip()]


def cmd_sweep(args: argparse.Namespace) -> int:
    sample = load_sample(args.sample)
    W, T = sample.training_data()
    result = degree_sweep(W, T, _parse_int_list(args.degrees),
                          _parse_int_list(args.train_counts), args.trials, args.seed)
    write_fit_reports_csv(result.reports, args.output)
    for s in result.summaries:
        print(f"split={s.train_count} d={s.degree}: test mse "
              f"{s.mean_test_mse:.6e} +/- {s.std_test_mse:.2e}")
    for split, d in sorted(result.best_degree.items()):
        print(f"best degree for split {split}: d*={d}")
    return EXIT_OK


def _verify_remark() -> dict:
    w1s = np.linspace(0.0, 1.0, 101)
    path = np.array([remark_solution_path(w) for w in w1s])

    oracle = np.array([brute_force_path_1d(w) for w in w1s])
    oracle_err = float(np.abs(path - oracle).max())

    weights = np.column_stack([w1s, 1.0 - w1s])
    report = check_hoelder_bound(weights, path[:, None], alpha0=2.0, k0=2.0)
    checks = [
        {"name": "closed-form path vs brute-force grid (2e-6)",
         "passed": oracle_err <= 2e-6, "max_error": oracle_err},
        {"name": "hoelder bound over all weight pairs (1e-12)",
         "passed": report.max_violation <= 1e-12, "max_violation": report.max_violation},
    ]
    return {"builtin": "remark", "checks": checks,
            "passed": all(c["passed"] for c in checks)}


def _verify_sample(args: argparse.Namespace) -> dict:
    sample = load_sample(args.sample)
    if len(sample) == 0:
        raise DatasetFormatError("sample is empty; nothing to verify")
    args.epsilon = sample.meta.epsilon
    problem, _ = _resolve_problem(args)
    loss_err = float(np.abs(sample.losses -
                            perturbed_objectives_batch(problem, sample.thetas)).max())

    tol = sample.meta.solver.tolerance
    worst_cert = 0.0
    cert_failures = []
    for k in range(len(sample)):
        cert = subgradient_certificate(problem, tuple(sample.weights[k]), sample.thetas[k])
        worst_cert = max(worst_cert, cert.max_residual)
        if cert.max_residual > 10.0 * tol:
            cert_failures.append({"row": k, "w": sample.weights[k].tolist(),
                                  "residual": cert.max_residual})
    dom = check_weak_dominance(sample, tol=args.tol)
    checks = [
        {"name": "losses re-evaluate from theta (1e-10)",
         "passed": loss_err <= 1e-10, "max_error": loss_err},
        {"name": f"subgradient certificates (<= 10*tolerance = {10 * tol:g})",
         "passed": not cert_failures, "worst_residual": worst_cert,
         "violations": cert_failures[:20]},
        {"name": f"weak dominance scan (tol {args.tol:g})",
         "passed": dom.passed,
         "violations": dom.violations[:20], "n_violations": len(dom.violations)},
    ]
    return {"sample": str(args.sample), "records": len(sample), "checks": checks,
            "passed": all(c["passed"] for c in checks)}


def cmd_verify(args: argparse.Namespace) -> int:
    if args.builtin == "remark":
        if args.sample is not None:
            raise DatasetFormatError("--builtin remark does not take a sample file")
        report = _verify_remark()
    else:
        if args.sample is None:
            raise DatasetFormatError("give a sample file or --builtin remark")
        report = _verify_sample(args)
    print(json.dumps(report, indent=2, sort_keys=True))
    if not report["passed"]:
        raise VerificationFailure(report)
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    sample = load_sample(args.sample)
    export_model_bundle(model, sample.meta, args.output)
    print(f"bundle written to {args.output}", file=sys.stderr)
    return EXIT_OK


_CONTENT_TYPES = {
    ".json": "application/json",
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".map": "application/json",
}

_BUNDLE_FILES = {"/manifest.json", "/model.json", "/edges.json"}


def make_server(bundle_dir: str | Path, port: int, ui_dir: str | Path | None = None,
                host: str = "127.0.0.1") -> ThreadingHTTPServer:
    """Read-only HTTP file service for a bundle directory and optional UI assets.

    GET /manifest.json, /model.json and /edges.json come from the bundle; any
    other path is looked up under ``ui_dir`` when given ("/" maps to
    index.html). All responses carry a permissive CORS header.
    """
    bundle = Path(bundle_dir).resolve()
    ui = Path(ui_dir).resolve() if ui_dir else None

    class BundleHandler(BaseHTTPRequestHandler):
        server_version = f"paretobez/{__version__}"

        def log_message(self, fmt, *log_args):  # keep test output clean
            pass

        def _reply(self, status: int, body: bytes, content_type: str) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self) -> None:  # noqa: N802 (http.server API)
            path = urlsplit(self.path).path
            target: Path | None = None
            if path in _BUNDLE_FILES:
                target = bundle / path.lstrip("/")
            elif ui is not None:
                rel = "index.html" if path in ("", "/") else path.lstrip("/")
                candidate = (ui / rel).resolve()
                if candidate.is_relative_to(ui):
                    target = candidate
            if target is None or not target.is_file():
                self._reply(404, b'{"error": "not found"}\n', "application/json")
                return
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self._reply(200, target.read_bytes(), ctype)

    return ThreadingHTTPServer((host, port), BundleHandler)


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        server = make_server(args.bundle, args.port, ui_dir=args.ui_dir, host=args.host)
    except OSError as exc:
        raise DatasetFormatError(f"cannot bind {args.host}:{args.port}: {exc}") from exc
    host, port = server.server_address[:2]
    print(f"serving {args.bundle} on http://{host}:{port}/ (ctrl-c to stop)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paretobez",
                                     description="Pareto sampling and Bezier-simplex "
                                                 "surrogates for the elastic net")
    parser.add_argument("--version", action="version", version=f"paretobez {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="solve the scalarized problem on a weight grid")
    _dataset_args(p)
    _solver_args(p)
    p.add_argument("--resolution", type=int, required=True, help="grid resolution on the simplex")
    p.add_argument("--on-failure", choices=["raise", "skip"], default="raise")
    p.add_argument("--output", required=True, help="sample CSV path (sidecar written next to it)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", help="fit a Bezier simplex to a sample")
    p.add_argument("sample", help="sample CSV produced by `sample`")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--train-count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="model JSON path")
    p.add_argument("--report", help="optional path for the fit report JSON")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="degree/split sweep with repeated random splits")
    p.add_argument("sample")
    p.add_argument("--degrees", required=True, help="comma-separated degrees, e.g. 1,2,3")
    p.add_argument("--train-counts", required=True, help="comma-separated training sizes")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="per-cell CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run solver certificates and sanity checks")
    p.add_argument("sample", nargs="?", help="sample CSV to verify")
    p.add_argument("--builtin", choices=["remark", "example1", "synthetic"],
                   help="'remark' for the closed-form benchmark, otherwise the "
                        "dataset the sample was drawn from")
    p.add_argument("--data", help="dataset path when the sample came from a file")
    p.add_argument("--predictors")
    p.add_argument("--response")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--name", default="")
    p.add_argument("--synthetic-predictors", type=int, default=6)
    p.add_argument("--synthetic-observations", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-7, help="weak-dominance tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write an explorer bundle for a fitted model")
    p.add_argument("model", help="model JSON from `fit`")
    p.add_argument("--sample", required=True, help="sample CSV whose metadata describes the model")
    p.add_argument("--output", required=True, help="bundle directory")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="serve a bundle (and the explorer UI) over HTTP")
    p.add_argument("bundle", help="bundle directory from `export`")
    p.add_argument("--port", type=int, default=8437)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", help="directory with the explorer's static assets")
    p.set_defaults(func=cmd_serve)

    return parser


def _emit_error(kind: str, exc: Exception) -> None:
    payload: dict = {"error": kind, "message": str(exc)}
    if isinstance(exc, ConvergenceError):
        payload["weight"] = list(exc.weight) if exc.weight else None
        payload["sweep_delta"] = exc.sweep_delta
    if isinstance(exc, DatasetFormatError):
        payload["row"] = exc.row
        payload["column"] = exc.column if isinstance(exc.column, (int, type(None))) else str(exc.column)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        _emit_error("verification", exc)
        return EXIT_VERIFICATION
    except ConvergenceError as exc:
        _emit_error("convergence", exc)
        return EXIT_CONVERGENCE
    except (DatasetFormatError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        _emit_error("input", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
