"""Command-line interface: ``krigbound {design,study,krige}``.

Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import kriging
from .design import Design, fill_distance, format_float, maximin_lhd, min_separation, read_matrix_csv
from .errors import DuplicatePointsError, InvalidInputError, KrigboundError
from .kernels import Kernel
from .study import StudyConfig, run_study

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _threads(value):
    if value is None:
        value = os.environ.get("KRIGBOUND_THREADS", "1")
    try:
        n = int(value)
    except ValueError:
        raise UsageError(f"invalid thread count {value!r}") from None
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def _read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(obj):
    print(json.dumps(obj))


def cmd_design(args):
    if args.n < 1 or args.dim < 1:
        raise UsageError("--n and --dim must be >= 1")
    if args.budget is not None and args.budget < 0:
        raise UsageError("--budget must be >= 0")
    design = maximin_lhd(args.n, args.dim, args.seed, budget=args.budget)
    text = design.to_json() + "\n" if args.out and args.out.endswith(".json") else design.to_csv()
    if args.out:
        try:
            _write_text(args.out, text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_RUNTIME
    else:
        sys.stdout.write(text)
    report = {"n": design.n, "dim": design.dim, "h_X": fill_distance(design, args.grid_step),
              "min_separation": min_separation(design) if design.n > 1 else None}
    _emit(report)
    return EXIT_OK


def cmd_study(args):
    try:
        config = StudyConfig.from_json(_read_text(args.config))
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None
    result = run_study(config, threads=_threads(args.threads))
    try:
        os.makedirs(args.out, exist_ok=True)
        _write_text(os.path.join(args.out, "result.json"), result.to_json())
        _write_text(os.path.join(args.out, "rows.csv"), result.rows_csv())
    except OSError as exc:
        print(f"error: cannot write results: {exc.strerror}", file=sys.stderr)
        return EXIT_RUNTIME
    if result.fit is None:
        print("error: fewer than two design sizes completed; no slope", file=sys.stderr)
        _emit({"slope": None, "relative_difference": None, "partial": result.partial})
        return EXIT_RUNTIME
    _emit({"slope": result.fit.slope, "intercept": result.fit.intercept,
           "r_squared": result.fit.r_squared, "nu": config.imposed_kernel.nu,
           "relative_difference": result.relative_difference, "partial": result.partial})
    return EXIT_OK


def _load_kernel(spec, dim):
    text = spec if spec.lstrip().startswith("{") else _read_text(spec)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad kernel JSON: {exc}") from None
    if isinstance(data, dict):
        data.setdefault("dim", dim)
    try:
        return Kernel.from_dict(data)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None


def _load_matrix(path):
    try:
        return read_matrix_csv(_read_text(path))
    except InvalidInputError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_krige(args):
    pts = _load_matrix(args.design)
    values = _load_matrix(args.values)
    query = _load_matrix(args.query)
    if values.shape[1] != 1 or values.shape[0] != pts.shape[0]:
        raise UsageError(f"--values must be one column with {pts.shape[0]} rows")
    if query.shape[1] != pts.shape[1]:
        raise UsageError("--query and --design dimensions differ")
    kernel = _load_kernel(args.kernel, pts.shape[1])
    if kernel.dim != pts.shape[1]:
        raise UsageError("kernel dim does not match the design")
    lo = np.minimum(pts.min(axis=0), query.min(axis=0))
    hi = np.maximum(pts.max(axis=0), query.max(axis=0))
    from .design import Region

    try:
        design = Design(pts, Region(lo, hi))
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None
    model = kriging.fit(design, kernel, args.sigma2)
    mean, var = kriging.predict(model, values[:, 0], query)
    d = pts.shape[1]
    lines = [",".join([f"x{k + 1}" for k in range(d)] + ["mean", "variance"])]
    for p, m, v in zip(query, mean, var):
        lines.append(",".join(format_float(c) for c in (*p, m, v)))
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            _write_text(args.out, text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_RUNTIME
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="krigbound", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="generate a maximin Latin hypercube design")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="swap attempts (default 10 n^2)")
    p.add_argument("--grid-step", type=float, default=0.01, help="grid step for h_X")
    p.add_argument("--out", help="CSV path (or .json); default stdout")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("study", help="run a convergence study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", default=None, help="worker cap (env KRIGBOUND_THREADS)")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("krige", help="kriging mean and variance at query points")
    p.add_argument("--design", required=True, help="CSV of design points")
    p.add_argument("--values", required=True, help="CSV column of observed values")
    p.add_argument("--kernel", required=True, help="kernel JSON, inline or a file path")
    p.add_argument("--query", required=True, help="CSV of prediction points")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--out", help="output CSV; default stdout")
    p.set_defaults(func=cmd_krige)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DuplicatePointsError as exc:
        print(f"error: duplicate design points: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (KrigboundError, ArithmeticError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
