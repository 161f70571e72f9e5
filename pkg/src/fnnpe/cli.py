"""Command-line surface.

Each subcommand is a thin wrapper over one library call and prints a
report document as JSON (bench can emit CSV instead).  Failures exit
nonzero with a one-line JSON error object on stderr.  FNNPE_THREADS
caps internal parallelism; SOURCE_DATE_EPOCH pins report timestamps.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import MIN_REPEATS, rows_to_csv, run_benchmark
from .core import DEFAULT_C_DIM, DEFAULT_C_SMOOTH, DEFAULT_C_SPARSITY, select_params
from .fjlt import sample_fjlt
from .io import (
    DATASET_FORMATS,
    load_dataset,
    make_report,
    save_dataset,
    save_transform,
    write_report,
)
from .metrics import doubling_constant_exact, doubling_constant_greedy
from .suites import SUITE_NAMES, run_suite

# verify exposes one generic --trials knob; per suite it lands on the
# argument that counts repetitions there.
_TRIALS_KEY = {
    "smoothness": "n_diagonals",
    "zi": "trials",
    "distortion": "trials",
    "shrinkage": "trials",
    "nn": "resamplings",
    "gaussian-appendix": "trials",
}


def _emit(args, report) -> int:
    text = write_report(report, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _add_common(parser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="base seed; equal seeds give equal output")
    parser.add_argument("--out", type=Path, default=None, help="write the report to this file instead of stdout")


def _add_param_flags(parser) -> None:
    parser.add_argument("--eps", type=float, default=0.5, help="relative distance error, in (0,1)")
    parser.add_argument("--delta", type=float, default=0.1, help="failure budget, in (0,1/2)")
    parser.add_argument("--lambda", dest="lam", type=float, default=2.0, help="doubling constant of the data")
    parser.add_argument("--c-dim", type=float, default=DEFAULT_C_DIM)
    parser.add_argument("--c-sparsity", type=float, default=DEFAULT_C_SPARSITY)
    parser.add_argument("--c-smooth", type=float, default=DEFAULT_C_SMOOTH)


def _param_echo(args, **extra) -> dict:
    echo = {
        "seed": args.seed,
        "eps": args.eps,
        "delta": args.delta,
        "lambda": args.lam,
        "c_dim": args.c_dim,
        "c_sparsity": args.c_sparsity,
        "c_smooth": args.c_smooth,
    }
    echo.update(extra)
    return echo


def cmd_params(args) -> int:
    params = select_params(
        args.n, args.d, args.eps, args.delta, args.lam,
        c_smooth=args.c_smooth, c_sparsity=args.c_sparsity, c_dim=args.c_dim,
    )
    report = make_report("params", _param_echo(args, n=args.n, d=args.d), params.to_dict())
    return _emit(args, report)


def cmd_doubling(args) -> int:
    dataset = load_dataset(args.input, args.format)
    if args.mode == "exact":
        estimate = doubling_constant_exact(dataset)
    else:
        estimate = doubling_constant_greedy(
            dataset, radii_per_scale=args.radii_per_scale,
            sample_centers=args.centers, seed=args.seed,
        )
    payload = {
        "value": estimate.value,
        "method": estimate.method,
        "is_exact": estimate.is_exact,
        "witness_center": int(estimate.witness[0]),
        "witness_radius": float(estimate.witness[1]),
        "witness_size": int(estimate.witness[2]),
        "radii_probed": len(estimate.radii_probed),
    }
    echo = {
        "input": str(args.input), "format": args.format, "mode": args.mode,
        "radii_per_scale": args.radii_per_scale, "centers": args.centers, "seed": args.seed,
    }
    return _emit(args, make_report("doubling", echo, payload))


def cmd_embed(args) -> int:
    dataset = load_dataset(args.input, args.format)
    params = select_params(
        dataset.n, dataset.d, args.eps, args.delta, args.lam,
        c_smooth=args.c_smooth, c_sparsity=args.c_sparsity, c_dim=args.c_dim,
    )
    transform = sample_fjlt(params, args.seed)
    embedded = transform.apply_batch(dataset, normalized=True)
    prefix = args.out if args.out is not None else Path(args.input).with_suffix(".embedded")
    data_path = Path(f"{prefix}.{args.format}")
    transform_path = Path(f"{prefix}.transform.json")
    save_dataset(embedded, data_path, args.format)
    save_transform(transform, transform_path)
    payload = {
        "params": params.to_dict(),
        "nnz": transform.projection.nnz,
        "embedded_path": str(data_path),
        "transform_path": str(transform_path),
    }
    echo = _param_echo(args, input=str(args.input), format=args.format)
    report = make_report("embed", echo, payload)
    sys.stdout.write(write_report(report, None))
    return 0


def cmd_verify(args) -> int:
    kwargs = {"seed": args.seed}
    if args.trials is not None:
        kwargs[_TRIALS_KEY[args.suite]] = args.trials
    if args.suite in ("distortion", "nn"):
        kwargs.update(epsilon=args.eps, delta=args.delta)
    if args.n is not None and args.suite != "gaussian-appendix":
        kwargs["n"] = args.n
    if args.d is not None and args.suite not in ("gaussian-appendix", "shrinkage"):
        kwargs["d"] = args.d
    payload = run_suite(args.suite, **kwargs)
    echo = {"suite": args.suite, **kwargs, "eps": args.eps, "delta": args.delta}
    return _emit(args, make_report(f"verify {args.suite}", echo, payload))


def cmd_bench(args) -> int:
    d_grid = tuple(int(tok) for tok in args.d.split(","))
    n_grid = tuple(int(tok) for tok in args.n.split(","))
    rows = run_benchmark(
        d_grid=d_grid, n_grid=n_grid, epsilon=args.eps, delta=args.delta,
        lam=args.lam, repeats=args.repeats, seed=args.seed,
    )
    if args.table_format == "csv":
        text = rows_to_csv(rows)
        if args.out is not None:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    echo = {
        "d": list(d_grid), "n": list(n_grid), "eps": args.eps, "delta": args.delta,
        "lambda": args.lam, "repeats": args.repeats, "seed": args.seed,
    }
    payload = [row.to_dict() for row in rows]
    return _emit(args, make_report("bench", echo, payload))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fnnpe",
        description="Nearest-neighbor preserving embeddings via the fast JL transform.",
        epilog="Environment: FNNPE_THREADS caps worker threads; "
        "SOURCE_DATE_EPOCH pins report timestamps for reproducible output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print the selected embedding parameters for (n, d, eps, delta, lambda)")
    p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--d", type=int, required=True, help="input dimension (power of two)")
    _add_param_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("doubling", help="estimate the doubling constant of a dataset file")
    p.add_argument("--input", required=True, help="dataset file")
    p.add_argument("--format", choices=DATASET_FORMATS, default="fvecs")
    p.add_argument("--mode", choices=("exact", "greedy"), default="greedy")
    p.add_argument("--radii-per-scale", type=int, default=32)
    p.add_argument("--centers", type=int, default=64)
    _add_common(p)
    p.set_defaults(func=cmd_doubling)

    p = sub.add_parser("embed", help="embed a dataset file and write the transform next to it")
    p.add_argument("--input", required=True, help="dataset file")
    p.add_argument("--format", choices=DATASET_FORMATS, default="fvecs")
    _add_param_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", help="run a named verification suite and print its report")
    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("--trials", type=int, default=None, help="repetition count for the suite")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    _add_param_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time the structured transform against a dense Gaussian map")
    p.add_argument("--d", default="1024,4096", help="comma-separated input dimensions")
    p.add_argument("--n", default="256", help="comma-separated point counts")
    p.add_argument("--repeats", type=int, default=MIN_REPEATS)
    p.add_argument("--format", dest="table_format", choices=("json", "csv"), default="json")
    _add_param_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface module errors as machine-readable JSON
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
