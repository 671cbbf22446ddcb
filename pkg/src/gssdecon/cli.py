"""Command-line interface: deconvolve a data file, run simulation tables,
or preprocess raw measurement files.

All randomness flows from --seed (fixed default 20170), and every emitted
file is byte-deterministic for a given seed and configuration; wall-clock
timing goes to stderr only. Exit codes: 0 success, 2 input parse error,
3 estimation failure, 4 configuration error.
"""

import argparse
import json
import os
import sys
import time
import warnings

import numpy as np

from .bandwidth import plugin_bandwidth
from .distributions import ErrorModel
from .errors import EstimationFailureError, GssDeconError
from .estimator import np_fit
from .harness import (
    DEFAULT_REPLICATES,
    DEFAULT_SEED,
    SELECTION_KEYS,
    SimConfig,
    run_selection_tables,
    run_table1,
    run_table2,
)
from .ingestion import ParseError, harmonize_pairs, read_numeric_csv, replicate_average, write_series_csv
from .selection import run_pipeline

EXIT_PARSE = 2
EXIT_ESTIMATION = 3
EXIT_CONFIG = 4


def _default_threads() -> int:
    env = os.environ.get("GSSDECON_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gssdecon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_dec = sub.add_parser("deconvolve", help="fit the GSS deconvolution estimator to a data file")
    p_dec.add_argument("--input", required=True, help="CSV with one numeric column (header required)")
    p_dec.add_argument("--error", choices=["normal", "laplace"], required=True)
    p_dec.add_argument("--error-var", type=float, required=True, help="variance of the measurement error")
    p_dec.add_argument("--bandwidth", choices=["cv", "mise", "plugin"], default="mise")
    p_dec.add_argument("--select", choices=["skewness", "phase", "random", "minise"], default="phase")
    p_dec.add_argument("--moments", type=int, default=5, help="number of even moments M")
    p_dec.add_argument("--kappa", type=float, default=5.0)
    p_dec.add_argument("--tstar", type=float, default=None, help="phase window; default chosen from the data")
    p_dec.add_argument("--grid-points", type=int, default=401)
    p_dec.add_argument("--with-np", action="store_true", help="also tabulate the nonparametric estimate")
    p_dec.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_dec.add_argument("--threads", type=int, default=None)
    p_dec.add_argument("--output-prefix", default="deconv")

    p_sim = sub.add_parser("simulate", help="run a simulation table from a JSON configuration")
    p_sim.add_argument("--config", required=True, help="JSON file describing the table and configurations")
    p_sim.add_argument("--threads", type=int, default=None)
    p_sim.add_argument("--output-prefix", default="sim")

    p_ing = sub.add_parser("ingest", help="preprocess paired or replicate measurement files")
    p_ing.add_argument("--input", required=True)
    p_ing.add_argument("--mode", choices=["paired", "replicate"], required=True)
    p_ing.add_argument("--shift", type=float, default=50.0)
    log_group = p_ing.add_mutually_exclusive_group()
    log_group.add_argument("--log", dest="log", action="store_true", default=True)
    log_group.add_argument("--no-log", dest="log", action="store_false")
    p_ing.add_argument("--output-prefix", default="ingest")
    return parser


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_density_csv(path, columns: dict):
    keys = list(columns)
    arr = np.column_stack([columns[k] for k in keys])
    with open(path, "w") as fh:
        fh.write(",".join(keys) + "\n")
        for row in arr:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def cmd_deconvolve(args) -> int:
    started = time.perf_counter()
    if args.error_var < 0:
        print("error: --error-var must be nonnegative", file=sys.stderr)
        return EXIT_CONFIG
    if not 2 <= args.moments <= 5:
        print("error: --moments must be between 2 and 5", file=sys.stderr)
        return EXIT_CONFIG
    try:
        data = read_numeric_csv(args.input, n_columns=1)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    w = data[:, 0]
    model = ErrorModel(args.error, args.error_var)
    try:
        result = run_pipeline(
            w,
            model,
            bandwidth=args.bandwidth,
            selection=args.select,
            M=args.moments,
            kappa=args.kappa,
            t_star=args.tstar,
            seed=args.seed,
            return_details=True,
        )
    except (EstimationFailureError, GssDeconError) as exc:
        print(f"error: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    fit = result.fit
    xs = np.linspace(fit.xi - 5.0 * fit.omega, fit.xi + 5.0 * fit.omega, args.grid_points)
    columns = {"x": xs, "f_gss": np.asarray(fit.pdf(xs))}
    report = {
        "config": {
            "input": os.path.basename(args.input),
            "error": args.error,
            "error_var": args.error_var,
            "bandwidth": args.bandwidth,
            "select": args.select,
            "moments": args.moments,
            "kappa": args.kappa,
            "tstar": args.tstar,
            "grid_points": args.grid_points,
            "with_np": bool(args.with_np),
            "seed": args.seed,
        },
        "n": int(w.size),
        "candidates": [
            {
                "xi": s.xi,
                "omega": s.omega,
                "d_value": s.d_value,
                "bandwidth": result.bandwidths[i],
                "score": result.record.scores[i],
            }
            for i, s in enumerate(result.solutions)
        ],
        "selection": {
            "criterion": result.record.criterion,
            "chosen": result.record.chosen,
            "t_star": result.record.t_star,
        },
        "chosen": {"xi": fit.xi, "omega": fit.omega, "bandwidth": fit.h},
        "density_csv": f"{args.output_prefix}_density.csv",
    }
    if args.with_np:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            h_np = plugin_bandwidth(w, model)
            npf = np_fit(w, model, h_np, xgrid=xs)
        columns["f_np"] = npf.density
        report["np_bandwidth"] = h_np
    _write_density_csv(f"{args.output_prefix}_density.csv", columns)
    _write_json(f"{args.output_prefix}_report.json", report)
    print(f"elapsed: {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0


def _sim_configs(payload) -> list[SimConfig]:
    fields = {"skew", "error_family", "nsr", "n", "replicates", "seed", "M", "bandwidth", "kappa"}
    configs = []
    for entry in payload:
        unknown = set(entry) - fields
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        entry = dict(entry)
        entry.setdefault("replicates", DEFAULT_REPLICATES)
        entry.setdefault("seed", DEFAULT_SEED)
        configs.append(SimConfig(**entry))
    return configs


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    try:
        with open(args.config) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    workers = args.threads if args.threads is not None else _default_threads()
    try:
        table = payload["table"]
        configs = _sim_configs(payload["configs"])
        if table == "table1":
            results = run_table1(configs, m_values=tuple(payload.get("m_values", (2, 5))), workers=workers)
        elif table == "table2":
            results = run_table2(configs, workers=workers)
        elif table == "selection":
            results = run_selection_tables(
                configs,
                bandwidths=tuple(payload.get("bandwidths", ("mise",))),
                selections=tuple(payload.get("selections", SELECTION_KEYS)),
                workers=workers,
            )
        else:
            raise ValueError(f"unknown table: {table!r}")
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EstimationFailureError as exc:
        print(f"error: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    for i, result in enumerate(results):
        stem = f"{args.output_prefix}_{i:02d}"
        result.to_json(f"{stem}_summary.json")
        result.to_csv(f"{stem}_replicates.csv")
    print(f"elapsed: {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0


def cmd_ingest(args) -> int:
    try:
        if args.mode == "paired":
            data = read_numeric_csv(args.input, n_columns=2)
            result = harmonize_pairs(data)
        else:
            data = read_numeric_csv(args.input)
            if data.shape[1] not in (2, 4):
                print("error: replicate mode expects 2 or 4 columns", file=sys.stderr)
                return EXIT_CONFIG
            result = replicate_average(data, shift=args.shift, log=args.log)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GssDeconError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    write_series_csv(f"{args.output_prefix}_w.csv", result.w)
    _write_json(f"{args.output_prefix}_estimates.json", result.summary())
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "deconvolve":
        return cmd_deconvolve(args)
    if args.command == "simulate":
        return cmd_simulate(args)
    return cmd_ingest(args)


if __name__ == "__main__":
    sys.exit(main())
