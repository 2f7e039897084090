"""Command-line front end: ``generate``, ``cluster``, ``eval`` and ``bench``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import metrics
from .dataset import SHAPES, DataError, PointSet, generate, inject_noise, load_csv, save_csv, standardize
from .spectral import GAP_RULES, ClusterConfig, cluster

NOISE_LEVELS = (0.1, 0.2, 0.3, 0.4, 0.5)
SYNTHETIC_SUITE = ("rings", "lines", "blobs", "sparse_blobs")
NOISE_SUITE = ("lines", "rings", "blobs")
SUMMARY_FIELDS = ["suite", "dataset", "noise", "c_mode", "repeats",
                  "acc_mean", "acc_std", "ari_mean", "ari_std", "nmi_mean", "nmi_std",
                  "ari_structure_mean", "ari_structure_std", "e_percent_mean", "e_percent_std",
                  "C_mean", "C_std"]
TIMING_FIELDS = ["suite", "dataset", "noise", "c_mode", "repeats", "time_mean_s", "time_std_s"]


class CliError(Exception):
    """User-facing failure; reported as JSON on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# argument helpers

def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _centers(text):
    try:
        return [[float(v) for v in pt.split(",")] for pt in text.split(";") if pt.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected centers like '0,0;5,0', got {text!r}")


def _c_value(text):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--c takes an integer or 'auto', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("--c must be >= 1")
    return value


def _on_off(text):
    if text.lower() in ("on", "true", "1", "yes"):
        return True
    if text.lower() in ("off", "false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {text!r}")


def _add_generator_args(p):
    g = p.add_argument_group("generator parameters")
    g.add_argument("--n", type=_int_list, help="points per class, e.g. 300,300 (blobs: one value per blob)")
    g.add_argument("--r", type=_float_list, help="ring radii, e.g. 1,3")
    g.add_argument("--jitter", type=float, help="Gaussian jitter for rings and lines")
    g.add_argument("--length", type=float, help="line length")
    g.add_argument("--spacing", type=float, help="distance between lines")
    g.add_argument("--centers", type=_centers, help="blob centers, e.g. '0,0;10,0;0,10'")
    g.add_argument("--spread", type=_float_list, help="blob std (one value, or one per blob)")
    g.add_argument("--noise", type=float, help="fraction of uniform noise points to append")


def _generator_params(args):
    shape = args.shape
    params = {}
    if args.n is not None:
        if shape == "blobs":
            if len(set(args.n)) != 1:
                raise CliError("blobs take a single --n value; use sparse_blobs for unequal sizes")
            params["n_per"] = args.n[0]
        else:
            params["counts"] = args.n
    if args.r is not None:
        if shape != "rings":
            raise CliError("--r applies to rings only")
        params["radii"] = args.r
    for name in ("jitter", "length", "spacing"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    if args.centers is not None:
        params["centers"] = args.centers
    if args.spread is not None:
        if shape == "blobs":
            if len(set(args.spread)) != 1:
                raise CliError("blobs take a single --spread value")
            params["spread"] = args.spread[0]
        else:
            params["spreads"] = args.spread
    return params


def _generated(shape, params, noise, seed):
    ps = generate(shape, params, seed=seed)
    if noise:
        # noise draws use a different stream than the structure points
        ps = inject_noise(ps, noise, seed=seed + 1)
    return ps


def _resolve_label_column(path, column):
    """Map --label-column (index or header name) to a 0-based index; auto-detect 'label'."""
    if column is not None and column.lstrip("-").isdigit():
        return int(column)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            header = next(csv.reader(fh), [])
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    names = [h.strip().lower() for h in header]
    if column is None:
        return names.index("label") if "label" in names else None
    if column.lower() not in names:
        raise CliError(f"label column {column!r} not found in header of {path}")
    return names.index(column.lower())


def read_labels(path, column=None):
    """Label vector from a CSV: the named/indexed column, else 'label', else the last column."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows:
        raise DataError(f"{path} contains no labels")
    header = [h.strip().lower() for h in rows[0]]
    has_header = any(_not_number(c) for c in rows[0]) and (len(rows[0]) > 1 or column is not None
                                                         or "label" in header)
    if column is None:
        col = header.index("label") if has_header and "label" in header else len(rows[0]) - 1
    elif column.lstrip("-").isdigit():
        col = int(column)
    else:
        if column.lower() not in header:
            raise CliError(f"label column {column!r} not found in header of {path}")
        col, has_header = header.index(column.lower()), True
    body = rows[1:] if has_header else rows
    out = []
    for line, row in enumerate(body, start=2 if has_header else 1):
        if col >= len(row):
            raise DataError("missing label cell", row=line, column=col + 1)
        out.append(row[col].strip())
    return np.array(out)


def _not_number(text):
    try:
        float(text)
        return False
    except ValueError:
        return True


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands

def cmd_generate(args):
    ps = _generated(args.shape, _generator_params(args), args.noise, args.seed)
    out = Path(args.output) if args.output else Path(f"{args.shape}.csv")
    try:
        save_csv(ps, out)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}") from exc
    print(json.dumps({"output": str(out), "n": ps.n, "d": ps.d, "classes": ps.n_classes}))
    return 0


def _run_config(args, source):
    return {
        "input": source,
        "label_column": args.label_column,
        "standardize": args.standardize,
        "k_max": args.k_max,
        "baseline_n": args.baseline_n,
        "scale_k": args.scale_k,
        "C": args.c,
        "lambda_max": args.lambda_max,
        "seed": args.seed,
        "row_normalize": args.row_normalize,
        "gap_rule": args.gap_rule,
        "gap_floor": args.gap_floor,
        "out_dir": str(args.out_dir),
    }


def cmd_cluster(args):
    path = args.input_pos or args.input
    if (path is None) == (args.generate is None):
        raise CliError("give exactly one of an input CSV or --generate SHAPE")
    if path is not None:
        source = {"path": str(path)}
        ps = load_csv(path, _resolve_label_column(path, args.label_column))
    else:
        args.shape = args.generate
        params = _generator_params(args)
        source = {"generate": args.generate, "params": params, "noise": args.noise}
        ps = _generated(args.generate, params, args.noise, args.seed)
    if args.standardize:
        ps = standardize(ps)

    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out_dir}: {exc.strerror or exc}") from exc

    config = ClusterConfig(k_max=args.k_max, baseline_n=args.baseline_n, scale_k=args.scale_k,
                           C=args.c, lambda_max=args.lambda_max, seed=args.seed,
                           row_normalize=args.row_normalize, gap_rule=args.gap_rule,
                           gap_floor=args.gap_floor)
    report = cluster(ps, config)
    body = {"run_config": _run_config(args, source), **report.to_dict()}
    _write_json(out_dir / "report.json", body)
    with open(out_dir / "labels.csv", "w", encoding="utf-8") as fh:
        fh.writelines(f"{int(v)}\n" for v in report.labels)
    if ps.d == 2 and not args.no_plot:
        from .plotting import scatter

        scatter(ps.points, report.labels, out_dir / "scatter.svg", isolated=report.isolated,
                title=f"{ps.name}: C={report.C} ({report.C_source})")
    summary = {"out_dir": str(out_dir), "C": report.C, "C_source": report.C_source,
               "e_percent": report.e_percent}
    if report.metrics:
        summary["metrics"] = report.metrics
    print(json.dumps(summary))
    return 0


def cmd_eval(args):
    truth = read_labels(args.truth, args.truth_column)
    pred = read_labels(args.pred, args.pred_column)
    if truth.size != pred.size:
        raise CliError(f"label files differ in length: {truth.size} vs {pred.size}")
    result = metrics.evaluate(truth, pred)
    if args.output:
        _write_json(args.output, result)
    print(json.dumps(result))
    return 0


def _bench_datasets(suite, names):
    pool = SYNTHETIC_SUITE if suite == "synthetic" else NOISE_SUITE
    if not names:
        return list(pool)
    bad = [n for n in names if n not in pool]
    if bad:
        raise CliError(f"unknown {suite} dataset(s): {', '.join(bad)}")
    return names


def _bench_cells(suite, datasets):
    if suite == "synthetic":
        return [(name, 0.0, mode) for name in datasets for mode in ("given", "auto")]
    return [(name, level, "given") for name in datasets for level in NOISE_LEVELS]


def _one_run(name, noise, c_mode, run_seed):
    ps = _generated(name, None, noise, run_seed)
    n_classes = ps.n_classes - (1 if ps.noise_label is not None else 0)
    t0 = time.perf_counter()
    rep = cluster(ps, C=n_classes if c_mode == "given" else "auto", seed=run_seed)
    elapsed = time.perf_counter() - t0
    structure = rep.metrics_without_noise or rep.metrics
    return {**rep.metrics, "ari_structure": structure["ari"], "e_percent": rep.e_percent,
            "C": rep.C, "time": elapsed}


def _fmt(x):
    return repr(round(float(x), 10))


def cmd_bench(args):
    if args.repeats < 1:
        raise CliError("--repeats must be >= 1")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasets = _bench_datasets(args.suite, args.datasets)
    rows = []
    summary_path, timing_path = out_dir / "summary.csv", out_dir / "timing.csv"
    with open(summary_path, "w", newline="", encoding="utf-8") as sfh, \
            open(timing_path, "w", newline="", encoding="utf-8") as tfh:
        sw = csv.DictWriter(sfh, SUMMARY_FIELDS, lineterminator="\n")
        tw = csv.DictWriter(tfh, TIMING_FIELDS, lineterminator="\n")
        sw.writeheader()
        tw.writeheader()
        for name, noise, mode in _bench_cells(args.suite, datasets):
            runs = [_one_run(name, noise, mode, args.seed + r) for r in range(args.repeats)]
            row = {"suite": args.suite, "dataset": name, "noise": noise, "c_mode": mode,
                   "repeats": args.repeats}
            for key in ("acc", "ari", "nmi", "ari_structure", "e_percent", "C"):
                vals = np.array([r[key] for r in runs], dtype=float)
                row[f"{key}_mean"], row[f"{key}_std"] = float(vals.mean()), float(vals.std())
            times = np.array([r["time"] for r in runs])
            rows.append(row)
            sw.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in row.items()})
            tw.writerow({"suite": args.suite, "dataset": name, "noise": noise, "c_mode": mode,
                         "repeats": args.repeats, "time_mean_s": f"{times.mean():.4f}",
                         "time_std_s": f"{times.std():.4f}"})
            # flush per cell so an interrupted run keeps its finished rows
            sfh.flush()
            tfh.flush()

    _write_json(out_dir / "bench_config.json",
                {"suite": args.suite, "datasets": datasets, "repeats": args.repeats,
                 "seed": args.seed, "run_seeds": f"seed + run_index for run_index in 0..{args.repeats - 1}"})
    from .plotting import noise_curve, score_bars

    if args.suite == "noise":
        noise_curve(rows, out_dir / "ari_vs_noise.svg", "ari")
        noise_curve(rows, out_dir / "ari_structure_vs_noise.svg", "ari_structure")
    else:
        score_bars(rows, out_dir / "scores.svg")
    print(json.dumps({"out_dir": str(out_dir), "rows": len(rows)}))
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rknn-spectral",
                                     description="Spectral clustering on a refined kNN graph.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log pipeline warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic labeled dataset as CSV")
    p.add_argument("shape", choices=SHAPES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="output CSV (default: <shape>.csv)")
    _add_generator_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="cluster a CSV or a generated dataset")
    p.add_argument("input_pos", nargs="?", metavar="INPUT", help="input CSV")
    p.add_argument("--input", help="input CSV (alternative to the positional form)")
    p.add_argument("--generate", choices=SHAPES, help="cluster a generated dataset instead")
    p.add_argument("--label-column", help="ground-truth column (index or header name); "
                                          "a column named 'label' is used automatically")
    p.add_argument("--standardize", action="store_true", help="z-score each feature first")
    p.add_argument("--k-max", type=int, help="neighbors examined per point")
    p.add_argument("--baseline-n", type=int, default=7, help="baseline neighbor count (default 7)")
    p.add_argument("--scale-k", type=int, default=7, help="neighbor rank used as local scale (default 7)")
    p.add_argument("--c", type=_c_value, default="auto", help="number of clusters or 'auto'")
    p.add_argument("--lambda-max", type=int, default=25, help="eigenpairs computed (default 25)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--row-normalize", type=_on_off, default=True, metavar="{on,off}")
    p.add_argument("--gap-rule", choices=GAP_RULES, default="threshold")
    p.add_argument("--gap-floor", type=float, default=0.0,
                   help="lower bound on the gap-scan std as a fraction of the gamma range (default 0)")
    p.add_argument("--out-dir", default="out", help="output directory (default: out)")
    p.add_argument("--no-plot", action="store_true", help="skip scatter.svg")
    _add_generator_args(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="score a predicted labeling against ground truth")
    p.add_argument("truth")
    p.add_argument("pred")
    p.add_argument("--truth-column")
    p.add_argument("--pred-column")
    p.add_argument("-o", "--output", help="also write the metrics JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="repeated runs over the synthetic or noise suite")
    p.add_argument("suite", choices=("synthetic", "noise"))
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--datasets", nargs="+", help="restrict to these datasets")
    p.add_argument("--out-dir", "--out", dest="out_dir", default="bench_out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        import logging

        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, DataError, ValueError, RuntimeError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        if isinstance(exc, DataError):
            err.update(row=exc.row, column=exc.column)
        print(json.dumps(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
