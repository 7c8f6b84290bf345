"""Command-line surface for the measure suite.

Subcommands: ``normalize``, ``measure``, ``select``, ``sweep``,
``correlate``, ``synth``, and ``replay``. Data goes to ``--out`` (or
standard output); diagnostics go to the error stream. Exit codes: 0 on
success, 1 on validation/usage errors, 2 on internal errors.

Outputs are byte-identical across reruns on identical inputs; an
optional timestamp (``--timestamp``) lands only in JSON report metadata
and is off by default. Relative ``--out`` paths resolve against
``GBQEVAL_OUT_DIR`` when that variable is set.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import traceback
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from . import harness
from .core import DEFAULT_PARAMS, MeasureParams, zscore_l2_normalize
from .errors import GbqEvalError, InputValidationError
from .harness import (
    CRITERIA_TABLE_COLUMNS,
    RECORD_COLUMNS,
    ModelRun,
    SweepGrid,
    criteria_table,
    evaluate_runs,
    load_precomputed_csv,
    load_runs,
    pearson_correlation,
    record_rows,
    report_meta,
    selectable_measures,
    spearman_correlation,
    write_embeddings,
    write_report_csv,
    write_report_json,
)
from .synth import EmbeddingSpec, synth_embeddings
from .embeddings import dgbqa_scores

OUT_DIR_ENV = "GBQEVAL_OUT_DIR"


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("measure parameters")
    group.add_argument("--lambda", dest="lambda_", type=float, default=DEFAULT_PARAMS.lambda_)
    group.add_argument("--kappa", type=float, default=DEFAULT_PARAMS.kappa)
    group.add_argument("--nu", type=float, default=DEFAULT_PARAMS.nu)
    group.add_argument("--beta", type=float, default=DEFAULT_PARAMS.beta)
    group.add_argument("--gamma", type=float, default=DEFAULT_PARAMS.gamma)


def _add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    parser.add_argument(
        "--timestamp",
        action="store_true",
        help="include a generation timestamp in JSON metadata",
    )


def _params_from_args(args: argparse.Namespace) -> MeasureParams:
    return MeasureParams(
        lambda_=args.lambda_,
        kappa=args.kappa,
        nu=args.nu,
        beta=args.beta,
        gamma=args.gamma,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbqeval",
        description="Evaluate, select, and ablate gesture-biometric score sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="z-score + l2 normalize a scores file")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("measure", help="full measure records for every run")
    p.add_argument("--scores", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--embeddings", help="directory of <run_id>.emb files")
    p.add_argument("--jobs", type=int, default=1)
    _add_param_flags(p)
    _add_report_flags(p)

    p = sub.add_parser("select", help="per-measure winners with criteria")
    p.add_argument("--scores")
    p.add_argument("--gt")
    p.add_argument("--embeddings")
    p.add_argument("--precomputed", help="replay fixture (run_id,measure,value)")
    p.add_argument(
        "--measure",
        action="append",
        dest="measures",
        help="measure to select on; repeatable, default: all available",
    )
    _add_param_flags(p)
    _add_report_flags(p)

    p = sub.add_parser("sweep", help="nAr_star across one scaling-factor grid")
    p.add_argument("--scores", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--run", required=True, help="run_id to sweep")
    p.add_argument("--param", required=True, choices=("lambda", "kappa", "nu", "beta"))
    p.add_argument("--values", help="comma-separated grid, default 0.25..4")
    _add_param_flags(p)
    _add_report_flags(p)

    p = sub.add_parser("correlate", help="correlation matrix over measures")
    p.add_argument("--scores")
    p.add_argument("--gt")
    p.add_argument("--embeddings")
    p.add_argument("--precomputed")
    p.add_argument("--measures", help="comma-separated list, default: shared measures")
    p.add_argument("--method", choices=("pearson", "spearman"), default="pearson")
    _add_param_flags(p)
    _add_report_flags(p)

    p = sub.add_parser("synth", help="generate synthetic fixture files")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--gestures", type=int, default=6)
    p.add_argument("--identities", type=int, default=5)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--spread", type=float, default=0.1)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binary-embeddings", action="store_true")

    p = sub.add_parser("replay", help="Table-style report from precomputed values")
    p.add_argument("--precomputed", required=True)
    p.add_argument("--measure", action="append", dest="measures")
    _add_param_flags(p)
    _add_report_flags(p)

    return parser


@contextmanager
def _open_out(out: str):
    if out == "-":
        yield sys.stdout
        return
    path = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _emit(args, rows, columns, meta_extra=None) -> None:
    params = _params_from_args(args)
    with _open_out(args.out) as out:
        if args.format == "json":
            meta = report_meta(params, meta_extra)
            if args.timestamp:
                meta["generated_at"] = datetime.now(timezone.utc).isoformat()
            write_report_json(rows, columns, out, meta)
        else:
            write_report_csv(rows, columns, out)


def _load_records(args) -> list:
    """Records from either a replay fixture or raw scores + ground truth."""
    if args.precomputed and (args.scores or args.gt):
        raise InputValidationError("--precomputed excludes --scores/--gt")
    params = _params_from_args(args)
    if args.precomputed:
        runs = load_precomputed_csv(args.precomputed)
        gt = None
    else:
        if not (args.scores and args.gt):
            raise InputValidationError("need --scores and --gt, or --precomputed")
        runs, gt = load_runs(args.scores, args.gt, args.embeddings)
    return [harness.evaluate_run(run, gt, params) for run in runs]


def _cmd_normalize(args) -> int:
    runs, _ = _load_scores_only(args.scores)
    with _open_out(args.out) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["run_id", "gesture_id", "score"])
        for run_id, scores in runs.items():
            normalized = zscore_l2_normalize(scores)
            for gid, value in zip(normalized.gesture_ids, normalized.values):
                writer.writerow([run_id, gid, repr(float(value))])
    return 0


def _load_scores_only(path: str):
    """Scores file without a ground truth: gesture order per first run."""
    rows = harness._read_csv_rows(Path(path), ("run_id", "gesture_id", "score"))
    order: list[str] = []
    for _, gesture_id, _ in rows:
        if gesture_id not in order:
            order.append(gesture_id)
    return harness.load_scores_csv(path, order), order


def _cmd_measure(args) -> int:
    runs, gt = load_runs(args.scores, args.gt, args.embeddings)
    records = evaluate_runs(runs, gt, _params_from_args(args), jobs=args.jobs)
    _emit(args, record_rows(records), RECORD_COLUMNS)
    return 0


def _cmd_select(args) -> int:
    records = _load_records(args)
    rows = criteria_table(records, args.measures, _params_from_args(args))
    _emit(args, rows, CRITERIA_TABLE_COLUMNS)
    return 0


def _cmd_sweep(args) -> int:
    runs, gt = load_runs(args.scores, args.gt, args.embeddings)
    matches = [run for run in runs if run.run_id == args.run]
    if not matches:
        raise InputValidationError(f"run {args.run!r} not found in {args.scores}")
    if args.values:
        try:
            values = tuple(float(v) for v in args.values.split(","))
        except ValueError:
            raise InputValidationError(f"--values must be comma-separated numbers, got {args.values!r}")
    else:
        values = SweepGrid(args.param).values
    grid = SweepGrid(args.param, values)
    points = harness.ablation_sweep(matches[0], gt, grid, _params_from_args(args))
    rows = [
        {"parameter": args.param, "value": value, "nAr_star": score}
        for value, score in points
    ]
    _emit(args, rows, ("parameter", "value", "nAr_star"), {"run": args.run})
    return 0


def _cmd_correlate(args) -> int:
    records = _load_records(args)
    if args.measures:
        measures = [m.strip() for m in args.measures.split(",") if m.strip()]
    else:
        measures = [
            m
            for m in selectable_measures(records)
            if all(r.value(m) is not None for r in records)
        ]
    correlate = pearson_correlation if args.method == "pearson" else spearman_correlation
    rows = []
    for mx in measures:
        for my in measures:
            rows.append(
                {
                    "measure_x": mx,
                    "measure_y": my,
                    "coefficient": correlate(records, mx, my),
                }
            )
    _emit(
        args,
        rows,
        ("measure_x", "measure_y", "coefficient"),
        {"correlation": args.method},
    )
    return 0


def _cmd_synth(args) -> int:
    spec = EmbeddingSpec(
        gestures=args.gestures,
        identities=args.identities,
        samples_per_cell=args.samples,
        dim=args.dim,
        separation=args.separation,
        spread=args.spread,
        entanglement_rho=args.rho,
        seed=args.seed,
    )
    out_dir = Path(args.out_dir)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not out_dir.is_absolute():
        out_dir = Path(base) / out_dir
    (out_dir / "embeddings").mkdir(parents=True, exist_ok=True)

    emb = synth_embeddings(spec)
    run_id = f"synth-rho{spec.entanglement_rho:g}-seed{spec.seed}"
    write_embeddings(out_dir / "embeddings" / f"{run_id}.emb", emb, args.binary_embeddings)

    scores = dgbqa_scores(emb)
    with open(out_dir / "scores.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["run_id", "gesture_id", "score"])
        for gid, value in zip(scores.gesture_ids, scores.values):
            writer.writerow([run_id, gid, repr(float(value))])

    eer = np.linspace(5.0, 45.0, spec.gestures)
    with open(out_dir / "gt.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["gesture_id", "eer_percent"])
        for gid, value in zip(scores.gesture_ids, eer):
            writer.writerow([gid, repr(float(value))])

    print(f"wrote scores.csv, gt.csv, embeddings/{run_id}.emb to {out_dir}", file=sys.stderr)
    return 0


def _cmd_replay(args) -> int:
    records = [
        harness.evaluate_run(run, None, _params_from_args(args))
        for run in load_precomputed_csv(args.precomputed)
    ]
    rows = criteria_table(records, args.measures, _params_from_args(args))
    _emit(args, rows, CRITERIA_TABLE_COLUMNS, {"mode": "replay"})
    return 0


_COMMANDS = {
    "normalize": _cmd_normalize,
    "measure": _cmd_measure,
    "select": _cmd_select,
    "sweep": _cmd_sweep,
    "correlate": _cmd_correlate,
    "synth": _cmd_synth,
    "replay": _cmd_replay,
}


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse prints usage itself; fold its exit code into ours
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except GbqEvalError as exc:
        print(f"gbqeval: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gbqeval: error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
