"""Ingestion, full-suite evaluation, selection, correlation, and sweeps.

File formats accepted and produced here
---------------------------------------

scores CSV          header ``run_id,gesture_id,score``; one row per
                    (run, gesture); UTF-8.
ground-truth CSV    header ``gesture_id,eer_percent`` or
                    ``gesture_id,gt_score`` (the latter skips the
                    100-EER conversion and is normalized as-is).
precomputed CSV     header ``run_id,measure,value``; replays published
                    per-row measure values without recomputation.
embeddings file     one per run, named ``<run_id>.emb``. Text form:
                    first line ``N d``, then N whitespace-separated rows
                    ``gesture_id identity_id v1 ... vd``. Binary form:
                    16-byte magic ``GBQEVAL-EMB-0001``, little-endian
                    uint32 N and d, per row a uint16-length-prefixed
                    UTF-8 gesture id and identity id, then N*d float64
                    row-major values. Readers sniff the magic.
reports             CSV or JSON; floats carry 6 significant digits, row
                    order follows input order, column order is fixed, and
                    reruns on identical inputs are byte-identical.

Replayed and freshly computed values never mix silently: every measure
in a record carries a provenance tag (``computed``, ``replayed``, or
``unavailable``) that reports echo. In replay fixtures, criteria
annotations travel under ``crit_``-prefixed names so they never enter
selection; selection only sees measures committed under their own name.
"""

from __future__ import annotations

import csv
import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .baselines import ADAPTATION_VERSION, BASELINE_DIRECTIONS, BASELINE_KINDS, all_baselines
from .core import (
    DEFAULT_PARAMS,
    MeasureParams,
    STATE_GROUND_TRUTH,
    STATE_RAW,
    ScoreVector,
    arrange_by_ground_truth,
    ground_truth_from_eer,
    rank_descending,
    zscore_l2_normalize,
)
from .embeddings import EmbeddingSet, icgd_score
from .errors import (
    InputValidationError,
    SchemaError,
    UndefinedCorrelationError,
)
from .measures import (
    MeasureRecord,
    acceptance_score,
    advanced_acceptance,
    normalized_advanced_acceptance,
    rank_deviation,
    relevance_total,
    trend_match,
)

EMBEDDINGS_MAGIC = b"GBQEVAL-EMB-0001"

PROPOSED_MEASURES: tuple[str, ...] = (
    "rank_dev",
    "relevance",
    "trend",
    "icgd",
    "acceptance",
    "Ar_star",
    "nAr_star",
)

CANONICAL_MEASURES: tuple[str, ...] = PROPOSED_MEASURES + BASELINE_KINDS

MEASURE_DIRECTIONS: dict[str, str] = {
    "rank_dev": "min",
    "relevance": "max",
    "trend": "min",
    "icgd": "min",
    "acceptance": "max",
    "Ar_star": "max",
    "nAr_star": "max",
    **BASELINE_DIRECTIONS,
}

CRITERIA_KEYS: tuple[str, ...] = ("rank_dev", "relevance", "trend", "icgd")

_CRIT_PREFIX = "crit_"


@dataclass(eq=False)
class ModelRun:
    """One candidate score set, optionally with embeddings or replayed values."""

    run_id: str
    raw_scores: ScoreVector | None = None
    embeddings: EmbeddingSet | None = None
    precomputed: dict[str, float] | None = None

    def __post_init__(self):
        if self.raw_scores is None and self.precomputed is None:
            raise InputValidationError(
                f"run {self.run_id!r} needs raw scores or precomputed measures"
            )


@dataclass(frozen=True)
class SelectionResult:
    """Winner of one measure plus that run's criteria quadruple."""

    measure: str
    winner: str
    criteria: dict[str, float | None]


@dataclass(frozen=True)
class SweepGrid:
    """One scaling factor varied over a value grid, others at defaults."""

    parameter: str
    values: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0, 2.0, 4.0)

    _PARAM_FIELDS = {"lambda": "lambda_", "kappa": "kappa", "nu": "nu", "beta": "beta"}

    def __post_init__(self):
        if self.parameter not in self._PARAM_FIELDS:
            raise InputValidationError(
                f"sweep parameter must be one of {sorted(self._PARAM_FIELDS)}"
            )
        if not self.values:
            raise InputValidationError("sweep grid needs at least one value")

    @property
    def field_name(self) -> str:
        return self._PARAM_FIELDS[self.parameter]


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


def _read_csv_rows(path: Path, expected_header: Sequence[str]) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty file", location=str(path)) from None
        if header != list(expected_header):
            raise SchemaError(
                f"expected header {','.join(expected_header)!r}, found {','.join(header)!r}",
                location=f"{path}:1",
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise SchemaError(
                    f"expected {len(expected_header)} columns, found {len(row)}",
                    location=f"{path}:{lineno}",
                )
            rows.append(row)
        return rows


def _parse_float(text: str, location: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"not a number: {text!r}", location=location) from None


def load_ground_truth_csv(path: str | Path) -> ScoreVector:
    """Read the ground-truth file; EER columns are converted, score
    columns only normalized."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header == ["gesture_id", "eer_percent"]:
        rows = _read_csv_rows(path, header)
        ids = [r[0] for r in rows]
        eer = [_parse_float(r[1], f"{path}:{i + 2}") for i, r in enumerate(rows)]
        _require_unique(ids, path, "gesture_id")
        return ground_truth_from_eer(ids, eer)
    if header == ["gesture_id", "gt_score"]:
        rows = _read_csv_rows(path, header)
        ids = [r[0] for r in rows]
        vals = [_parse_float(r[1], f"{path}:{i + 2}") for i, r in enumerate(rows)]
        _require_unique(ids, path, "gesture_id")
        raw = ScoreVector(tuple(ids), np.array(vals))
        return zscore_l2_normalize(raw, state=STATE_GROUND_TRUTH)
    found = ",".join(header) if header else "<empty>"
    raise SchemaError(
        f"ground-truth header must be 'gesture_id,eer_percent' or 'gesture_id,gt_score', found {found!r}",
        location=f"{path}:1",
    )


def _require_unique(ids: Sequence[str], path: Path, what: str) -> None:
    seen = set()
    for i, gid in enumerate(ids):
        if gid in seen:
            raise SchemaError(f"duplicate {what} {gid!r}", location=f"{path}:{i + 2}")
        seen.add(gid)


def load_scores_csv(
    path: str | Path, gesture_order: Sequence[str]
) -> dict[str, ScoreVector]:
    """Read per-run scores and align every run to the canonical gesture order."""
    path = Path(path)
    rows = _read_csv_rows(path, ("run_id", "gesture_id", "score"))
    per_run: dict[str, dict[str, float]] = {}
    for lineno, (run_id, gesture_id, score) in enumerate(rows, start=2):
        bucket = per_run.setdefault(run_id, {})
        if gesture_id in bucket:
            raise SchemaError(
                f"duplicate score for run {run_id!r}, gesture {gesture_id!r}",
                location=f"{path}:{lineno}",
            )
        bucket[gesture_id] = _parse_float(score, f"{path}:{lineno}")
    if not per_run:
        raise SchemaError("no score rows", location=str(path))

    expected = set(gesture_order)
    out = {}
    for run_id, bucket in per_run.items():
        missing = expected - set(bucket)
        extra = set(bucket) - expected
        if missing:
            raise SchemaError(
                f"run {run_id!r} is missing gesture {sorted(missing)[0]!r}",
                location=str(path),
            )
        if extra:
            raise SchemaError(
                f"run {run_id!r} has unknown gesture {sorted(extra)[0]!r}",
                location=str(path),
            )
        values = np.array([bucket[g] for g in gesture_order])
        out[run_id] = ScoreVector(tuple(gesture_order), values)
    return out


def load_precomputed_csv(path: str | Path) -> list[ModelRun]:
    """Read replayed measure values; conflicting duplicates are rejected."""
    path = Path(path)
    rows = _read_csv_rows(path, ("run_id", "measure", "value"))
    per_run: dict[str, dict[str, float]] = {}
    for lineno, (run_id, measure, value) in enumerate(rows, start=2):
        v = _parse_float(value, f"{path}:{lineno}")
        bucket = per_run.setdefault(run_id, {})
        if measure in bucket and bucket[measure] != v:
            raise SchemaError(
                f"conflicting values for run {run_id!r}, measure {measure!r}",
                location=f"{path}:{lineno}",
            )
        bucket[measure] = v
    if not per_run:
        raise SchemaError("no precomputed rows", location=str(path))
    return [ModelRun(run_id, precomputed=vals) for run_id, vals in per_run.items()]


def read_embeddings(path: str | Path) -> EmbeddingSet:
    """Read an embeddings file, sniffing text versus binary by magic."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(len(EMBEDDINGS_MAGIC))
    if head == EMBEDDINGS_MAGIC:
        return _read_embeddings_binary(path)
    return _read_embeddings_text(path)


def _read_embeddings_text(path: Path) -> EmbeddingSet:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().split()
        if len(first) != 2:
            raise SchemaError("first line must be 'N d'", location=f"{path}:1")
        try:
            n, d = int(first[0]), int(first[1])
        except ValueError:
            raise SchemaError("first line must be 'N d'", location=f"{path}:1") from None
        rows = np.empty((n, d))
        gestures = []
        identities = []
        for i in range(n):
            parts = fh.readline().split()
            if len(parts) != d + 2:
                raise SchemaError(
                    f"expected gesture, identity, and {d} values",
                    location=f"{path}:{i + 2}",
                )
            gestures.append(parts[0])
            identities.append(parts[1])
            try:
                rows[i] = [float(x) for x in parts[2:]]
            except ValueError:
                raise SchemaError("non-numeric embedding value", location=f"{path}:{i + 2}") from None
        if fh.readline().split():
            raise SchemaError(f"more than {n} data rows", location=f"{path}:{n + 2}")
    return EmbeddingSet(rows, tuple(gestures), tuple(identities))


def _read_embeddings_binary(path: Path) -> EmbeddingSet:
    raw = Path(path).read_bytes()
    offset = len(EMBEDDINGS_MAGIC)
    try:
        n, d = struct.unpack_from("<II", raw, offset)
        offset += 8
        gestures = []
        identities = []
        for _ in range(n):
            for labels in (gestures, identities):
                (length,) = struct.unpack_from("<H", raw, offset)
                offset += 2
                labels.append(raw[offset : offset + length].decode("utf-8"))
                offset += length
        rows = np.frombuffer(raw, dtype="<f8", count=n * d, offset=offset).reshape(n, d)
    except (struct.error, ValueError) as exc:
        raise SchemaError(f"truncated binary embeddings: {exc}", location=str(path)) from None
    return EmbeddingSet(rows.copy(), tuple(gestures), tuple(identities))


def write_embeddings(path: str | Path, emb: EmbeddingSet, binary: bool = False) -> None:
    path = Path(path)
    if binary:
        parts = [EMBEDDINGS_MAGIC, struct.pack("<II", emb.n, emb.dim)]
        for gesture, identity in zip(emb.gesture_labels, emb.identity_labels):
            for label in (gesture, identity):
                encoded = label.encode("utf-8")
                parts.append(struct.pack("<H", len(encoded)))
                parts.append(encoded)
        parts.append(np.ascontiguousarray(emb.rows, dtype="<f8").tobytes())
        path.write_bytes(b"".join(parts))
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{emb.n} {emb.dim}\n")
        for gesture, identity, row in zip(emb.gesture_labels, emb.identity_labels, emb.rows):
            values = " ".join(repr(float(v)) for v in row)
            fh.write(f"{gesture} {identity} {values}\n")


def load_runs(
    scores_path: str | Path,
    gt_path: str | Path,
    embeddings_dir: str | Path | None = None,
) -> tuple[list[ModelRun], ScoreVector]:
    """Load candidate runs plus ground truth, attaching embeddings when present.

    Runs without an embeddings file load fine; their entanglement is
    reported unavailable rather than zero-filled.
    """
    gt = load_ground_truth_csv(gt_path)
    per_run = load_scores_csv(scores_path, gt.gesture_ids)
    runs = []
    for run_id, scores in per_run.items():
        emb = None
        if embeddings_dir is not None:
            candidate = Path(embeddings_dir) / f"{run_id}.emb"
            if candidate.exists():
                emb = read_embeddings(candidate)
        runs.append(ModelRun(run_id, raw_scores=scores, embeddings=emb))
    return runs, gt


# ---------------------------------------------------------------------------
# Evaluation and selection
# ---------------------------------------------------------------------------


def _normalized_scores(run: ModelRun) -> ScoreVector:
    """Normalize raw scores; pass already-normalized ones through untouched
    (after checking their invariants) so exact fixpoints stay exact."""
    scores = run.raw_scores
    if scores.state == STATE_RAW:
        return zscore_l2_normalize(scores)
    scores.validate()
    return scores


def evaluate_run(
    run: ModelRun, gt: ScoreVector, params: MeasureParams = DEFAULT_PARAMS
) -> MeasureRecord:
    """Compute the full measure record for one run.

    Precomputed (replay) runs pass their values through untouched with
    ``replayed`` provenance. Computed runs are normalized, measured
    against the ground truth, and scored on every baseline; a missing
    embedding set leaves entanglement unavailable and the aggregate
    scores treat it as zero.
    """
    record = MeasureRecord(run_id=run.run_id)
    if run.precomputed is not None:
        for measure, value in run.precomputed.items():
            record.set_value(measure, value, "replayed")
        return record

    delta = _normalized_scores(run)
    gt_ranking = rank_descending(gt)
    delta_ranking = rank_descending(delta)

    record.set_value("rank_dev", rank_deviation(delta_ranking, gt_ranking), "computed")
    record.set_value("relevance", relevance_total(delta, gt_ranking, params), "computed")
    trend = trend_match(
        arrange_by_ground_truth(delta, gt_ranking),
        arrange_by_ground_truth(gt, gt_ranking),
    ).total
    record.set_value("trend", trend, "computed")

    c_d: float | None = None
    if run.embeddings is not None:
        c_d = icgd_score(run.embeddings)
        record.set_value("icgd", c_d, "computed")
    else:
        record.provenance["icgd"] = "unavailable"

    record.set_value("acceptance", acceptance_score(delta, gt, params), "computed")
    record.set_value("Ar_star", advanced_acceptance(delta, gt, c_d, params), "computed")
    record.set_value(
        "nAr_star", normalized_advanced_acceptance(delta, gt, c_d, params), "computed"
    )
    for kind, value in all_baselines(delta, gt).items():
        record.baselines[kind] = value
        record.provenance[kind] = "computed"
    return record


def evaluate_runs(
    runs: Sequence[ModelRun],
    gt: ScoreVector,
    params: MeasureParams = DEFAULT_PARAMS,
    jobs: int = 1,
) -> list[MeasureRecord]:
    """Evaluate runs, optionally in parallel; output keeps input order."""
    if jobs <= 1 or len(runs) <= 1:
        return [evaluate_run(run, gt, params) for run in runs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda r: evaluate_run(r, gt, params), runs))


def record_criteria(record: MeasureRecord) -> dict[str, float | None]:
    """The (rank_dev, relevance, trend, icgd) quadruple of a record.

    Replay fixtures annotate criteria under ``crit_`` names, which take
    precedence over same-named selector measures.
    """
    out: dict[str, float | None] = {}
    for key in CRITERIA_KEYS:
        value = record.value(_CRIT_PREFIX + key)
        if value is None:
            value = record.value(key)
        out[key] = value
    return out


def measure_direction(measure: str) -> str:
    """Optimization direction; unknown (replay-only) measures maximize."""
    return MEASURE_DIRECTIONS.get(measure, "max")


def select_best(records: Sequence[MeasureRecord], measure: str) -> SelectionResult:
    """Pick the best record for one measure; ties break on run_id."""
    if not records:
        raise InputValidationError("selection needs at least one record")
    values = {}
    for record in records:
        value = record.value(measure)
        if value is None:
            raise InputValidationError(
                f"measure {measure!r} missing from run {record.run_id!r}"
            )
        values[record.run_id] = value
    sign = 1.0 if measure_direction(measure) == "min" else -1.0
    winner = min(records, key=lambda r: (sign * values[r.run_id], r.run_id))
    return SelectionResult(measure, winner.run_id, record_criteria(winner))


def selectable_measures(records: Sequence[MeasureRecord]) -> list[str]:
    """Measures present in at least one record: canonical ones first in
    fixed order, then replay-only names in first-appearance order.
    Criteria annotations (``crit_*``) never select."""
    present = []
    seen = set()
    for name in CANONICAL_MEASURES:
        if any(r.value(name) is not None for r in records):
            present.append(name)
            seen.add(name)
    for record in records:
        for name in record.extras:
            if name.startswith(_CRIT_PREFIX) or name in seen:
                continue
            present.append(name)
            seen.add(name)
    return present


def pearson_correlation(
    records: Sequence[MeasureRecord], measure_x: str, measure_y: str
) -> float:
    """Pearson coefficient between two measures across records."""
    xs, ys = _paired_values(records, measure_x, measure_y)
    return _pearson(xs, ys, measure_x, measure_y)


def spearman_correlation(
    records: Sequence[MeasureRecord], measure_x: str, measure_y: str
) -> float:
    """Rank (Spearman) variant, exposed as an option; Pearson is the default."""
    xs, ys = _paired_values(records, measure_x, measure_y)
    return _pearson(_average_ranks(xs), _average_ranks(ys), measure_x, measure_y)


def _paired_values(
    records: Sequence[MeasureRecord], measure_x: str, measure_y: str
) -> tuple[np.ndarray, np.ndarray]:
    if len(records) < 3:
        raise InputValidationError("correlation needs at least three records")
    xs, ys = [], []
    for record in records:
        x, y = record.value(measure_x), record.value(measure_y)
        if x is None or y is None:
            missing = measure_x if x is None else measure_y
            raise InputValidationError(
                f"measure {missing!r} missing from run {record.run_id!r}"
            )
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys)


def _pearson(xs: np.ndarray, ys: np.ndarray, name_x: str, name_y: str) -> float:
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = float(np.sqrt(np.sum(dx * dx)))
    sy = float(np.sqrt(np.sum(dy * dy)))
    if sx == 0.0 or sy == 0.0:
        constant = name_x if sx == 0.0 else name_y
        raise UndefinedCorrelationError(f"measure {constant!r} has zero variance")
    return float(np.sum(dx * dy) / (sx * sy))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def ablation_sweep(
    run: ModelRun,
    gt: ScoreVector,
    grid: SweepGrid,
    params: MeasureParams = DEFAULT_PARAMS,
) -> list[tuple[float, float]]:
    """Normalized advanced acceptance across one parameter grid.

    The varied factor steps through the grid while all other factors stay
    at their configured values.
    """
    if run.raw_scores is None:
        raise InputValidationError(
            f"run {run.run_id!r} has no raw scores; sweeps need computable records"
        )
    delta = _normalized_scores(run)
    c_d = icgd_score(run.embeddings) if run.embeddings is not None else None
    out = []
    for value in grid.values:
        swept = params.replace(**{grid.field_name: value})
        out.append((value, normalized_advanced_acceptance(delta, gt, c_d, swept)))
    return out


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

RECORD_COLUMNS: tuple[str, ...] = ("run_id",) + CANONICAL_MEASURES + ("provenance",)

CRITERIA_TABLE_COLUMNS: tuple[str, ...] = (
    "measure",
    "winner",
    "rank_dev",
    "relevance",
    "trend",
    "icgd",
    "norm_rank_dev",
    "norm_relevance",
    "norm_trend",
    "norm_icgd",
)


def format_float(value: float) -> str:
    return format(float(value), ".6g")


def _round6(value: float) -> float:
    return float(format_float(value))


def _provenance_summary(record: MeasureRecord) -> str:
    tags = set(record.provenance.values())
    if tags <= {"computed", "unavailable"}:
        gaps = sorted(k for k, v in record.provenance.items() if v == "unavailable")
        base = "computed"
        return base + "".join(f";{k}=unavailable" for k in gaps)
    if tags == {"replayed"}:
        return "replayed"
    return ";".join(f"{k}={v}" for k, v in record.provenance.items())


def record_rows(records: Sequence[MeasureRecord]) -> list[dict[str, object]]:
    """Flatten records for report emission, one row per run."""
    rows = []
    for record in records:
        row: dict[str, object] = {"run_id": record.run_id}
        for measure in CANONICAL_MEASURES:
            row[measure] = record.value(measure)
        row["provenance"] = _provenance_summary(record)
        rows.append(row)
    return rows


def criteria_table(
    records: Sequence[MeasureRecord],
    measures: Sequence[str] | None = None,
    params: MeasureParams = DEFAULT_PARAMS,
) -> list[dict[str, object]]:
    """Per-measure winners with criteria and [0,1]-normalized columns.

    Selection for each measure runs over the records that carry it, so a
    replay fixture that pins only winners still reproduces its table.
    The normalized columns min-max rescale each criteria column over the
    emitted rows; relevance is first exponentiated to 2^(lambda*R) so
    nearby relevance values separate, matching how the criteria are
    plotted.
    """
    if measures is None:
        measures = selectable_measures(records)
    rows: list[dict[str, object]] = []
    for measure in measures:
        eligible = [r for r in records if r.value(measure) is not None]
        if not eligible:
            raise InputValidationError(f"measure {measure!r} missing from every record")
        result = select_best(eligible, measure)
        row: dict[str, object] = {"measure": measure, "winner": result.winner}
        row.update(result.criteria)
        rows.append(row)

    transforms = {
        "rank_dev": lambda v: v,
        "relevance": lambda v: 2.0 ** (params.lambda_ * v),
        "trend": lambda v: v,
        "icgd": lambda v: v,
    }
    for key in CRITERIA_KEYS:
        transformed = [
            transforms[key](row[key]) for row in rows if row[key] is not None
        ]
        lo = min(transformed) if transformed else 0.0
        hi = max(transformed) if transformed else 0.0
        span = hi - lo
        for row in rows:
            if row[key] is None:
                row[f"norm_{key}"] = None
            elif span == 0.0:
                row[f"norm_{key}"] = 0.0
            else:
                row[f"norm_{key}"] = (transforms[key](row[key]) - lo) / span
    return rows


def report_meta(params: MeasureParams, extra: dict[str, object] | None = None) -> dict:
    """Report metadata block: adaptation and correlation conventions plus
    the measure parameters in force."""
    meta: dict[str, object] = {
        "adaptation": ADAPTATION_VERSION,
        "correlation": "pearson",
        "params": {
            "lambda": params.lambda_,
            "kappa": params.kappa,
            "nu": params.nu,
            "beta": params.beta,
            "gamma": params.gamma,
        },
    }
    if extra:
        meta.update(extra)
    return meta


def write_report_csv(
    rows: Sequence[dict[str, object]], columns: Sequence[str], out: TextIO
) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in columns])


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_report_json(
    rows: Sequence[dict[str, object]],
    columns: Sequence[str],
    out: TextIO,
    meta: dict[str, object] | None = None,
) -> None:
    payload: dict[str, object] = {}
    if meta is not None:
        payload["meta"] = meta
    payload["rows"] = [
        {column: _json_cell(row.get(column)) for column in columns} for row in rows
    ]
    json.dump(payload, out, indent=2)
    out.write("\n")


def _json_cell(value: object) -> object:
    if isinstance(value, float):
        return _round6(value)
    return value
