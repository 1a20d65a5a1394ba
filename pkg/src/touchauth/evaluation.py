"""Confusion counts, authentication metrics, and grouped reports.

Label 0 is the authentic user and is treated as the positive class:
a false positive is an imposter accepted, a false negative is the
authentic user rejected.
"""

from __future__ import annotations

import csv
import io
import math
from decimal import ROUND_HALF_UP, Decimal
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ContractError

REPORT_HEADER = ("User", "Game", "Model", "Accuracy", "F1 Score", "FNR", "FPR")
METRIC_FIELDS = ("accuracy", "f1", "fnr", "fpr")
GROUPINGS = {
    "model": ("model",),
    "game": ("game",),
    "model×game": ("model", "game"),
    "model,game": ("model", "game"),
    "model_game": ("model", "game"),
    "none": (),
}


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    f1: float
    fnr: float
    fpr: float
    precision: float
    recall: float
    degenerate: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class ReportRow:
    user: str
    game: str
    model: str
    accuracy: float
    f1: float
    fnr: float
    fpr: float


@dataclass(frozen=True)
class GroupSummary:
    key: tuple[str, ...]
    n: int
    mean: dict
    std: dict


@dataclass(frozen=True)
class Report:
    rows: tuple[ReportRow, ...]
    group_by: tuple[str, ...]
    groups: tuple[GroupSummary, ...]


def confusion(predictions: Sequence[int], truth: Sequence[int]) -> ConfusionMatrix:
    pred = np.asarray(predictions)
    true = np.asarray(truth)
    if pred.shape != true.shape or pred.ndim != 1:
        raise ContractError(f"length mismatch: {pred.shape} predictions vs {true.shape} truth")
    if pred.size == 0:
        raise ContractError("confusion needs at least one row")
    if not (np.isin(pred, (0, 1)).all() and np.isin(true, (0, 1)).all()):
        raise ContractError("labels must be 0 (authentic) or 1 (imposter)")
    return ConfusionMatrix(
        tp=int(np.sum((true == 0) & (pred == 0))),
        fp=int(np.sum((true == 1) & (pred == 0))),
        tn=int(np.sum((true == 1) & (pred == 1))),
        fn=int(np.sum((true == 0) & (pred == 1))),
    )


def _ratio(num: int, den: int, name: str, flags: set) -> float:
    if den == 0:
        flags.add(name)
        return 0.0
    return num / den


def metrics(cm: ConfusionMatrix) -> Metrics:
    """Accuracy, F1, FNR and FPR as fractions.

    Ratios with a zero denominator come back as 0 and their name is added
    to ``degenerate``. F1 is 2tp / (2tp + fp + fn), the closed form of the
    harmonic mean of precision and recall; it is degenerate when tp == 0.
    """
    if cm.total <= 0:
        raise ContractError("empty confusion matrix")
    flags: set = set()
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", flags)
    recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", flags)
    if cm.tp == 0:
        flags.add("f1")
        f1 = 0.0
    else:
        f1 = 2 * cm.tp / (2 * cm.tp + cm.fp + cm.fn)
    return Metrics(
        accuracy=(cm.tp + cm.tn) / cm.total,
        f1=f1,
        fnr=_ratio(cm.fn, cm.fn + cm.tp, "fnr", flags),
        fpr=_ratio(cm.fp, cm.fp + cm.tn, "fpr", flags),
        precision=precision,
        recall=recall,
        degenerate=frozenset(flags),
    )


def report_row(user: str, game: str, model: str, m: Metrics) -> ReportRow:
    return ReportRow(user, game, model, 100 * m.accuracy, 100 * m.f1, 100 * m.fnr, 100 * m.fpr)


def _std(values: list[float], ddof: int) -> float:
    n = len(values)
    if n - ddof <= 0:
        return 0.0
    mean = math.fsum(values) / n
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - ddof))


def aggregate_report(rows: Iterable[ReportRow], group_by: str = "model", ddof: int = 1) -> Report:
    """Mean and standard deviation of every metric per group.

    ``ddof=1`` gives the sample deviation, the usual convention for a
    per-user results table; ``ddof=0`` gives the population form. A group
    too small for the chosen ``ddof`` reports 0.
    """
    try:
        keys = GROUPINGS[group_by]
    except KeyError:
        raise ConfigError(f"group_by must be one of {sorted(GROUPINGS)}, got {group_by!r}") from None
    rows = tuple(rows)
    grouped: dict[tuple, list[ReportRow]] = {}
    for row in rows:
        grouped.setdefault(tuple(getattr(row, k) for k in keys), []).append(row)
    groups = []
    for key in sorted(grouped):
        members = grouped[key]
        mean = {m: math.fsum(getattr(r, m) for r in members) / len(members) for m in METRIC_FIELDS}
        std = {m: _std([getattr(r, m) for r in members], ddof) for m in METRIC_FIELDS}
        groups.append(GroupSummary(key, len(members), mean, std))
    return Report(rows, keys, tuple(groups))


def _fmt(value: float) -> str:
    # drop binary noise first, then round half-up, so a mean that is a
    # decimal tie in exact arithmetic rounds the way a reader expects
    cleaned = Decimal(repr(round(float(value), 10)))
    return str(cleaned.quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


def report_csv(report: Report) -> str:
    """Per-user rows, then one Avg row and one Std row per group."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for r in report.rows:
        writer.writerow([r.user, r.game, r.model] + [_fmt(getattr(r, m)) for m in METRIC_FIELDS])
    for label, attr in (("Avg", "mean"), ("Std", "std")):
        for g in report.groups:
            key = dict(zip(report.group_by, g.key))
            stats = getattr(g, attr)
            writer.writerow([label, key.get("game", ""), key.get("model", "")] + [_fmt(stats[m]) for m in METRIC_FIELDS])
    return out.getvalue()


def read_report_rows(text: str) -> list[ReportRow]:
    """Per-user rows of a report CSV; Avg/Std summary rows are skipped."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != REPORT_HEADER:
        raise ConfigError(f"report CSV header must be {','.join(REPORT_HEADER)}")
    rows = []
    for rec in reader:
        if not rec or rec[0] in ("Avg", "Std"):
            continue
        rows.append(ReportRow(rec[0], rec[1], rec[2], *(float(v) for v in rec[3:7])))
    return rows


def threshold_sweep(scores, truth, thresholds) -> list[tuple[float, Metrics]]:
    """Metrics at each threshold; raw material for ROC or EER analysis."""
    scores = np.asarray(scores, dtype=float)
    out = []
    for t in thresholds:
        pred = (scores >= t).astype(int)
        out.append((float(t), metrics(confusion(pred, truth))))
    return out
