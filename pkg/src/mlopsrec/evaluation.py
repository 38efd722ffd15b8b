"""Micro-averaged precision, recall and F-measure over (record, field, label) triples."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .dataset import OUTPUT_FIELDS, FeatureView, LabelSets


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def _count(gold: frozenset, pred: frozenset) -> ConfusionCounts:
    return ConfusionCounts(len(gold & pred), len(pred - gold), len(gold - pred))


def _check_aligned(gold: Sequence[LabelSets], predicted: Sequence[LabelSets]) -> None:
    if len(gold) != len(predicted):
        raise ValueError(f"gold has {len(gold)} records but predictions have {len(predicted)}")
    for i, (g, p) in enumerate(zip(gold, predicted)):
        if not isinstance(g, LabelSets) or not isinstance(p, LabelSets):
            raise ValueError(f"record {i}: expected LabelSets for gold and prediction")


def score_predictions(gold: Sequence[LabelSets], predicted: Sequence[LabelSets]) -> ConfusionCounts:
    _check_aligned(gold, predicted)
    total = ConfusionCounts()
    for g, p in zip(gold, predicted):
        for f in OUTPUT_FIELDS:
            total = total + _count(g[f], p[f])
    return total


def score_by_field(gold: Sequence[LabelSets], predicted: Sequence[LabelSets]) -> dict[str, ConfusionCounts]:
    _check_aligned(gold, predicted)
    out = {}
    for f in OUTPUT_FIELDS:
        c = ConfusionCounts()
        for g, p in zip(gold, predicted):
            c = c + _count(g[f], p[f])
        out[f] = c
    return out


def precision(c: ConfusionCounts) -> Fraction:
    """tp / (tp + fp); 0 when nothing was predicted (see :func:`degenerate_metrics`)."""
    denom = c.tp + c.fp
    return Fraction(c.tp, denom) if denom else Fraction(0)


def recall(c: ConfusionCounts) -> Fraction:
    denom = c.tp + c.fn
    return Fraction(c.tp, denom) if denom else Fraction(0)


def f_measure(p, r):
    """Harmonic mean 2pr / (p + r); 0 when p + r == 0."""
    if p + r == 0:
        return type(p + r)(0)
    return 2 * p * r / (p + r)


def degenerate_metrics(c: ConfusionCounts) -> list[str]:
    """Names of metrics whose value came from the 0/0 convention."""
    out = []
    if c.tp + c.fp == 0:
        out.append("precision")
    if c.tp + c.fn == 0:
        out.append("recall")
    if "precision" in out or "recall" in out or precision(c) + recall(c) == 0:
        out.append("f_measure")
    return out


@dataclass(frozen=True)
class EvaluationReport:
    approach: str
    counts: ConfusionCounts
    per_field: dict[str, ConfusionCounts] = field(default_factory=dict)
    n_records: int = 0

    @property
    def precision(self) -> Fraction:
        return precision(self.counts)

    @property
    def recall(self) -> Fraction:
        return recall(self.counts)

    @property
    def f_measure(self) -> Fraction:
        return f_measure(self.precision, self.recall)

    @property
    def degenerate(self) -> list[str]:
        return degenerate_metrics(self.counts)

    def to_dict(self) -> dict:
        def metrics(c):
            p, r = precision(c), recall(c)
            return {"tp": c.tp, "fp": c.fp, "fn": c.fn, "precision": float(p), "recall": float(r),
                    "f_measure": float(f_measure(p, r)), "degenerate": degenerate_metrics(c)}

        d = {"approach": self.approach, "n_records": self.n_records}
        d.update(metrics(self.counts))
        d["per_field"] = {f: metrics(c) for f, c in self.per_field.items()}
        return d


def make_report(approach: str, gold: Sequence[LabelSets], predicted: Sequence[LabelSets]) -> EvaluationReport:
    return EvaluationReport(approach, score_predictions(gold, predicted), score_by_field(gold, predicted),
                            len(gold))


def evaluate_approach(approach: str, predict: Callable[[tuple[str, str]], LabelSets],
                      views: Sequence[FeatureView]) -> EvaluationReport:
    """Score ``predict`` (inputs -> LabelSets) against held-out views."""
    gold = [v.outputs for v in views]
    return make_report(approach, gold, [predict(v.inputs) for v in views])


@dataclass(frozen=True)
class Comparison:
    ranked: tuple[EvaluationReport, ...]

    @property
    def best(self) -> EvaluationReport:
        return self.ranked[0]

    def table(self) -> str:
        rows = [("Approach", "Precision", "Recall", "F-Measure")]
        rows += [(r.approach, f"{float(r.precision):.6f}", f"{float(r.recall):.6f}", f"{float(r.f_measure):.6f}")
                 for r in self.ranked]
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        lines = ["  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(row, widths)))
                 for row in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append(f"best approach (highest F-measure): {self.best.approach}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"best": self.best.approach, "reports": [r.to_dict() for r in self.ranked]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def bars_csv(self) -> str:
        """Long-format rows (approach, metric, value) for a grouped bar chart."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["approach", "metric", "value"])
        for r in self.ranked:
            for metric, value in (("precision", r.precision), ("recall", r.recall), ("f_measure", r.f_measure)):
                writer.writerow([r.approach, metric, f"{float(value):.6f}"])
        return buf.getvalue()


def compare_approaches(reports: Iterable[EvaluationReport]) -> Comparison:
    """Rank by F-measure, highest first; equal F-measures rank by approach name."""
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to compare")
    return Comparison(tuple(sorted(reports, key=lambda r: (-r.f_measure, r.approach))))
