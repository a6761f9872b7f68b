"""Multiclass evaluation: confusion matrix, per-class PRF, aggregates.

Zero-division cases (a class never predicted, never true, or both) follow
the 0/0 -> 0 convention and are counted in the report so degenerate scores
are visible.  Macro averages include zero-support classes at 0 by default.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import COARSE_NAMES


class MetricsError(Exception):
    pass


def confusion(y_true: Sequence[int], y_pred: Sequence[int], n_classes: int = 7) -> np.ndarray:
    """Confusion matrix with rows = true labels, columns = predictions."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise MetricsError(
            f"length mismatch: {y_true.shape[0]} true vs {y_pred.shape[0]} predicted"
        )
    if y_true.size == 0:
        raise MetricsError("cannot build a confusion matrix from zero examples")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def class_prf(cm: np.ndarray, label: int) -> dict:
    """Precision, recall, F1 and support for one class; 0/0 -> 0."""
    tp = float(cm[label, label])
    fp = float(cm[:, label].sum() - cm[label, label])
    fn = float(cm[label, :].sum() - cm[label, label])
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return {
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "support": int(cm[label, :].sum()),
    }


def aggregate(per_class: Sequence[dict], cm: np.ndarray,
              macro_includes_zero_support: bool = True) -> dict:
    """Macro and support-weighted averages plus accuracy.

    Macro means are unweighted over all classes, counting zero-support ones
    at 0 by default; pass ``macro_includes_zero_support=False`` to average
    over supported classes only.  Weighted means run over classes with
    support.
    """
    total = float(cm.sum())
    if macro_includes_zero_support:
        macro_pool = list(per_class)
    else:
        macro_pool = [pc for pc in per_class if pc["support"] > 0] or list(per_class)
    macro = {
        key: sum(pc[key] for pc in macro_pool) / len(macro_pool)
        for key in ("precision", "recall", "f1")
    }
    supported = [pc for pc in per_class if pc["support"] > 0]
    support_total = sum(pc["support"] for pc in supported)
    weighted = {
        key: (
            sum(pc[key] * pc["support"] for pc in supported) / support_total
            if support_total > 0
            else 0.0
        )
        for key in ("precision", "recall", "f1")
    }
    accuracy = float(np.trace(cm)) / total if total > 0 else 0.0
    return {"macro": macro, "weighted": weighted, "accuracy": accuracy}


@dataclass
class EvaluationReport:
    model_name: str
    split_name: str
    cm: np.ndarray
    per_class: dict[str, dict]
    macro: dict[str, float]
    weighted: dict[str, float]
    accuracy: float
    zero_divisions: int = 0
    label_names: tuple[str, ...] = COARSE_NAMES

    def to_json_dict(self) -> dict:
        return {
            "model": self.model_name,
            "split": self.split_name,
            "accuracy": self.accuracy,
            "per_class": self.per_class,
            "macro": self.macro,
            "weighted": self.weighted,
            "confusion_matrix": self.cm.tolist(),
            "labels": list(self.label_names),
            "zero_divisions": self.zero_divisions,
        }

    def to_text(self) -> str:
        width = max(len(n) for n in self.label_names) + 2
        lines = [f"model: {self.model_name}  split: {self.split_name}"]
        header = f"{'class':<{width}}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"
        lines.append(header)
        for name in self.label_names:
            pc = self.per_class[name]
            lines.append(
                f"{name:<{width}}{pc['precision']:>10.3f}{pc['recall']:>10.3f}"
                f"{pc['f1']:>10.3f}{pc['support']:>10d}"
            )
        lines.append(
            f"{'macro':<{width}}{self.macro['precision']:>10.3f}"
            f"{self.macro['recall']:>10.3f}{self.macro['f1']:>10.3f}"
        )
        lines.append(
            f"{'weighted':<{width}}{self.weighted['precision']:>10.3f}"
            f"{self.weighted['recall']:>10.3f}{self.weighted['f1']:>10.3f}"
        )
        lines.append(f"accuracy: {self.accuracy:.4f}")
        return "\n".join(lines)


def report_from_predictions(
    y_true: Sequence[int],
    y_pred: Sequence[int],
    model_name: str = "",
    split_name: str = "",
    label_names: Sequence[str] = COARSE_NAMES,
) -> EvaluationReport:
    n_classes = len(label_names)
    cm = confusion(y_true, y_pred, n_classes)
    per_class_list = [class_prf(cm, k) for k in range(n_classes)]
    agg = aggregate(per_class_list, cm)
    zero_divs = sum(
        int(cm[:, k].sum() == 0) + int(cm[k, :].sum() == 0) for k in range(n_classes)
    )
    per_class = {label_names[k]: per_class_list[k] for k in range(n_classes)}
    return EvaluationReport(
        model_name=model_name,
        split_name=split_name,
        cm=cm,
        per_class=per_class,
        macro=agg["macro"],
        weighted=agg["weighted"],
        accuracy=agg["accuracy"],
        zero_divisions=zero_divs,
        label_names=tuple(label_names),
    )


def evaluate(model, X, y, model_name: str = "", split_name: str = "",
             label_names: Sequence[str] = COARSE_NAMES) -> EvaluationReport:
    """Predict all rows of X and build a full report."""
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise MetricsError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
    y_pred = model.predict(X)
    return report_from_predictions(y, y_pred, model_name, split_name, label_names)


def compare(reports: Sequence[EvaluationReport]) -> dict:
    """Merge reports into one comparison table sorted by accuracy."""
    if not reports:
        raise MetricsError("compare requires at least one report")
    rows = sorted(
        (
            {
                "model": r.model_name,
                "accuracy": r.accuracy,
                "precision": r.weighted["precision"],
                "recall": r.weighted["recall"],
                "f1": r.weighted["f1"],
                "macro_precision": r.macro["precision"],
                "macro_recall": r.macro["recall"],
                "macro_f1": r.macro["f1"],
            }
            for r in reports
        ),
        key=lambda row: (-row["accuracy"], row["model"]),
    )
    return {"rows": rows}


def comparison_text(table: dict) -> str:
    width = max([len(r["model"]) for r in table["rows"]] + [len("model")]) + 2
    lines = [f"{'model':<{width}}{'accuracy':>10}{'precision':>11}{'recall':>9}{'f1':>9}"]
    for row in table["rows"]:
        lines.append(
            f"{row['model']:<{width}}{row['accuracy']:>10.3f}{row['precision']:>11.3f}"
            f"{row['recall']:>9.3f}{row['f1']:>9.3f}"
        )
    return "\n".join(lines)


def comparison_csv(table: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "accuracy", "precision", "recall", "f1"])
    for row in table["rows"]:
        writer.writerow(
            [row["model"], f"{row['accuracy']:.6f}", f"{row['precision']:.6f}",
             f"{row['recall']:.6f}", f"{row['f1']:.6f}"]
        )
    return buf.getvalue()


def comparison_json(table: dict) -> str:
    return json.dumps(table, indent=2, sort_keys=True)
