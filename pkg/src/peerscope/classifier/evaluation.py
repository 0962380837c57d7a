"""Per-class precision / recall, macro F1, confusion matrix and importances."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from ..categorizer import CATEGORIES, Category


@dataclass(frozen=True)
class EvalReport:
    """Classification report.

    ``confusion[i, j]`` counts test rows of true class ``classes[i]``
    predicted as ``classes[j]``. Precision is ``None`` for a class never
    predicted; recall and F1 are ``None`` for a class absent from the test set.
    Macro F1 averages F1 over the classes present in the test set.
    """

    classes: tuple
    confusion: np.ndarray
    precision: dict
    recall: dict
    f1: dict
    macro_f1: float
    accuracy: float
    importances: tuple[tuple[str, float], ...] = ()

    def to_dict(self) -> dict:
        name = lambda c: c.value if isinstance(c, Category) else str(c)  # noqa: E731
        return {
            "classes": [name(c) for c in self.classes],
            "confusion_matrix": self.confusion.tolist(),
            "precision": {name(c): _r(v) for c, v in self.precision.items()},
            "recall": {name(c): _r(v) for c, v in self.recall.items()},
            "f1": {name(c): _r(v) for c, v in self.f1.items()},
            "macro_f1": _r(self.macro_f1),
            "accuracy": _r(self.accuracy),
            "feature_importances": [[n, _r(s)] for n, s in self.importances],
        }


def _r(x):
    return None if x is None else float(f"{x:.10g}")


def classification_report(y_true: Sequence[Hashable], y_pred: Sequence[Hashable],
                          classes: Sequence[Hashable] | None = None,
                          importances: Sequence[tuple[str, float]] = ()) -> EvalReport:
    if len(y_true) == 0:
        raise ValueError("test set is empty")
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred differ in length")
    if classes is None:
        present = set(y_true) | set(y_pred)
        if all(isinstance(c, Category) for c in present):
            classes = CATEGORIES
        else:
            classes = sorted(present)
    classes = tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    cm = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[pos[t], pos[p]] += 1
    precision, recall, f1 = {}, {}, {}
    for i, c in enumerate(classes):
        tp = int(cm[i, i])
        predicted = int(cm[:, i].sum())
        actual = int(cm[i, :].sum())
        precision[c] = tp / predicted if predicted else None
        recall[c] = tp / actual if actual else None
        f1[c] = 2 * tp / (predicted + actual) if actual else None
    present_f1 = [v for v in f1.values() if v is not None]
    return EvalReport(
        classes=classes,
        confusion=cm,
        precision=precision,
        recall=recall,
        f1=f1,
        macro_f1=sum(present_f1) / len(present_f1),
        accuracy=float(np.trace(cm)) / cm.sum(),
        importances=tuple(importances),
    )


def ranked_importances(model, feature_names: Sequence[str]) -> tuple[tuple[str, float], ...]:
    scores = np.asarray(model.feature_importances_, dtype=float)
    order = sorted(range(len(feature_names)), key=lambda i: (-scores[i], feature_names[i]))
    return tuple((feature_names[i], float(scores[i])) for i in order)


def evaluate(model, X, y, feature_names: Sequence[str] | None = None) -> EvalReport:
    """Score ``model`` on a held-out set."""
    if len(y) == 0:
        raise ValueError("test set is empty")
    pred = model.predict(np.asarray(X, dtype=float))
    names = list(feature_names) if feature_names is not None else [f"x{i}" for i in range(np.shape(X)[1])]
    classes = CATEGORIES if all(isinstance(c, Category) for c in model.classes_) else None
    return classification_report(list(y), pred, classes=classes, importances=ranked_importances(model, names))


def write_eval_report(report: EvalReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_importances_csv(report: EvalReport, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "score"])
        for name, score in report.importances:
            w.writerow([name, f"{score:.10g}"])
    return path
