from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from src.errors import InvalidInput


@dataclass(frozen=True)
class MetricsReport:
    """
    Classification metrics over a set of utterances.

    Per-class accuracy is the class recall; the weighted metrics are
    support-weighted means of the per-class values.

    Attributes:
        per_class_acc (np.ndarray): [C].
        per_class_f1 (np.ndarray): [C].
        support (np.ndarray): Utterances per true class [C].
        weighted_acc (float): W-Acc.
        weighted_f1 (float): W-F1.
        confusion (np.ndarray): Rows are true classes, columns predictions [C × C].
        accuracy (float): Plain accuracy.
        masked_acc (Optional[float]): Accuracy on the caller's utterance mask.
        masked_count (int): Utterances in the mask.
    """
    per_class_acc: np.ndarray
    per_class_f1: np.ndarray
    support: np.ndarray
    weighted_acc: float
    weighted_f1: float
    confusion: np.ndarray
    accuracy: float
    masked_acc: Optional[float] = None
    masked_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "per_class_acc": self.per_class_acc.tolist(),
            "per_class_f1": self.per_class_f1.tolist(),
            "support": self.support.tolist(),
            "weighted_acc": self.weighted_acc,
            "weighted_f1": self.weighted_f1,
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "masked_acc": self.masked_acc,
            "masked_count": self.masked_count,
        }

    def table(self) -> str:
        lines = ["class  support     acc      f1"]
        for c in range(self.support.shape[0]):
            lines.append(f"{c:>5}  {int(self.support[c]):>7}  {self.per_class_acc[c]:6.4f}  {self.per_class_f1[c]:6.4f}")
        lines.append(f"W-Acc {self.weighted_acc:.4f}  W-F1 {self.weighted_f1:.4f}")
        if self.masked_acc is not None:
            lines.append(f"masked acc {self.masked_acc:.4f} over {self.masked_count} utterances")
        return "\n".join(lines)


def _weighted(values: np.ndarray, support: np.ndarray) -> float:
    total = support.sum()
    return float(np.dot(values, support) / total) if total else 0.0


def compute_metrics(labels: np.ndarray, predictions: np.ndarray, n_classes: int,
                    mask: Optional[np.ndarray] = None) -> MetricsReport:
    """
    Metrics from true labels and predictions.

    Classes absent from both get F1 0 and weight 0.

    Args:
        labels (np.ndarray): True labels [n].
        predictions (np.ndarray): Predicted labels [n].
        n_classes (int): C.
        mask (Optional[np.ndarray]): Boolean utterance mask for `masked_acc`.
    """
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape:
        raise InvalidInput(f"{labels.shape[0]} labels but {predictions.shape[0]} predictions")
    classes: List[int] = list(range(n_classes))
    _, recall, f1, support = precision_recall_fscore_support(
        labels, predictions, labels=classes, average=None, zero_division=0
    )
    masked_acc = None
    masked_count = 0
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        masked_count = int(mask.sum())
        if masked_count:
            masked_acc = float(np.mean(labels[mask] == predictions[mask]))
    return MetricsReport(
        per_class_acc=np.asarray(recall, dtype=np.float64),
        per_class_f1=np.asarray(f1, dtype=np.float64),
        support=np.asarray(support, dtype=np.int64),
        weighted_acc=_weighted(recall, support),
        weighted_f1=_weighted(f1, support),
        confusion=confusion_matrix(labels, predictions, labels=classes),
        accuracy=float(np.mean(labels == predictions)) if labels.size else 0.0,
        masked_acc=masked_acc,
        masked_count=masked_count,
    )
