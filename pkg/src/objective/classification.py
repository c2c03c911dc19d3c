from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np
from scipy.special import log_softmax, softmax

from src.errors import InvalidConfig, InvalidInput


@dataclass(frozen=True)
class LossReport:
    """
    Loss terms of one conversation, batch or epoch.

    Invariants: ccl = lfcl + hfcl and total = ce + lambda_ccl * ccl.
    """
    ce: float
    lfcl: float
    hfcl: float
    ccl: float
    total: float
    lambda_ccl: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def _check_labels(labels: np.ndarray, n_rows: int, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n_rows,):
        raise InvalidInput(f"expected {n_rows} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise InvalidInput(f"labels must lie in [0, {n_classes}), got {labels.tolist()}")
    return labels


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    """-mean log softmax(logits)[i, label_i], via log-softmax."""
    labels = _check_labels(labels, logits.shape[0], logits.shape[1])
    log_probs = log_softmax(logits, axis=1)
    return float(-np.mean(log_probs[np.arange(labels.shape[0]), labels]))


def cross_entropy_grad(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient (softmax - onehot) / N of `cross_entropy` w.r.t. logits."""
    labels = _check_labels(labels, logits.shape[0], logits.shape[1])
    grad = softmax(logits, axis=1)
    grad[np.arange(labels.shape[0]), labels] -= 1.0
    return grad / labels.shape[0]


def cross_entropy_from_probs(probs: np.ndarray, labels: np.ndarray) -> float:
    """
    -mean log probs[i, label_i] for probability rows.

    Raises:
        InvalidInput: If a row does not sum to 1 within 1e-6 or a label is out of range.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or not np.allclose(probs.sum(axis=1), 1.0, rtol=0.0, atol=1e-6):
        raise InvalidInput("probability rows must sum to 1")
    labels = _check_labels(labels, probs.shape[0], probs.shape[1])
    with np.errstate(divide="ignore"):
        picked = np.log(probs[np.arange(labels.shape[0]), labels])
    return float(-np.mean(picked))


def total_loss(ce: float, ccl: float, lambda_ccl: float) -> float:
    if lambda_ccl < 0:
        raise InvalidConfig(f"lambda_ccl must be non-negative, got {lambda_ccl}")
    return ce + lambda_ccl * ccl


def make_report(ce: float, lfcl: float, hfcl: float, lambda_ccl: float) -> LossReport:
    contrastive = lfcl + hfcl
    return LossReport(ce=ce, lfcl=lfcl, hfcl=hfcl, ccl=contrastive,
                      total=total_loss(ce, contrastive, lambda_ccl), lambda_ccl=lambda_ccl)
