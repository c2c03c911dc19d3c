from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import logsumexp

from src.errors import InvalidConfig, InvalidInput

NORM_EPS = 1e-12


@dataclass(frozen=True)
class ContrastiveBatch:
    """
    Band embeddings of one conversation graph.

    Every node of one band is an anchor; all 3N nodes of the other band are
    its negatives (including the anchor's own node).

    Attributes:
        low (np.ndarray): Low-band node embeddings [3N × d].
        high (np.ndarray): High-band node embeddings [3N × d].
        tau (float): Temperature, > 0.
        normalize (bool): L2-normalize rows before inner products.
    """
    low: np.ndarray
    high: np.ndarray
    tau: float
    normalize: bool = True

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidConfig(f"temperature must be positive, got {self.tau}")
        if self.low.shape != self.high.shape or self.low.ndim != 2:
            raise InvalidInput(f"band embeddings differ in shape: {self.low.shape} vs {self.high.shape}")


def l2_normalize(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row-normalizes X with norms clamped at 1e-12; returns (rows, clamped norms)."""
    norms = np.maximum(np.linalg.norm(X, axis=1), NORM_EPS)
    return X / norms[:, None], norms


def l2_normalize_backward(grad: np.ndarray, Y: np.ndarray, X: np.ndarray, norms: np.ndarray) -> np.ndarray:
    clamped = np.linalg.norm(X, axis=1) <= NORM_EPS
    projected = grad - Y * np.sum(Y * grad, axis=1, keepdims=True)
    return np.where(clamped[:, None], grad, projected) / norms[:, None]


def _anchor_loss(anchors: np.ndarray, negatives: np.ndarray, tau: float) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    mean_a [-1/tau + log(e^{1/tau} + sum_i e^{<a, n_i>/tau})] and its gradients
    w.r.t. anchors and negatives.
    """
    n_anchor = anchors.shape[0]
    sims = anchors @ negatives.T / tau
    logits = np.concatenate([np.full((n_anchor, 1), 1.0 / tau), sims], axis=1)
    lse = logsumexp(logits, axis=1)
    loss = float(np.mean(lse - 1.0 / tau))
    weights = np.exp(sims - lse[:, None]) / n_anchor
    return loss, weights @ negatives / tau, weights.T @ anchors / tau


def _prepared(batch: ContrastiveBatch):
    if batch.normalize:
        low, low_norms = l2_normalize(batch.low)
        high, high_norms = l2_normalize(batch.high)
        return low, high, low_norms, high_norms
    return batch.low, batch.high, None, None


def lfcl(batch: ContrastiveBatch) -> float:
    """Low-band anchors against every high-band node."""
    low, high, _, _ = _prepared(batch)
    return _anchor_loss(low, high, batch.tau)[0]


def hfcl(batch: ContrastiveBatch) -> float:
    """High-band anchors against every low-band node."""
    low, high, _, _ = _prepared(batch)
    return _anchor_loss(high, low, batch.tau)[0]


def ccl(batch: ContrastiveBatch) -> float:
    return lfcl(batch) + hfcl(batch)


def contrastive_loss_and_grads(batch: ContrastiveBatch) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """
    Both band losses and the gradient of their sum w.r.t. the raw band embeddings.

    Returns:
        Tuple: (lfcl, hfcl, grad of low [3N × d], grad of high [3N × d]).
    """
    low, high, low_norms, high_norms = _prepared(batch)
    low_loss, g_low_a, g_high_n = _anchor_loss(low, high, batch.tau)
    high_loss, g_high_a, g_low_n = _anchor_loss(high, low, batch.tau)
    grad_low = g_low_a + g_low_n
    grad_high = g_high_a + g_high_n
    if batch.normalize:
        grad_low = l2_normalize_backward(grad_low, low, batch.low, low_norms)
        grad_high = l2_normalize_backward(grad_high, high, batch.high, high_norms)
    return low_loss, high_loss, grad_low, grad_high
