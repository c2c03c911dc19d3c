from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.errors import InvalidInput, NumericalError
from src.spectral.network import Activation


@dataclass
class SpatialCache:
    inputs: List[np.ndarray]
    pre: List[np.ndarray]


def spatial_forward(X: np.ndarray, L: np.ndarray, weights: List[np.ndarray],
                    activation: Activation) -> Tuple[np.ndarray, SpatialCache]:
    """
    Message-passing baseline used when the Fourier stack is ablated:
    H <- sigma(L H W_l) for each layer, starting from H = X.

    Raises:
        InvalidInput: On a shape mismatch.
        NumericalError: On a non-finite intermediate.
    """
    if L.shape != (X.shape[0], X.shape[0]):
        raise InvalidInput(f"filter {L.shape} does not match {X.shape[0]} nodes")
    H = X
    cache = SpatialCache(inputs=[], pre=[])
    for layer, W in enumerate(weights):
        pre = L @ H @ W
        if not np.all(np.isfinite(pre)):
            raise NumericalError(f"non-finite values in spatial layer {layer}")
        cache.inputs.append(H)
        cache.pre.append(pre)
        H = activation(pre)
    return H, cache


def spatial_backward(grad: np.ndarray, cache: SpatialCache, L: np.ndarray, weights: List[np.ndarray],
                     activation: Activation) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Returns the gradient w.r.t. X and each layer weight."""
    grad_W: List[np.ndarray] = [None] * len(weights)
    for layer in reversed(range(len(weights))):
        grad_pre = grad * activation.derivative(cache.pre[layer])
        propagated = L @ cache.inputs[layer]
        grad_W[layer] = propagated.T @ grad_pre
        grad = L.T @ grad_pre @ weights[layer].T
    return grad, grad_W
