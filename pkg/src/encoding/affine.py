from typing import Tuple

import numpy as np

from src.errors import InvalidInput


def encode_affine(x: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Affine unimodal encoder u = W x + b.

    Accepts a single vector [d_in] or a batch of row vectors [N × d_in].

    Args:
        x (np.ndarray): Input feature(s).
        W (np.ndarray): Weight matrix [d_model × d_in].
        b (np.ndarray): Bias [d_model].

    Returns:
        np.ndarray: [d_model] or [N × d_model].

    Raises:
        InvalidInput: If the trailing dimension of `x` does not match the columns of `W`.
    """
    x = np.asarray(x, dtype=np.float64)
    if W.ndim != 2 or x.shape[-1] != W.shape[1]:
        raise InvalidInput(f"input dim {x.shape[-1]} does not match weight columns {W.shape}")
    if b.shape != (W.shape[0],):
        raise InvalidInput(f"bias shape {b.shape} does not match weight rows {W.shape[0]}")
    return x @ W.T + b


def encode_affine_backward(x: np.ndarray, W: np.ndarray, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vector-Jacobian product of `encode_affine` for a batch [N × d_in].

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: Gradients w.r.t. (x, W, b).
    """
    x = np.atleast_2d(x)
    grad = np.atleast_2d(grad)
    return grad @ W, grad.T @ x, grad.sum(axis=0)


def fuse_speaker(u_m: np.ndarray, S_i: np.ndarray) -> np.ndarray:
    """
    Speaker- and context-aware representation x_m = u_m + S_i.

    Raises:
        InvalidInput: If the shapes differ.
    """
    u_m = np.asarray(u_m, dtype=np.float64)
    S_i = np.asarray(S_i, dtype=np.float64)
    if u_m.shape != S_i.shape:
        raise InvalidInput(f"cannot fuse shapes {u_m.shape} and {S_i.shape}")
    return u_m + S_i
