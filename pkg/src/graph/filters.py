from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.errors import InvalidInput


@dataclass(frozen=True)
class FilterPair:
    """
    Low- and high-pass graph filters of one interaction graph.

        L_low  = I + D^-1/2 A D^-1/2
        L_high = I - D^-1/2 A D^-1/2

    Attributes:
        low (np.ndarray): Low-pass filter [n × n].
        high (np.ndarray): High-pass filter [n × n].
    """
    low: np.ndarray
    high: np.ndarray

    def band(self, name: str) -> np.ndarray:
        if name == "low":
            return self.low
        if name == "high":
            return self.high
        raise InvalidInput(f"unknown band '{name}'")


def _check_adjacency(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"adjacency must be square, got {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12):
        raise InvalidInput("adjacency must be symmetric")
    if np.any(A < 0):
        raise InvalidInput("adjacency weights must be non-negative")
    if np.any(np.diag(A) != 0):
        raise InvalidInput("adjacency must have a zero diagonal")
    return A


def normalized_adjacency(A: np.ndarray) -> np.ndarray:
    """
    D^-1/2 A D^-1/2 with D_ii = sum_j A_ij; zero-degree nodes get D^-1/2_ii = 0.
    """
    A = _check_adjacency(A)
    degree = A.sum(axis=1)
    inv_sqrt = np.zeros_like(degree)
    np.divide(1.0, np.sqrt(degree), out=inv_sqrt, where=degree > 0)
    return inv_sqrt[:, None] * A * inv_sqrt[None, :]


def normalized_filters(A: np.ndarray) -> FilterPair:
    """
    Builds the low/high-pass filter pair; L_low + L_high = 2I holds exactly.

    Raises:
        InvalidInput: If A is not square, symmetric, non-negative with zero diagonal.
    """
    N = normalized_adjacency(A)
    eye = np.eye(N.shape[0])
    return FilterPair(low=eye + N, high=eye - N)


def filter_eigenvalues(pair: FilterPair) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues of (L_low, L_high) by dense symmetric eigensolve."""
    return np.linalg.eigvalsh(pair.low), np.linalg.eigvalsh(pair.high)
