from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from src.errors import InvalidConfig, InvalidInput, NumericalError
from src.spectral.dft import FrequencyFeatures, dft_nodes
from src.spectral.operator import FourierGraphOperator, fgo_apply_backward


@dataclass(frozen=True)
class Activation:
    """
    Real nonlinearity applied separately to real and imaginary parts of
    complex activations.

    Attributes:
        name (str): "leaky_relu", "relu", "tanh" or "identity".
        slope (float): Negative slope of "leaky_relu".
    """
    name: str = "leaky_relu"
    slope: float = 0.01

    def __post_init__(self):
        if self.name not in ("leaky_relu", "relu", "tanh", "identity"):
            raise InvalidConfig(f"unknown activation '{self.name}'")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if self.name == "leaky_relu":
            return np.where(x > 0, x, self.slope * x)
        if self.name == "relu":
            return np.maximum(x, 0.0)
        if self.name == "tanh":
            return np.tanh(x)
        return x

    def derivative(self, x: np.ndarray) -> np.ndarray:
        if self.name == "leaky_relu":
            return np.where(x > 0, 1.0, self.slope)
        if self.name == "relu":
            return (x > 0).astype(np.float64)
        if self.name == "tanh":
            return 1.0 - np.tanh(x) ** 2
        return np.ones_like(x)

    def complex(self, z: np.ndarray) -> np.ndarray:
        return self(z.real) + 1j * self(z.imag)

    def complex_backward(self, z: np.ndarray, grad: np.ndarray) -> np.ndarray:
        return self.derivative(z.real) * grad.real + 1j * self.derivative(z.imag) * grad.imag


@dataclass(frozen=True)
class FgnStack:
    """
    M + 1 Fourier graph operators of one band and the shared nonlinearity.

    Attributes:
        layers (List[FourierGraphOperator]): Operators S_0 .. S_M.
        activation (Activation): Nonlinearity.
    """
    layers: List[FourierGraphOperator]
    activation: Activation = field(default_factory=Activation)

    def __post_init__(self):
        if not self.layers:
            raise InvalidInput("a Fourier stack needs at least one layer")
        shape = self.layers[0].S.shape
        for layer in self.layers:
            if layer.S.shape != shape:
                raise InvalidInput(f"layer operators differ in shape: {layer.S.shape} vs {shape}")

    @property
    def depth(self) -> int:
        """M, the index of the last layer."""
        return len(self.layers) - 1


@dataclass
class FgnCache:
    spectrum: np.ndarray
    running: List[np.ndarray]
    pre: List[np.ndarray]


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite values in {what}")


def fgn_forward_band(F: FrequencyFeatures, stack: FgnStack) -> Tuple[FrequencyFeatures, FgnCache]:
    """
    One band of the Fourier graph network:

        Y = sum_{m=0}^{M} sigma(F S_0 ... S_m + b_m)

    The running product is kept incrementally, H_m = H_{m-1} S_m.

    Returns:
        Tuple[FrequencyFeatures, FgnCache]: Output spectrum and backward cache.

    Raises:
        InvalidInput: If the stack does not match the spectrum shape.
        NumericalError: On a non-finite intermediate.
    """
    if stack.layers[0].n_freq != F.n_nodes or stack.layers[0].d != F.d:
        raise InvalidInput(f"stack shape {stack.layers[0].S.shape} does not match spectrum {F.data.shape}")
    H = F.data
    Y = np.zeros_like(H, dtype=np.complex128)
    cache = FgnCache(spectrum=F.data, running=[], pre=[])
    for m, layer in enumerate(stack.layers):
        H = np.einsum("fd,fde->fe", H, layer.S)
        pre = H + layer.b
        _check_finite(pre, f"Fourier layer {m}")
        cache.running.append(H)
        cache.pre.append(pre)
        Y = Y + stack.activation.complex(pre)
    return FrequencyFeatures(data=Y), cache


def fgn_forward(X: np.ndarray, stack_low: FgnStack, stack_high: FgnStack) -> Tuple[FrequencyFeatures, FrequencyFeatures]:
    """Dual-band forward pass: both stacks read the same DFT of X."""
    F = dft_nodes(X)
    Y_low, _ = fgn_forward_band(F, stack_low)
    Y_high, _ = fgn_forward_band(F, stack_high)
    return Y_low, Y_high


def fgn_backward(grad: np.ndarray, cache: FgnCache, stack: FgnStack) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """
    Gradient of `fgn_forward_band` (complex convention G = dL/dRe + i dL/dIm).

    Args:
        grad (np.ndarray): Gradient of the output spectrum [n × d].
        cache (FgnCache): Cache from the forward pass.
        stack (FgnStack): The stack used in the forward pass.

    Returns:
        Tuple: (gradient of the input spectrum, gradients of S_0..S_M,
        gradients of b_0..b_M).
    """
    n_layers = len(stack.layers)
    grad_S: List[np.ndarray] = [None] * n_layers
    grad_b: List[np.ndarray] = [None] * n_layers
    grad_H = np.zeros_like(cache.spectrum, dtype=np.complex128)
    for m in reversed(range(n_layers)):
        grad_pre = stack.activation.complex_backward(cache.pre[m], grad)
        grad_b[m] = grad_pre.sum(axis=0)
        grad_H = grad_H + grad_pre
        previous = cache.running[m - 1] if m > 0 else cache.spectrum
        grad_H, grad_S[m] = fgo_apply_backward(previous, stack.layers[m].S, grad_H)
    return grad_H, grad_S, grad_b
