from dataclasses import dataclass

import numpy as np

from src.errors import InvalidInput, NumericalError
from src.log.system_logger import Logger, get_system_logger

LOG: Logger = get_system_logger(__name__)

DISCARD_TOLERANCE = 1e-9
RESIDUE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class FrequencyFeatures:
    """
    Node features in the frequency domain of the node axis.

    Row f is frequency bin f of every feature column. When produced from a
    real input the rows are conjugate symmetric:
    data[f] = conj(data[(n - f) mod n]).

    Attributes:
        data (np.ndarray): Complex matrix [n_nodes × d].
    """
    data: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


def dft_nodes(X: np.ndarray) -> FrequencyFeatures:
    """
    Unnormalized forward DFT along the node axis:
    Y[f, j] = sum_s X[s, j] exp(-2 pi i f s / n).

    Raises:
        InvalidInput: If X is not a non-empty 2-D matrix.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidInput(f"expected a matrix with at least one node, got shape {X.shape}")
    return FrequencyFeatures(data=np.fft.fft(X, axis=0))


def conjugate_residue(Y: FrequencyFeatures) -> float:
    """Max-abs deviation of Y from conjugate symmetry along the node axis."""
    mirrored = np.conj(np.roll(Y.data[::-1], 1, axis=0))
    return float(np.max(np.abs(Y.data - mirrored))) if Y.data.size else 0.0


def idft_nodes(Y: FrequencyFeatures, project_real: bool = False) -> np.ndarray:
    """
    1/n-scaled inverse DFT along the node axis, returning the real part.

    An imaginary residue up to 1e-9 is discarded silently. In strict mode a
    residue above 1e-6 means an upstream operator broke conjugate symmetry.
    With `project_real` any residue is dropped and only logged.

    Args:
        Y (FrequencyFeatures): Frequency-domain features.
        project_real (bool): Keep the real part regardless of the residue.

    Returns:
        np.ndarray: Real matrix [n × d].

    Raises:
        NumericalError: In strict mode, if the imaginary residue exceeds 1e-6.
    """
    Z = np.fft.ifft(Y.data, axis=0)
    residue = float(np.max(np.abs(Z.imag))) if Z.size else 0.0
    if not np.isfinite(residue):
        raise NumericalError("non-finite values in inverse DFT")
    if residue > DISCARD_TOLERANCE:
        if not project_real and residue > RESIDUE_TOLERANCE:
            raise NumericalError(f"imaginary residue {residue:.3e} after inverse DFT exceeds {RESIDUE_TOLERANCE:g}")
        LOG.debug(f"Discarding imaginary residue {residue:.3e} after inverse DFT.")
    return np.ascontiguousarray(Z.real)


def dft_backward(grad: np.ndarray) -> np.ndarray:
    """Gradient of a real input X given the gradient of Y = dft_nodes(X)."""
    return np.real(grad.shape[0] * np.fft.ifft(grad, axis=0))


def idft_backward(grad: np.ndarray) -> np.ndarray:
    """Gradient of Y (complex convention) given the gradient of Re(idft(Y))."""
    return np.fft.fft(grad, axis=0) / grad.shape[0]
