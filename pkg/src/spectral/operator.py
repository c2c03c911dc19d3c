from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from src.errors import InvalidConfig, InvalidInput
from src.spectral.dft import FrequencyFeatures

Band = Literal["low", "high"]
Mode = Literal["free", "circulant"]


@dataclass(frozen=True)
class FourierGraphOperator:
    """
    Per-frequency operator of one layer of one band.

    In circulant mode S[f] = lambda(f) W, where lambda is the DFT of the
    circulant-projected filter kernel. In free mode S[f] = lambda(f) Theta[bin(f)]
    with Theta a trained complex tensor over folded frequency bins.

    Attributes:
        band (str): "low" or "high".
        mode (str): "circulant" or "free".
        S (np.ndarray): Complex tensor [n_freq × d × d].
        b (np.ndarray): Complex bias [d].
    """
    band: Band
    mode: Mode
    S: np.ndarray
    b: np.ndarray

    @property
    def n_freq(self) -> int:
        return self.S.shape[0]

    @property
    def d(self) -> int:
        return self.S.shape[1]


def circulant_kernel(L: np.ndarray) -> np.ndarray:
    """
    First column of the circulant projection of L: c[s] = mean_i L[(i + s) mod n, i].

    Equal to the row projection for symmetric L and to the exact first column
    when L is circulant.
    """
    L = np.asarray(L, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] == 0:
        raise InvalidInput(f"filter must be a non-empty square matrix, got {L.shape}")
    n = L.shape[0]
    idx = np.arange(n)
    shifts = (idx[None, :] + idx[:, None]) % n
    # row s, column i holds L[(i + s) mod n, i]
    return L[shifts, idx[None, :]].mean(axis=1)


def filter_response(L: np.ndarray) -> np.ndarray:
    """Frequency response lambda(f) = DFT of the circulant kernel, complex [n]."""
    return np.fft.fft(circulant_kernel(L))


def bin_slots(n_bins: int, groups: int = 1) -> int:
    """Number of free-mode weight slots: K per residue class."""
    return n_bins * (groups // 2 + 1)


def frequency_bins(n: int, n_bins: int, groups: int = 1) -> np.ndarray:
    """
    Maps node frequencies 0..n-1 onto folded bins: round(2 min(f, n-f) / n (K - 1)).

    With `groups` > 1 the nodes are read as that many equal blocks (the
    modality-major layout). The residue r = f mod groups then separates the
    component shared by the blocks (r = 0) from the ones contrasting them;
    residues r and groups - r form one class, and class c adds c K to the bin.
    Conjugate frequencies f and n - f always share a bin.

    Raises:
        InvalidConfig: If K < 1 or groups < 1.
        InvalidInput: If n is not a multiple of groups.
    """
    if n_bins < 1:
        raise InvalidConfig(f"n_freq_bins must be at least 1, got {n_bins}")
    if groups < 1:
        raise InvalidConfig(f"bin groups must be at least 1, got {groups}")
    f = np.arange(n)
    folded = np.minimum(f, n - f)
    bins = np.rint(2.0 * folded / n * (n_bins - 1)).astype(np.int64)
    if groups > 1:
        if n % groups:
            raise InvalidInput(f"{n} nodes do not split into {groups} equal blocks")
        residue = f % groups
        bins += np.minimum(residue, groups - residue) * n_bins
    return bins


def build_fgo(L: np.ndarray, W: np.ndarray, mode: Mode = "circulant", band: Band = "low",
              theta: Optional[np.ndarray] = None, bias: Optional[np.ndarray] = None,
              n_bins: int = 8, groups: int = 1) -> FourierGraphOperator:
    """
    Builds the Fourier graph operator of filter L.

    Args:
        L (np.ndarray): Filter matrix [n × n].
        W (np.ndarray): Real weight [d × d].
        mode (str): "circulant" for S[f] = lambda(f) W; "free" for
            S[f] = lambda(f) theta[bin(f)].
        band (str): Band label carried by the operator.
        theta (Optional[np.ndarray]): Complex free-mode weights, one slot per
            bin (see `bin_slots`); when None every slot starts at W.
        bias (Optional[np.ndarray]): Complex bias [d]; zero when None.
        n_bins (int): K, used when theta is None.
        groups (int): Node blocks whose shared and contrasting frequencies get
            separate bins; 1 disables the split.

    Returns:
        FourierGraphOperator: The operator.
    """
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise InvalidInput(f"weight must be square, got {W.shape}")
    lam = filter_response(L)
    d = W.shape[0]
    if mode == "circulant":
        S = lam[:, None, None] * W[None, :, :]
    elif mode == "free":
        if theta is None:
            theta = np.repeat(W[None, :, :], bin_slots(n_bins, groups), axis=0).astype(np.complex128)
        classes = groups // 2 + 1
        if theta.ndim != 3 or theta.shape[1:] != (d, d) or theta.shape[0] % classes:
            raise InvalidInput(f"free-mode weights must be [{classes}K × {d} × {d}], got {theta.shape}")
        S = lam[:, None, None] * theta[frequency_bins(lam.shape[0], theta.shape[0] // classes, groups)]
    else:
        raise InvalidConfig(f"unknown operator mode '{mode}'")
    b = np.zeros(d, dtype=np.complex128) if bias is None else np.asarray(bias, dtype=np.complex128)
    if b.shape != (d,):
        raise InvalidInput(f"bias must have shape ({d},), got {b.shape}")
    return FourierGraphOperator(band=band, mode=mode, S=S, b=b)


def fgo_apply(Y: FrequencyFeatures, S: np.ndarray) -> FrequencyFeatures:
    """
    Per-frequency vector-matrix product Z[f] = Y[f] S[f].

    Raises:
        InvalidInput: If S is not [n × d × d] for Y of shape [n × d].
    """
    if S.ndim != 3 or S.shape[0] != Y.n_nodes or S.shape[1] != Y.d:
        raise InvalidInput(f"operator shape {S.shape} does not match features {Y.data.shape}")
    return FrequencyFeatures(data=np.einsum("fd,fde->fe", Y.data, S))


def fgo_apply_backward(Y: np.ndarray, S: np.ndarray, grad: np.ndarray):
    """
    Gradients of Z = fgo_apply(Y, S) w.r.t. Y and S (complex convention
    G = dL/dRe + i dL/dIm): G_Y = G_Z S^H and G_S[f] = Y[f]^H G_Z[f].
    """
    grad_Y = np.einsum("fe,fde->fd", grad, np.conj(S))
    grad_S = np.einsum("fd,fe->fde", np.conj(Y), grad)
    return grad_Y, grad_S


def weight_grad(grad_S: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Gradient of the real circulant-mode W from the gradient of S = lambda W."""
    return np.real(np.einsum("f,fde->de", np.conj(lam), grad_S))


def theta_grad(grad_S: np.ndarray, lam: np.ndarray, n_bins: int, groups: int = 1) -> np.ndarray:
    """Complex gradient of the free-mode Theta slots from the gradient of S."""
    bins = frequency_bins(lam.shape[0], n_bins, groups)
    grad = np.zeros((bin_slots(n_bins, groups),) + grad_S.shape[1:], dtype=np.complex128)
    np.add.at(grad, bins, np.conj(lam)[:, None, None] * grad_S)
    return grad
