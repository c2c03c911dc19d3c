from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
from scipy.special import expit

from src.errors import InvalidInput


@dataclass(frozen=True)
class GruDirection:
    """
    Parameters of one direction of a fully gated GRU.

    Gate blocks are stacked in the order reset, update, candidate:

        r  = sigmoid(Wx_r x + bx_r + Wh_r h + bh_r)
        z  = sigmoid(Wx_z x + bx_z + Wh_z h + bh_z)
        n  = tanh(Wx_n x + bx_n + r * (Wh_n h + bh_n))
        h' = (1 - z) * n + z * h

    Attributes:
        Wx (np.ndarray): Input weights [3H × d_in].
        Wh (np.ndarray): Recurrent weights [3H × H].
        bx (np.ndarray): Input bias [3H].
        bh (np.ndarray): Recurrent bias [3H].
    """
    Wx: np.ndarray
    Wh: np.ndarray
    bx: np.ndarray
    bh: np.ndarray

    @property
    def hidden(self) -> int:
        return self.Wh.shape[1]


@dataclass(frozen=True)
class EncoderParams:
    """
    Unimodal encoder parameters: a bidirectional GRU for text and affine
    maps for audio and visual features. Each GRU direction has hidden size
    d_model / 2 so that the concatenated state has width d_model.
    """
    gru_fw: GruDirection
    gru_bw: GruDirection
    W_a: np.ndarray
    b_a: np.ndarray
    W_v: np.ndarray
    b_v: np.ndarray

    @property
    def d_model(self) -> int:
        return 2 * self.gru_fw.hidden


@dataclass
class GruCache:
    seq: np.ndarray
    h_prev: List[np.ndarray]
    r: List[np.ndarray]
    z: List[np.ndarray]
    n: List[np.ndarray]
    gh_n: List[np.ndarray]


def gru_forward(seq: np.ndarray, p: GruDirection) -> Tuple[np.ndarray, GruCache]:
    """
    Runs one GRU direction over a sequence from h_0 = 0.

    Args:
        seq (np.ndarray): Inputs [N × d_in].
        p (GruDirection): Parameters.

    Returns:
        Tuple[np.ndarray, GruCache]: Hidden states [N × H] and the backward cache.
    """
    H = p.hidden
    gx = seq @ p.Wx.T + p.bx
    h = np.zeros(H)
    out = np.empty((seq.shape[0], H))
    cache = GruCache(seq=seq, h_prev=[], r=[], z=[], n=[], gh_n=[])
    for t in range(seq.shape[0]):
        gh = p.Wh @ h + p.bh
        r = expit(gx[t, :H] + gh[:H])
        z = expit(gx[t, H:2 * H] + gh[H:2 * H])
        n = np.tanh(gx[t, 2 * H:] + r * gh[2 * H:])
        cache.h_prev.append(h)
        cache.r.append(r)
        cache.z.append(z)
        cache.n.append(n)
        cache.gh_n.append(gh[2 * H:])
        h = (1.0 - z) * n + z * h
        out[t] = h
    return out, cache


def gru_backward(grad_out: np.ndarray, cache: GruCache, p: GruDirection) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """
    Backpropagation through time for one GRU direction.

    Args:
        grad_out (np.ndarray): Gradient of the hidden states [N × H].
        cache (GruCache): Cache from `gru_forward`.
        p (GruDirection): Parameters used in the forward pass.

    Returns:
        Tuple[np.ndarray, Dict[str, np.ndarray]]: Gradient of the inputs
        [N × d_in] and gradients keyed "Wx", "Wh", "bx", "bh".
    """
    H = p.hidden
    steps = grad_out.shape[0]
    d_gx = np.zeros((steps, 3 * H))
    d_Wh = np.zeros_like(p.Wh)
    d_bh = np.zeros_like(p.bh)
    dh_next = np.zeros(H)
    for t in reversed(range(steps)):
        h_prev, r, z, n, gh_n = cache.h_prev[t], cache.r[t], cache.z[t], cache.n[t], cache.gh_n[t]
        dh = grad_out[t] + dh_next
        dn_pre = dh * (1.0 - z) * (1.0 - n * n)
        dz_pre = dh * (h_prev - n) * z * (1.0 - z)
        dr_pre = dn_pre * gh_n * r * (1.0 - r)
        d_gx[t] = np.concatenate([dr_pre, dz_pre, dn_pre])
        d_gh = np.concatenate([dr_pre, dz_pre, dn_pre * r])
        d_Wh += np.outer(d_gh, h_prev)
        d_bh += d_gh
        dh_next = dh * z + p.Wh.T @ d_gh
    grads = {
        "Wx": d_gx.T @ cache.seq,
        "Wh": d_Wh,
        "bx": d_gx.sum(axis=0),
        "bh": d_bh,
    }
    return d_gx @ p.Wx, grads


def _as_sequence(seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InvalidInput("text sequence must be a non-empty list of equal-length vectors")
    return arr


def encode_text_with_cache(seq, params: EncoderParams) -> Tuple[np.ndarray, Tuple[GruCache, GruCache]]:
    """
    Bidirectional GRU over the whole conversation.

    Position i of the output is [h_fw(i) ; h_bw(i)], where the backward
    direction is the forward recurrence run on the reversed sequence and
    reversed back.
    """
    arr = _as_sequence(seq)
    if arr.shape[1] != params.gru_fw.Wx.shape[1]:
        raise InvalidInput(f"text dim {arr.shape[1]} does not match encoder input dim {params.gru_fw.Wx.shape[1]}")
    fw, fw_cache = gru_forward(arr, params.gru_fw)
    bw, bw_cache = gru_forward(arr[::-1], params.gru_bw)
    return np.concatenate([fw, bw[::-1]], axis=1), (fw_cache, bw_cache)


def encode_text(seq, params: EncoderParams) -> np.ndarray:
    """
    Context-aware text representations u_t, [N × d_model].

    Raises:
        InvalidInput: If the sequence is empty or its dimension is wrong.
    """
    out, _ = encode_text_with_cache(seq, params)
    return out


def encode_text_backward(grad_out: np.ndarray, caches: Tuple[GruCache, GruCache],
                         params: EncoderParams) -> Tuple[np.ndarray, Dict[str, np.ndarray], Dict[str, np.ndarray]]:
    """
    Gradient of `encode_text` w.r.t. its input and both GRU directions.

    Returns:
        Tuple: (grad of sequence [N × d_t], forward-direction grads, backward-direction grads).
    """
    H = params.gru_fw.hidden
    fw_cache, bw_cache = caches
    d_seq_fw, g_fw = gru_backward(grad_out[:, :H], fw_cache, params.gru_fw)
    d_seq_bw, g_bw = gru_backward(grad_out[:, H:][::-1], bw_cache, params.gru_bw)
    return d_seq_fw + d_seq_bw[::-1], g_fw, g_bw
