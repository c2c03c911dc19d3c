from dataclasses import dataclass

import numpy as np

from src.errors import InvalidInput


@dataclass(frozen=True)
class SpeakerTable:
    """
    Trainable speaker embedding table.

    Column `s` of `W` is the embedding of speaker `s`; multiplying by a
    one-hot speaker vector reduces to selecting that column.

    Attributes:
        W (np.ndarray): Real matrix [d_model × n_speakers].
    """
    W: np.ndarray

    @property
    def n_speakers(self) -> int:
        return self.W.shape[1]

    @property
    def d_model(self) -> int:
        return self.W.shape[0]


def _check_ids(speaker_ids: np.ndarray, n_speakers: int) -> np.ndarray:
    ids = np.asarray(speaker_ids)
    if ids.size and (ids.min() < 0 or ids.max() >= n_speakers):
        raise IndexError(f"speaker id out of range for a table of {n_speakers} speakers: {ids.tolist()}")
    return ids.astype(np.int64, copy=False)


def embed_speaker(speaker_id: int, table: SpeakerTable) -> np.ndarray:
    """
    Returns the embedding S_i = W_speaker · onehot(speaker_id).

    Raises:
        IndexError: If the id is negative or not smaller than the number of columns.
    """
    if not 0 <= int(speaker_id) < table.n_speakers:
        raise IndexError(f"speaker id {speaker_id} out of range [0, {table.n_speakers})")
    return table.W[:, int(speaker_id)].copy()


def embed_speakers(speaker_ids: np.ndarray, table: SpeakerTable) -> np.ndarray:
    """Embeds a whole conversation at once: returns [N × d_model]."""
    ids = _check_ids(speaker_ids, table.n_speakers)
    return table.W[:, ids].T.copy()


def embed_speakers_backward(speaker_ids: np.ndarray, grad: np.ndarray, table: SpeakerTable) -> np.ndarray:
    """
    Gradient of the table given the gradient of `embed_speakers` output.

    Args:
        speaker_ids (np.ndarray): Ids used in the forward pass, [N].
        grad (np.ndarray): Upstream gradient, [N × d_model].
        table (SpeakerTable): The table used in the forward pass.

    Returns:
        np.ndarray: Gradient w.r.t. W, [d_model × n_speakers].
    """
    ids = _check_ids(speaker_ids, table.n_speakers)
    if grad.shape != (ids.shape[0], table.d_model):
        raise InvalidInput(f"gradient shape {grad.shape} does not match ({ids.shape[0]}, {table.d_model})")
    grad_W = np.zeros_like(table.W)
    # repeated speakers accumulate
    np.add.at(grad_W.T, ids, grad)
    return grad_W
