import threading
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.errors import InvalidConfig, InvalidInput
from src.log.system_logger import Logger, get_system_logger

LOG: Logger = get_system_logger(__name__)

MODALITIES: Tuple[str, ...] = ("t", "a", "v")


class DegenerateEdgeCounter:
    """
    Process-wide count of edges whose endpoint had a zero-norm feature
    vector (cosine similarity undefined, treated as 0).

    Graphs are built from training worker threads, so updates hold a lock.
    """
    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    @property
    def count(self) -> int:
        with self._lock:
            return self._count

    def increment(self, amount: int = 1) -> None:
        with self._lock:
            self._count += int(amount)

    def reset(self) -> None:
        with self._lock:
            self._count = 0


ZERO_NORM_EDGES = DegenerateEdgeCounter()


@dataclass(frozen=True)
class InteractionGraph:
    """
    Multimodal interaction graph of one conversation.

    Nodes are laid out modality-major: all text nodes by utterance index,
    then audio, then visual, so node `m * n_utt + i` is modality `m` of
    utterance `i`.

    Attributes:
        n_utt (int): Number of utterances N.
        A (np.ndarray): Symmetric weighted adjacency [3N × 3N], zero diagonal.
        X (np.ndarray): Node features [3N × d].
        window_k (int): Same-modal window radius.
        phi (float): Cross-modal weight scale.
        degenerate_pairs (int): Edges with a zero-norm endpoint.
    """
    n_utt: int
    A: np.ndarray
    X: np.ndarray
    window_k: int
    phi: float
    degenerate_pairs: int = 0

    @property
    def n_nodes(self) -> int:
        return 3 * self.n_utt

    def node_index(self, modality: int, utterance: int) -> int:
        return modality * self.n_utt + utterance


def _angular_similarity(cos: np.ndarray) -> np.ndarray:
    return 1.0 - np.arccos(np.clip(cos, -1.0, 1.0)) / np.pi


def edge_weight_same(x_i: np.ndarray, x_j: np.ndarray) -> float:
    """
    Same-modal edge weight 1 - arccos(cos_sim(x_i, x_j)) / pi, in [0, 1].

    A zero-norm endpoint makes the similarity undefined; it is treated as 0
    (weight 0.5) and counted in `ZERO_NORM_EDGES`.
    """
    x_i = np.asarray(x_i, dtype=np.float64)
    x_j = np.asarray(x_j, dtype=np.float64)
    if x_i.shape != x_j.shape:
        raise InvalidInput(f"endpoint shapes differ: {x_i.shape} vs {x_j.shape}")
    n_i, n_j = np.linalg.norm(x_i), np.linalg.norm(x_j)
    if n_i == 0.0 or n_j == 0.0:
        ZERO_NORM_EDGES.increment()
        LOG.warning("Zero-norm node feature; edge similarity treated as 0.")
        return 0.5
    return float(_angular_similarity(np.dot(x_i, x_j) / (n_i * n_j)))


def edge_weight_cross(x_i: np.ndarray, x_j: np.ndarray, phi: float) -> float:
    """
    Cross-modal edge weight phi * edge_weight_same(x_i, x_j), in [0, phi].

    Raises:
        InvalidConfig: If phi is not positive.
    """
    if not phi > 0:
        raise InvalidConfig(f"phi must be positive, got {phi}")
    return phi * edge_weight_same(x_i, x_j)


def node_features(x_t: np.ndarray, x_a: np.ndarray, x_v: np.ndarray) -> np.ndarray:
    """Stacks per-modality representations [N × d] into node order [3N × d]."""
    if not (x_t.shape == x_a.shape == x_v.shape):
        raise InvalidInput(f"modality shapes differ: {x_t.shape}, {x_a.shape}, {x_v.shape}")
    return np.concatenate([x_t, x_a, x_v], axis=0)


def _edge_masks(n_utt: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes = np.arange(3 * n_utt)
    utt = nodes % n_utt
    mod = nodes // n_utt
    gap = np.abs(utt[:, None] - utt[None, :])
    same_modal = (mod[:, None] == mod[None, :]) & (gap > 0) & (gap <= k)
    cross_modal = (utt[:, None] == utt[None, :]) & (mod[:, None] != mod[None, :])
    return same_modal, cross_modal


def build_interaction_graph(X: np.ndarray, k: int, phi: float) -> InteractionGraph:
    """
    Builds the 3N-node interaction graph from node features in node order.

    Same-modal nodes of utterances i, j are connected iff 0 < |i - j| <= k;
    the three modality nodes of each utterance are pairwise connected.

    Args:
        X (np.ndarray): Node features [3N × d] (see `node_features`).
        k (int): Window radius, k >= 0 (0 disables same-modal edges).
        phi (float): Cross-modal weight scale, phi > 0.

    Returns:
        InteractionGraph: The weighted graph.

    Raises:
        InvalidInput: If X is not [3N × d] with N >= 1.
        InvalidConfig: If k < 0 or phi <= 0.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[0] % 3:
        raise InvalidInput(f"node features must be [3N × d] with N >= 1, got {X.shape}")
    if k < 0:
        raise InvalidConfig(f"window radius must be non-negative, got {k}")
    if not phi > 0:
        raise InvalidConfig(f"phi must be positive, got {phi}")

    n_utt = X.shape[0] // 3
    norms = np.linalg.norm(X, axis=1)
    zero = norms == 0.0
    unit = np.divide(X, norms[:, None], out=np.zeros_like(X), where=~zero[:, None])
    weights = _angular_similarity(unit @ unit.T)

    same_modal, cross_modal = _edge_masks(n_utt, k)
    A = np.where(same_modal, weights, 0.0) + np.where(cross_modal, phi * weights, 0.0)
    # mirror the upper triangle so A is exactly symmetric
    A = np.triu(A, 1)
    A = A + A.T

    edges = np.triu(same_modal | cross_modal, 1)
    degenerate = int(np.count_nonzero(edges & (zero[:, None] | zero[None, :])))
    if degenerate:
        ZERO_NORM_EDGES.increment(degenerate)
        LOG.warning(f"{degenerate} edge(s) touch zero-norm node features; similarity treated as 0.")

    return InteractionGraph(n_utt=n_utt, A=A, X=X, window_k=k, phi=phi, degenerate_pairs=degenerate)


def expected_edge_counts(n_utt: int, k: int) -> Tuple[int, int]:
    """
    Closed-form undirected edge counts (same_modal, cross_modal) for N
    utterances and window radius k.
    """
    if k < n_utt:
        pairs = n_utt * k - k * (k + 1) // 2
    else:
        pairs = n_utt * (n_utt - 1) // 2
    return 3 * pairs, 3 * n_utt


def edge_counts(graph: InteractionGraph) -> Tuple[int, int]:
    """
    Counts undirected edges by type from the graph's structure masks.

    Edges are counted structurally, so a zero-weight edge (opposite
    endpoints) still counts.
    """
    same_modal, cross_modal = _edge_masks(graph.n_utt, graph.window_k)
    return int(np.count_nonzero(np.triu(same_modal, 1))), int(np.count_nonzero(np.triu(cross_modal, 1)))
