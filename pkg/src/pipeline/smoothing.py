from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.config.run_config import RunConfig
from src.corpus.corpus import Conversation, Corpus
from src.errors import NumericalError
from src.log.system_logger import Logger, get_system_logger
from src.pipeline.model import ablate, forward
from src.pipeline.params import ModelParams, init_params
from src.pipeline.trainer import train
from src.utils.decorators import log_duration

LOG: Logger = get_system_logger(__name__)


@dataclass(frozen=True)
class SmoothingRow:
    stack: str
    depth: int
    mean_cosine: float
    n_conversations: int


def mean_pairwise_cosine(nodes: np.ndarray) -> float:
    """
    Mean cosine similarity over all unordered pairs of distinct rows.

    Zero rows count as orthogonal to everything.
    """
    n = nodes.shape[0]
    if n < 2:
        return 1.0
    norms = np.linalg.norm(nodes, axis=1)
    unit = np.divide(nodes, norms[:, None], out=np.zeros_like(nodes), where=norms[:, None] > 0)
    sims = unit @ unit.T
    upper = np.triu_indices(n, k=1)
    return float(np.mean(sims[upper]))


def smoothing_score(conversations: Sequence[Conversation], params: ModelParams) -> float:
    """Per-conversation mean pairwise cosine of the final node embeddings, averaged."""
    scores = [mean_pairwise_cosine(forward(conv, params).nodes) for conv in conversations]
    score = float(np.mean(scores)) if scores else float("nan")
    if scores and not np.isfinite(score):
        raise NumericalError("non-finite over-smoothing score")
    return score


def depth_config(config: RunConfig, stack: str, depth: int) -> RunConfig:
    """Config of one sweep point: Fourier depth M, or spatial baseline with `depth` layers."""
    if stack == "spatial":
        return ablate(config, "fgn").with_overrides(spatial_layers=max(depth, 1))
    return config.with_overrides(depth=depth)


@log_duration("over-smoothing sweep")
def depth_sweep(corpus: Corpus, config: RunConfig, depths: Sequence[int] = (2, 4, 8),
                stacks: Sequence[str] = ("fourier", "spatial"), epochs: int = 0,
                split: str = "test") -> List[SmoothingRow]:
    """
    Over-smoothing measurement across depths for the Fourier stacks and the
    spatial baseline.

    With `epochs` > 0 each model is trained first (early stopping as
    configured); otherwise freshly initialized models from the config seed
    are measured.
    """
    conversations = corpus.split(split) or corpus.conversations
    rows: List[SmoothingRow] = []
    for stack in stacks:
        for depth in depths:
            cfg = depth_config(config, stack, depth)
            if epochs > 0:
                params = train(corpus, cfg.with_overrides(epochs=epochs), run_name=f"{stack}-{depth}").params
            else:
                params = init_params(cfg, corpus.dims, corpus.n_speakers, corpus.n_classes)
            score = smoothing_score(conversations, params)
            LOG.info(f"over-smoothing {stack} depth {depth}: mean pairwise cosine {score:.4f}")
            rows.append(SmoothingRow(stack=stack, depth=depth, mean_cosine=score,
                                     n_conversations=len(conversations)))
    return rows
