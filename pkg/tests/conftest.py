from typing import Callable, Dict

import numpy as np
import pytest

from src.config.run_config import build_run_config
from src.corpus.corpus import Conversation


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    """Small model: tanh keeps every layer differentiable for gradient checks."""
    return build_run_config({
        "window_k": 1, "phi": 0.5, "depth": 1, "d_model": 4, "mode": "free",
        "activation": "tanh", "n_freq_bins": 3, "tau": 0.5, "lambda_ccl": 0.3,
        "epochs": 5, "patience": 5, "batch_size": 2, "seed": 3,
    })


def make_conversation(rng: np.random.Generator, n_utt: int = 3, dims=(3, 2, 2),
                      n_classes: int = 3, n_speakers: int = 2, conv_id: str = "c0",
                      split: str = "train") -> Conversation:
    return Conversation(
        id=conv_id,
        split=split,
        speakers=rng.integers(0, n_speakers, size=n_utt),
        labels=rng.integers(0, n_classes, size=n_utt),
        feat_t=rng.standard_normal((n_utt, dims[0])),
        feat_a=rng.standard_normal((n_utt, dims[1])),
        feat_v=rng.standard_normal((n_utt, dims[2])),
        flipped=np.zeros(n_utt, dtype=bool),
    )


@pytest.fixture
def conversation(rng) -> Conversation:
    return make_conversation(rng)


@pytest.fixture
def gradcheck() -> Callable:
    """
    Compares analytic gradients with central finite differences along one
    random direction per tensor.

    Usage: gradcheck(loss_fn, tensors, grads) where `loss_fn()` reads the
    arrays in `tensors` (mutated in place) and `grads` maps the same names to
    analytic gradients. Complex tensors are perturbed in both parts.
    """
    def check(loss_fn: Callable[[], float], tensors: Dict[str, np.ndarray],
              grads: Dict[str, np.ndarray], eps: float = 1e-5, rtol: float = 1e-4,
              atol: float = 1e-8, seed: int = 0) -> None:
        direction_rng = np.random.default_rng(seed)
        for name, tensor in tensors.items():
            direction = direction_rng.standard_normal(tensor.shape)
            if np.iscomplexobj(tensor):
                direction = direction + 1j * direction_rng.standard_normal(tensor.shape)
            original = tensor.copy()
            tensor[...] = original + eps * direction
            plus = loss_fn()
            tensor[...] = original - eps * direction
            minus = loss_fn()
            tensor[...] = original
            numeric = (plus - minus) / (2 * eps)
            # complex gradients follow G = dL/dRe + i dL/dIm
            analytic = float(np.real(np.sum(np.conj(grads[name]) * direction)))
            scale = max(abs(numeric), abs(analytic))
            assert abs(numeric - analytic) <= rtol * scale + atol, (
                f"{name}: analytic {analytic:.10g} vs numeric {numeric:.10g}"
            )
    return check
