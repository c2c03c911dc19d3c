from typing import Dict, Mapping

import numpy as np

from src.errors import InvalidConfig
from src.encoding.recurrent import EncoderParams, GruDirection
from src.encoding.speaker import SpeakerTable


def uniform_fan_in(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization."""
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


def init_encoder_tensors(rng: np.random.Generator, d_t: int, d_a: int, d_v: int,
                         d_model: int, n_speakers: int) -> Dict[str, np.ndarray]:
    """
    Initializes speaker table, BiGRU and affine encoders.

    Matrices are drawn uniformly in ±1/sqrt(fan_in); biases start at zero.

    Returns:
        Dict[str, np.ndarray]: Tensors keyed "speaker.W", "text.{fw,bw}.{Wx,Wh,bx,bh}",
        "audio.{W,b}", "visual.{W,b}".
    """
    if d_model % 2:
        raise InvalidConfig("d_model must be even")
    H = d_model // 2
    tensors: Dict[str, np.ndarray] = {
        "speaker.W": uniform_fan_in(rng, (d_model, n_speakers), n_speakers),
    }
    for direction in ("fw", "bw"):
        tensors[f"text.{direction}.Wx"] = uniform_fan_in(rng, (3 * H, d_t), d_t)
        tensors[f"text.{direction}.Wh"] = uniform_fan_in(rng, (3 * H, H), H)
        tensors[f"text.{direction}.bx"] = np.zeros(3 * H)
        tensors[f"text.{direction}.bh"] = np.zeros(3 * H)
    tensors["audio.W"] = uniform_fan_in(rng, (d_model, d_a), d_a)
    tensors["audio.b"] = np.zeros(d_model)
    tensors["visual.W"] = uniform_fan_in(rng, (d_model, d_v), d_v)
    tensors["visual.b"] = np.zeros(d_model)
    return tensors


def speaker_table_from(tensors: Mapping[str, np.ndarray]) -> SpeakerTable:
    return SpeakerTable(W=tensors["speaker.W"])


def encoder_params_from(tensors: Mapping[str, np.ndarray]) -> EncoderParams:
    """Builds an EncoderParams view (no copies) over a tensor mapping."""
    def direction(name: str) -> GruDirection:
        return GruDirection(
            Wx=tensors[f"text.{name}.Wx"],
            Wh=tensors[f"text.{name}.Wh"],
            bx=tensors[f"text.{name}.bx"],
            bh=tensors[f"text.{name}.bh"],
        )
    return EncoderParams(
        gru_fw=direction("fw"),
        gru_bw=direction("bw"),
        W_a=tensors["audio.W"],
        b_a=tensors["audio.b"],
        W_v=tensors["visual.W"],
        b_v=tensors["visual.b"],
    )
