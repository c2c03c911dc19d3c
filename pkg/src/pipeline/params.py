from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.config.run_config import RunConfig
from src.encoding.init import init_encoder_tensors, uniform_fan_in
from src.errors import InvalidInput, NumericalError
from src.spectral.operator import bin_slots


def fgn_key(band: str, layer: int, name: str) -> str:
    return f"fgn.{band}.{layer}.{name}"


@dataclass
class ModelParams:
    """
    Every trainable tensor of the model plus the settings that shaped it.

    Tensor names:
        speaker.W, text.{fw,bw}.{Wx,Wh,bx,bh}, audio.{W,b}, visual.{W,b},
        fgn.{band}.{m}.W (circulant) or fgn.{band}.{m}.theta_{re,im} (free),
        fgn.{band}.{m}.b_{re,im}, spatial.{l}.W (spatial baseline),
        head.W [C × in], head.b [C].

    Attributes:
        config (RunConfig): Hyperparameters.
        dims (Tuple[int, int, int]): Input feature dims (d_t, d_a, d_v).
        n_speakers (int): Rows of the speaker table.
        n_classes (int): C.
        tensors (Dict[str, np.ndarray]): Ordered float64 tensors.
        speaker_names (List[Hashable]): Corpus speaker identifier of each speaker row.
    """
    config: RunConfig
    dims: Tuple[int, int, int]
    n_speakers: int
    n_classes: int
    tensors: Dict[str, np.ndarray] = field(default_factory=dict)
    speaker_names: List[Hashable] = field(default_factory=list)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def items(self):
        return self.tensors.items()

    @property
    def head_input_dim(self) -> int:
        return self.config.node_width * len(self.config.modalities)

    def count(self) -> int:
        """Number of trainable scalars."""
        return int(sum(t.size for t in self.tensors.values()))

    def copy(self) -> "ModelParams":
        return ModelParams(config=self.config, dims=self.dims, n_speakers=self.n_speakers,
                           n_classes=self.n_classes,
                           tensors={k: v.copy() for k, v in self.tensors.items()},
                           speaker_names=list(self.speaker_names))

    def zeros_like(self) -> Dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.tensors.items()}

    def check_finite(self) -> None:
        bad = [k for k, v in self.tensors.items() if not np.all(np.isfinite(v))]
        if bad:
            raise NumericalError(f"non-finite parameters: {bad}")


def init_params(config: RunConfig, dims: Tuple[int, int, int], n_speakers: int, n_classes: int,
                rng: Optional[np.random.Generator] = None,
                speaker_names: Optional[Sequence[Hashable]] = None) -> ModelParams:
    """
    Initializes every tensor from `rng` (or the config seed).

    Fourier weights start uniform in ±1/sqrt(d); in free mode every
    frequency slot starts from the same real W. Biases start at zero.
    """
    if n_classes < 1 or n_speakers < 1:
        raise InvalidInput("a model needs at least one class and one speaker")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    d = config.d_model
    tensors = init_encoder_tensors(rng, *dims, d_model=d, n_speakers=n_speakers)

    if config.use_fourier:
        for band in config.bands:
            for m in range(config.depth + 1):
                W = uniform_fan_in(rng, (d, d), d)
                if config.mode == "circulant":
                    tensors[fgn_key(band, m, "W")] = W
                else:
                    slots = bin_slots(config.n_freq_bins, config.bin_groups)
                    tensors[fgn_key(band, m, "theta_re")] = np.repeat(W[None], slots, axis=0)
                    tensors[fgn_key(band, m, "theta_im")] = np.zeros((slots, d, d))
                tensors[fgn_key(band, m, "b_re")] = np.zeros(d)
                tensors[fgn_key(band, m, "b_im")] = np.zeros(d)
    else:
        for layer in range(config.spatial_layers):
            tensors[f"spatial.{layer}.W"] = uniform_fan_in(rng, (d, d), d)

    in_dim = config.node_width * len(config.modalities)
    tensors["head.W"] = uniform_fan_in(rng, (n_classes, in_dim), in_dim)
    tensors["head.b"] = np.zeros(n_classes)
    return ModelParams(config=config, dims=tuple(dims), n_speakers=n_speakers,
                       n_classes=n_classes, tensors=tensors, speaker_names=list(speaker_names or []))
