from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.corpus.corpus import Corpus, corpus_from_document
from src.errors import InvalidConfig
from src.log.system_logger import Logger, get_system_logger
from src.utils.yaml import load_config_file

LOG: Logger = get_system_logger(__name__)


class SynthSpec(BaseModel):
    """
    Parameters of a synthetic corpus with planted slow and fast emotion structure.

    Each speaker has a fixed class offset; a speaker's base emotion cycles
    through the classes once every `trend_period` utterances. With
    probability `flip_rate` an utterance's label departs from the trend, and
    only one randomly chosen modality carries the departure.

    Attributes:
        seed (int): Root seed; every conversation draws from its own child seed.
        n_conversations (int): Total conversations.
        n_val (int): Conversations tagged "val".
        n_test (int): Conversations tagged "test"; the rest are "train".
        min_utterances (int): Shortest conversation.
        max_utterances (int): Longest conversation.
        n_speakers (int): Speakers shared across the corpus.
        n_classes (int): C.
        trend_period (int): Utterances per slow emotion cycle, >= 2.
        flip_rate (float): Probability in [0, 1] that an utterance flips.
        noise_sigma (float): Gaussian feature noise.
        prototype_scale (float): Length of each class prototype.
        dim_t, dim_a, dim_v (int): Feature dims, each >= n_classes.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(default=7, ge=0)
    n_conversations: int = Field(default=270, ge=1)
    n_val: int = Field(default=20, ge=0)
    n_test: int = Field(default=50, ge=0)
    min_utterances: int = Field(default=8, ge=1)
    max_utterances: int = Field(default=16, ge=1)
    n_speakers: int = Field(default=2, ge=1)
    n_classes: int = Field(default=4, ge=1)
    trend_period: int = Field(default=8, ge=2)
    flip_rate: float = Field(default=0.25, ge=0.0, le=1.0)
    noise_sigma: float = Field(default=0.3, ge=0.0)
    prototype_scale: float = Field(default=3.0, gt=0.0)
    dim_t: int = Field(default=8, ge=1)
    dim_a: int = Field(default=6, ge=1)
    dim_v: int = Field(default=6, ge=1)

    @model_validator(mode="after")
    def _consistent(self) -> "SynthSpec":
        if self.min_utterances > self.max_utterances:
            raise ValueError("min_utterances must not exceed max_utterances")
        if self.n_val + self.n_test > self.n_conversations:
            raise ValueError("n_val + n_test exceeds n_conversations")
        if min(self.dim_t, self.dim_a, self.dim_v) < self.n_classes:
            raise ValueError("every modality dim must be at least n_classes (orthogonal prototypes)")
        if self.flip_rate > 0 and self.n_classes < 2:
            raise ValueError("flipping needs at least two classes")
        return self

    @property
    def dims(self):
        return self.dim_t, self.dim_a, self.dim_v


def build_synth_spec(data: Optional[Dict[str, Any]] = None) -> SynthSpec:
    try:
        return SynthSpec(**(data or {}))
    except ValidationError as e:
        raise InvalidConfig(f"Invalid synthetic corpus spec: {e}") from e


def load_synth_spec(path: Optional[str] = None, **overrides: Any) -> SynthSpec:
    """Loads a SynthSpec from JSON/YAML; overrides that are not None win."""
    data: Dict[str, Any] = load_config_file(path) if path else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return build_synth_spec(data)


def trend_label(position: int, offset: int, phase: int, spec: SynthSpec) -> int:
    """Base emotion of the utterance at `position` for a speaker with class `offset`."""
    P, C = spec.trend_period, spec.n_classes
    return int((offset + (C * ((position + phase) % P)) // P) % C)


def _features(rng: np.random.Generator, classes: np.ndarray, dim: int, spec: SynthSpec) -> np.ndarray:
    proto = np.zeros((classes.shape[0], dim))
    proto[np.arange(classes.shape[0]), classes] = spec.prototype_scale
    return proto + spec.noise_sigma * rng.standard_normal((classes.shape[0], dim))


def _conversation(index: int, split: str, rng: np.random.Generator, offsets: np.ndarray,
                  spec: SynthSpec) -> Dict[str, Any]:
    n = int(rng.integers(spec.min_utterances, spec.max_utterances + 1))
    speakers = rng.integers(0, spec.n_speakers, size=n)
    phase = int(rng.integers(0, spec.trend_period))
    flips = rng.random(n) < spec.flip_rate
    shifts = rng.integers(1, max(spec.n_classes, 2), size=n)
    carrier = rng.integers(0, 3, size=n)

    base = np.array([trend_label(i, int(offsets[s]), phase, spec) for i, s in enumerate(speakers)], dtype=np.int64)
    labels = np.where(flips, (base + shifts) % spec.n_classes, base)
    # only the carrier modality follows a flipped label
    per_modality = [np.where(flips & (carrier == m), labels, base) for m in range(3)]
    feats = [_features(rng, cls, dim, spec) for cls, dim in zip(per_modality, spec.dims)]

    return {
        "id": f"synth-{index:05d}",
        "split": split,
        "utterances": [
            {
                "speaker": int(speakers[i]),
                "label": int(labels[i]),
                "t": feats[0][i].tolist(),
                "a": feats[1][i].tolist(),
                "v": feats[2][i].tolist(),
                "flipped": bool(flips[i]),
            }
            for i in range(n)
        ],
    }


def generate_synthetic(spec: SynthSpec) -> Corpus:
    """
    Generates a corpus from `spec`; the same spec always yields the same corpus.

    Raises:
        InvalidConfig: If `spec` is not a valid SynthSpec mapping.
    """
    if not isinstance(spec, SynthSpec):
        spec = build_synth_spec(dict(spec))
    children = np.random.SeedSequence(spec.seed).spawn(spec.n_conversations + 1)
    corpus_rng = np.random.default_rng(children[0])
    offsets = corpus_rng.integers(0, spec.n_classes, size=spec.n_speakers)
    order = corpus_rng.permutation(spec.n_conversations)
    splits: List[str] = ["train"] * spec.n_conversations
    for pos, idx in enumerate(order):
        if pos < spec.n_test:
            splits[idx] = "test"
        elif pos < spec.n_test + spec.n_val:
            splits[idx] = "val"

    conversations = [
        _conversation(i, splits[i], np.random.default_rng(children[i + 1]), offsets, spec)
        for i in range(spec.n_conversations)
    ]
    document = {
        "n_classes": spec.n_classes,
        "dims": dict(zip("tav", spec.dims)),
        "conversations": conversations,
    }
    corpus = corpus_from_document(document)
    flipped = sum(int(c.flipped.sum()) for c in corpus.conversations)
    LOG.info(f"Generated synthetic corpus: {spec.n_conversations} conversations, "
             f"{corpus.n_utterances()} utterances, {flipped} flipped.")
    return corpus
