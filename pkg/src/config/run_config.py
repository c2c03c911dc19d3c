from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import InvalidConfig
from src.utils.yaml import load_config_file

AblationFlag = Literal["se", "cl", "fgn", "high", "low"]
MODALITY_ORDER: Tuple[str, ...] = ("t", "a", "v")
MODALITY_SUBSETS = {"t", "a", "v", "ta", "tv", "va", "tav"}


class RunConfig(BaseModel):
    """
    Every hyperparameter of a run.

    The config is the single source of truth for a command: it is validated
    here, all randomness derives from `seed`, and the resolved instance is
    serialized next to every artifact the run produces.

    Attributes:
        window_k (int): Same-modal sliding-window radius (|i - j| <= k).
        phi (float): Cross-modal edge weight scale.
        tau (float): Contrastive temperature.
        lambda_ccl (float): Weight of the contrastive loss in the total loss.
        depth (int): M, the index of the last Fourier layer (M + 1 layers per band).
        d_model (int): Width of every node representation (even, split by the BiGRU).
        mode (str): "free" (trained per-frequency operators) or "circulant".
        modality_bins (bool): Free mode keeps frequencies shared by the three
            modality blocks apart from those contrasting them.
        activation (str): Nonlinearity applied to real and imaginary parts.
        modalities (str): Modality subset used by the classifier head.
        ablate (List[str]): Components removed from the pipeline.
        deterministic (bool): Reduce per-conversation gradients in batch order;
            when False, threaded runs reduce them as they complete.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    # --- Graph ---
    window_k: int = Field(default=4, ge=0)
    phi: float = Field(default=0.5, gt=0)

    # --- Spectral network ---
    depth: int = Field(default=4, ge=0)
    d_model: int = Field(default=16, gt=0)
    mode: Literal["free", "circulant"] = "free"
    activation: Literal["leaky_relu", "relu", "tanh", "identity"] = "leaky_relu"
    leaky_slope: float = Field(default=0.01, ge=0)
    n_freq_bins: int = Field(default=8, ge=1)
    modality_bins: bool = True
    spatial_layers: int = Field(default=2, ge=1)

    # --- Objective ---
    tau: float = Field(default=0.5, gt=0)
    lambda_ccl: float = Field(default=0.3, ge=0)
    normalize_embeddings: bool = True

    # --- Optimizer ---
    lr: float = Field(default=3e-3, gt=0)
    batch_size: int = Field(default=8, ge=1)
    epochs: int = Field(default=200, ge=1)
    patience: int = Field(default=40, ge=1)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    weight_decay: float = Field(default=1e-4, ge=0)

    # --- Reproducibility ---
    seed: int = Field(default=0, ge=0)
    deterministic: bool = True
    workers: int = Field(default=1, ge=1)

    # --- Ablations ---
    ablate: List[AblationFlag] = Field(default_factory=list)
    modalities: str = "tav"

    @field_validator("d_model")
    @classmethod
    def _even_width(cls, value: int) -> int:
        if value % 2:
            raise ValueError("d_model must be even (forward and backward GRU halves)")
        return value

    @field_validator("modalities")
    @classmethod
    def _canonical_modalities(cls, value: str) -> str:
        if value not in MODALITY_SUBSETS:
            raise ValueError(f"modalities must be one of {sorted(MODALITY_SUBSETS)}")
        return "".join(m for m in MODALITY_ORDER if m in value)

    @field_validator("ablate")
    @classmethod
    def _unique_flags(cls, value: List[str]) -> List[str]:
        return sorted(set(value))

    @model_validator(mode="after")
    def _consistent_bands(self) -> "RunConfig":
        if "high" in self.ablate and "low" in self.ablate:
            raise ValueError("cannot remove both frequency bands")
        return self

    @property
    def use_speaker(self) -> bool:
        return "se" not in self.ablate

    @property
    def use_fourier(self) -> bool:
        return "fgn" not in self.ablate

    @property
    def bands(self) -> Tuple[str, ...]:
        """Frequency bands feeding the classifier ("low", "high")."""
        if not self.use_fourier:
            return ()
        return tuple(b for b in ("low", "high") if b not in self.ablate)

    @property
    def use_contrastive(self) -> bool:
        return "cl" not in self.ablate and self.lambda_ccl > 0 and len(self.bands) == 2

    @property
    def effective_lambda(self) -> float:
        return self.lambda_ccl if self.use_contrastive else 0.0

    @property
    def bin_groups(self) -> int:
        """Node blocks the free-mode bins distinguish (3 modalities, or 1)."""
        return 3 if self.modality_bins else 1

    @property
    def modality_indices(self) -> Tuple[int, ...]:
        return tuple(MODALITY_ORDER.index(m) for m in self.modalities)

    @property
    def node_width(self) -> int:
        """Width of one node embedding v_m fed to the classifier."""
        if not self.use_fourier:
            return self.d_model
        return self.d_model * len(self.bands)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """
        Returns a validated copy with the given fields replaced; `None` values are ignored.
        """
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return build_run_config(data)


def build_run_config(data: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Validates a mapping into a RunConfig.

    Raises:
        InvalidConfig: If any field is unknown or out of range.
    """
    try:
        return RunConfig(**(data or {}))
    except ValidationError as e:
        raise InvalidConfig(f"Invalid run config: {e}") from e


def load_run_config(path: Optional[str] = None, **overrides: Any) -> RunConfig:
    """
    Loads a RunConfig from a JSON or YAML file and applies overrides (flags win).

    Args:
        path (Optional[str]): Config file; defaults are used when None.
        **overrides: Field values taking precedence over the file; `None` is ignored.

    Returns:
        RunConfig: The validated config.
    """
    data: Dict[str, Any] = load_config_file(path) if path else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return build_run_config(data)
