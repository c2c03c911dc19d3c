from abc import ABC, abstractmethod
from argparse import ArgumentParser, BooleanOptionalAction, Namespace
from typing import Any, Dict, Optional

from src.config.run_config import RunConfig, load_run_config
from src.config.settings import Settings, get_settings
from src.log.system_logger import Logger, get_system_logger

ABLATION_CHOICES = ("se", "cl", "fgn", "high", "low")
MODALITY_CHOICES = ("t", "a", "v", "ta", "tv", "va", "tav")


class BaseCommand(ABC):
    """
    Represents one subcommand of the command-line interface.

    Subclasses declare their arguments and implement `run`, which returns
    the process exit code. Errors are raised, not printed: the entry point
    maps them to exit codes and a message on standard error.

    Features:
        - Abstract interface for argument declaration and execution.
        - Shared run-config flags (--config, --seed, --ablate, ...).
        - Built-in enable/disable state, driven by config/commands.yaml.

    Attributes:
        name (str): The subcommand name.
        description (str): One-line help text.
        enabled (bool): Whether the command is exposed.
        settings (Settings): Application settings.
    """

    def __init__(self, name: str, description: str = "", settings: Optional[Settings] = None):
        self.name: str = name
        self.description: str = description
        self.enabled: bool = True
        self.settings: Settings = settings or get_settings()
        self.system_logger: Logger = get_system_logger(f"cli.{name}")

    @abstractmethod
    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Declares the command's arguments.

        Args:
            parser (ArgumentParser): The subparser of this command.
        """
        pass

    @abstractmethod
    def run(self, args: Namespace) -> int:
        """
        Executes the command.

        Args:
            args (Namespace): Parsed arguments.

        Returns:
            int: Exit code (0 on success).
        """
        pass

    @staticmethod
    def add_run_config_arguments(parser: ArgumentParser) -> None:
        """Flags shared by every command that builds a model."""
        parser.add_argument("--config", help="Run config file (JSON or YAML).")
        parser.add_argument("--seed", type=int, help="Override the config seed.")
        parser.add_argument("--deterministic", action=BooleanOptionalAction, default=None,
                            help="Reduce threaded gradients in batch order (default) or as they complete.")
        parser.add_argument("--ablate", action="append", choices=ABLATION_CHOICES,
                            help="Remove a component (repeatable).")
        parser.add_argument("--modalities", choices=MODALITY_CHOICES, help="Modalities fed to the classifier.")
        parser.add_argument("--mode", choices=("circulant", "free"), help="Fourier operator mode.")
        parser.add_argument("--depth", type=int, help="Index M of the last Fourier layer.")

    def load_config(self, args: Namespace, **extra: Any) -> RunConfig:
        """Loads the run config with command-line flags taking precedence."""
        path = getattr(args, "config", None) or self.settings.default_run_config
        return load_run_config(
            path,
            seed=getattr(args, "seed", None),
            deterministic=getattr(args, "deterministic", None),
            ablate=getattr(args, "ablate", None),
            modalities=getattr(args, "modalities", None),
            mode=getattr(args, "mode", None),
            depth=getattr(args, "depth", None),
            **extra,
        )

    def table_meta(self, config: Optional[RunConfig] = None, **extra: Any) -> Dict[str, Any]:
        """Settings echoed above a result table: the command, the run config and `extra`."""
        meta: Dict[str, Any] = {"command": self.name}
        if config is not None:
            meta.update(config.to_dict())
        meta.update(extra)
        return meta

    def get_info(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "enabled": self.enabled,
            "type": self.__class__.__name__,
        }

    def enable(self) -> None:
        self.enabled = True

    def disable(self) -> None:
        self.enabled = False


