import os
import sys
from argparse import ArgumentParser
from typing import Dict, List, Optional, Type

from src.cli.base_command import BaseCommand
from src.cli.commands.ablation import AblationCommand
from src.cli.commands.bench import BenchCommand
from src.cli.commands.evaluate import EvalCommand
from src.cli.commands.params_count import ParamsCountCommand
from src.cli.commands.smoothing import SmoothingCommand
from src.cli.commands.spectrum import SpectrumCommand
from src.cli.commands.synth import SynthCommand
from src.cli.commands.train import TrainCommand
from src.cli.registry import CommandRegistry
from src.config.settings import Settings, get_settings
from src.errors import InvalidConfig, InvalidInput, NumericalError, ParseError
from src.log.system_logger import Logger, get_system_logger
from src.utils.yaml import load_yaml

LOG: Logger = get_system_logger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

COMMAND_CLASSES: Dict[str, Type[BaseCommand]] = {
    "synth": SynthCommand,
    "train": TrainCommand,
    "eval": EvalCommand,
    "bench": BenchCommand,
    "spectrum": SpectrumCommand,
    "smoothing": SmoothingCommand,
    "ablation": AblationCommand,
    "params-count": ParamsCountCommand,
}


def build_registry(settings: Optional[Settings] = None) -> CommandRegistry:
    """
    Registers every command; descriptions and enabled flags come from the
    command config file when it exists.
    """
    settings = settings or get_settings()
    command_cfg = {}
    if os.path.exists(settings.command_cfg_path):
        command_cfg = load_yaml(settings.command_cfg_path) or {}
    registry = CommandRegistry()
    for name, cls in COMMAND_CLASSES.items():
        cfg = command_cfg.get(name, {})
        command = cls(name=name, description=cfg.get("description", ""), settings=settings)
        if not cfg.get("enabled", True):
            command.disable()
        registry.register(command)
    return registry


def build_parser(registry: CommandRegistry) -> ArgumentParser:
    parser = ArgumentParser(prog="spectral-merc",
                            description="Spectral graph emotion recognition in conversations.")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in registry.get_enabled():
        sub = subparsers.add_parser(command.name, help=command.description, description=command.description)
        command.add_arguments(sub)
        sub.set_defaults(handler=command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs one subcommand.

    Returns:
        int: 0 on success, 1 on a runtime failure, 2 on a usage, config or
        input-file error.
    """
    try:
        registry = build_registry()
        parser = build_parser(registry)
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except (InvalidConfig, ParseError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return args.handler.run(args)
    except (InvalidConfig, ParseError, InvalidInput, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as e:
        LOG.exception(f"Command '{args.command}' failed.")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
