from typing import Any, Dict, List, Optional

from src.cli.base_command import BaseCommand
from src.log.system_logger import Logger, get_system_logger


class CommandRegistry:
    """
    Manages the set of subcommands exposed by the entry point.

    Features:
        - Centralized command registration and lookup
        - Enabling/disabling individual commands
        - Retrieval of command information

    Attributes:
        commands (Dict[str, BaseCommand]): Commands by name, in registration order.
    """

    def __init__(self):
        self.commands: Dict[str, BaseCommand] = {}
        self.system_logger: Logger = get_system_logger(__name__)

    def register(self, command: BaseCommand) -> None:
        """
        Registers a command under its name.

        Raises:
            ValueError: If `command` is not a BaseCommand.
        """
        if not isinstance(command, BaseCommand):
            raise ValueError("Command must inherit from BaseCommand")
        if command.name in self.commands:
            self.system_logger.warning(f"Command '{command.name}' already exists, replacing...")
        self.commands[command.name] = command
        self.system_logger.debug(f"Registered command: {command.name} ({command.__class__.__name__})")

    def get(self, name: str) -> Optional[BaseCommand]:
        return self.commands.get(name)

    def get_enabled(self) -> List[BaseCommand]:
        return [c for c in self.commands.values() if c.enabled]

    def get_names(self) -> List[str]:
        return list(self.commands)

    def get_info(self) -> List[Dict[str, Any]]:
        return [c.get_info() for c in self.commands.values()]
