import os
from typing import Optional
from logging import Logger

from src.config.settings import Settings
from src.log.base_logger import BaseLogger


class SystemLogger(BaseLogger):
    """
    Central logger for library and command diagnostics.

    Configuration details:
      - Console output goes to stderr.
      - Log file (optional) is located in the system logs folder.
      - Log format (JSON or standard) is based on application settings.
    """

    def __init__(self, name: str = "system", settings: Optional[Settings] = None):
        """
        Initializes the SystemLogger.

        Args:
            name (str): The name of the logger instance. Defaults to "system".
            settings (Optional[Settings]): Application settings object.
        """
        super().__init__(name, settings)

    def _get_log_file_path(self) -> Optional[str]:
        """
        Returns the file path for the system log, from `sys_log_file` or a
        default under ./logs/sys_logs.

        Returns:
            Optional[str]: The path to the system log file.
        """
        log_file = getattr(self.settings, "sys_log_file", None)
        if not log_file:
            log_file = os.path.join(os.getcwd(), "logs", "sys_logs", "spectral_merc.log")
        return log_file

    def _get_log_level(self) -> str:
        return getattr(self.settings, "sys_log_level", "INFO")

    def _get_log_format(self) -> str:
        return getattr(self.settings, "sys_log_format", "standard")

    def _get_file_enabled(self) -> bool:
        return getattr(self.settings, "sys_log_file_enabled", False)

    def _get_retention_days(self) -> int:
        return getattr(self.settings, "sys_log_retention_days", 7)

def get_system_logger(name: str = "system") -> Logger:
    """
    Convenience function to get a configured system logger.

    Args:
        name (str): The name for the logger.

    Returns:
        Logger: A configured logger.
    """
    return SystemLogger(name).get_logger()
