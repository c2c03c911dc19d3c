
import os
import logging

from typing import Any, Dict, List, Optional
from logging import Filter, Formatter, Handler

from src.config.settings import Settings
from src.log.base_logger import BaseLogger
from src.log.formatters import RecordFormatter
from src.log.filters import RunContextFilter, StructuredOnlyFilter

class RunLogger(BaseLogger):
    """
    JSON-lines logger for a single training or experiment run.

    Each structured record (`extra_fields`) becomes one line of the run log.
    The file is truncated when the logger is created, carries no timestamps,
    and sorts keys, so two runs with the same config and seed produce
    byte-identical files.

    Configuration details:
      - Log file path: given explicitly (usually `<out_dir>/train_log.jsonl`).
      - Formatter: `RecordFormatter`.
      - Filters: `StructuredOnlyFilter` and `RunContextFilter`.
      - No console output.

    Attributes:
        log_path (str): The JSON-lines file.
        run_name (str): Name injected into every record.
        context (Dict[str, Any]): Fixed fields injected into every record.
    """
    def __init__(self, log_path: str, run_name: str = "run",
                 context: Optional[Dict[str, Any]] = None,
                 settings: Optional[Settings] = None):
        """
        Args:
            log_path (str): Destination JSON-lines file.
            run_name (str): Name of the run.
            context (Optional[Dict[str, Any]]): Fields added to every record.
            settings (Optional[Settings]): Application settings object.
        """
        self.log_path = os.path.abspath(log_path)
        self.run_name = run_name
        self.context = dict(context or {})
        name = f"run_logs.{self.log_path}"
        # a previous run on the same path may not have been closed
        stale = logging.getLogger(name)
        for handler in list(stale.handlers):
            handler.close()
            stale.removeHandler(handler)
        for f in list(stale.filters):
            stale.removeFilter(f)
        super().__init__(name, settings)

    def record(self, **fields: Any) -> None:
        """
        Writes one structured line.

        Args:
            **fields: JSON-serializable values.
        """
        self.logger.info(fields.get("event", "record"), extra={"extra_fields": fields})

    def _get_log_file_path(self) -> Optional[str]:
        return self.log_path

    def _create_file_handler(self, log_file_path: str) -> Handler:
        return logging.FileHandler(log_file_path, mode='w', encoding='utf-8')

    def _get_filters(self) -> List[Filter]:
        return [
            StructuredOnlyFilter(),
            RunContextFilter(self.run_name, self.context),
        ]

    def _get_log_level(self) -> str:
        return getattr(self.settings, "run_log_level", "INFO")

    def _get_log_format(self) -> str:
        return "records"

    def _get_formatter_override(self) -> Optional[Formatter]:
        return RecordFormatter()

    def _get_file_enabled(self) -> bool:
        return True

    def _get_console_enabled(self) -> bool:
        return False

    def _get_retention_days(self) -> int:
        return 0
