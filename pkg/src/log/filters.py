
from logging import Filter, LogRecord
from typing import Any, Dict, Optional

class StructuredOnlyFilter(Filter):
    """
    Drops records that carry no structured payload.

    Applied to run loggers so that only `extra_fields` records reach the
    JSON-lines training log; free-text diagnostics belong to the system log.
    """
    def filter(self, record: LogRecord) -> bool:
        """
        Args:
            record (logging.LogRecord): The log record instance to filter.

        Returns:
            bool: `True` if the record has an `extra_fields` mapping.
        """
        return isinstance(getattr(record, 'extra_fields', None), dict)

class RunContextFilter(Filter):
    """
    Adds run context to structured records.

    Every structured record written through the run logger receives the
    `run` name and, when given, a fixed mapping of context fields (for
    example the seed), so each JSON line is self-describing.

    Attributes:
        run_name (str): The name of the run.
        context (Dict[str, Any]): Extra fields merged into every record.
    """
    def __init__(self, run_name: str, context: Optional[Dict[str, Any]] = None):
        """
        Args:
            run_name (str): The name of the run.
            context (Optional[Dict[str, Any]]): Extra fields merged into every record.
        """
        super().__init__()
        self.run_name = run_name
        self.context = dict(context or {})

    def filter(self, record: LogRecord) -> bool:
        """
        Injects the run name and context into the record's `extra_fields`.

        Args:
            record (logging.LogRecord): The log record instance to modify.

        Returns:
            bool: Always `True`.
        """
        fields = getattr(record, 'extra_fields', None)
        if isinstance(fields, dict):
            merged = {"run": self.run_name, **self.context}
            merged.update(fields)
            record.extra_fields = merged
        return True
