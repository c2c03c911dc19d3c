import time
import functools
from typing import Any, Callable

from src.log.system_logger import Logger, get_system_logger

LOG: Logger = get_system_logger(__name__)


def log_duration(label: str = None) -> Callable:
    """
    A decorator that logs how long the wrapped call took.

    Args:
        label (str): Text used in the log line. Defaults to the function name.
    """
    def decorator(func: Callable) -> Callable:
        name = label or func.__name__

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                LOG.info(f"{name} finished in {time.perf_counter() - start:.2f}s")
        return wrapper
    return decorator
