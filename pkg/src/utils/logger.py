"""
Logging Configuration Module for CVNN Bench
===========================================
Logging utility using loguru with console and file handlers.

Features:
- Colored console output
- Rotating file logs with retention
- Separate error log file (failed runs, all-runs-failed)
- Run-scoped context (experiment tag, domain, seed) via LogContext
"""

import sys
from functools import wraps
from pathlib import Path
from typing import Optional

from loguru import logger


# -----------------------------------------------------------------------------
# Configuration Constants
# -----------------------------------------------------------------------------

LOG_DIR = Path(__file__).parent.parent.parent / "logs"

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)

FILE_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | "
    "{level: <8} | "
    "{name}:{function}:{line} | "
    "{extra} | "
    "{message}"
)

ROTATION_SIZE = "10 MB"
RETENTION_PERIOD = "7 days"


# -----------------------------------------------------------------------------
# Logger State
# -----------------------------------------------------------------------------

_logger_initialized = False


# -----------------------------------------------------------------------------
# Setup Functions
# -----------------------------------------------------------------------------

def setup_logger(
    console_level: str = "INFO",
    file_level: str = "INFO",
    error_level: str = "ERROR",
    log_dir: Optional[Path] = None,
    rotation: str = ROTATION_SIZE,
    retention: str = RETENTION_PERIOD,
    colorize: bool = True,
    diagnose: bool = False,
    file_logging: bool = True,
) -> None:
    """
    Configure the application-wide logger with console and file handlers.

    Args:
        console_level: Minimum log level for console output
        file_level: Minimum log level for app.log
        error_level: Minimum log level for error.log
        log_dir: Directory for log files (default: project_root/logs)
        rotation: When to rotate log files
        retention: How long to keep old logs
        colorize: Enable colored console output
        diagnose: Show variable values in tracebacks (large arrays make this noisy)
        file_logging: Disable to keep only the console sink (tests, CI)

    Example:
        >>> from src.utils.logger import setup_logger, get_logger
        >>> setup_logger(console_level="DEBUG")
        >>> logger = get_logger(__name__)
        >>> logger.info("Experiment started")
    """
    global _logger_initialized

    logger.remove()

    logger.add(
        sys.stderr,
        format=CONSOLE_FORMAT,
        level=console_level.upper(),
        colorize=colorize,
        diagnose=diagnose,
        backtrace=True,
    )

    if file_logging:
        logs_path = log_dir or LOG_DIR
        logs_path.mkdir(parents=True, exist_ok=True)

        logger.add(
            logs_path / "app.log",
            format=FILE_FORMAT,
            level=file_level.upper(),
            rotation=rotation,
            retention=retention,
            compression="zip",
            encoding="utf-8",
            diagnose=diagnose,
            backtrace=True,
            enqueue=True,  # runs may log from worker threads
        )

        # Failed runs and all-runs-failed land here
        logger.add(
            logs_path / "error.log",
            format=FILE_FORMAT,
            level=error_level.upper(),
            rotation=rotation,
            retention=retention,
            compression="zip",
            encoding="utf-8",
            diagnose=diagnose,
            backtrace=True,
            enqueue=True,
        )
        logger.debug(f"Log directory: {logs_path.absolute()}")

    _logger_initialized = True


def setup_from_config() -> None:
    """Configure sinks from the `logging` section of config.yaml."""
    from src.utils.config import config

    setup_logger(
        console_level=config.log_level,
        file_level=config.log_level,
        rotation=config.get("logging.file.rotation", ROTATION_SIZE),
        retention=config.get("logging.file.retention", RETENTION_PERIOD),
        colorize=bool(config.get("logging.console.colorize", True)),
        file_logging=bool(config.get("logging.file.enabled", True)),
    )


def get_logger(name: str) -> "logger":
    """
    Get a logger instance bound with the specified module name.

    Args:
        name: Module name, typically __name__ from the calling module

    Returns:
        A loguru logger instance bound with the module name

    Example:
        >>> from src.utils.logger import get_logger
        >>> logger = get_logger(__name__)
        >>> logger.info("Loading MNIST")
    """
    if not _logger_initialized:
        setup_logger(file_logging=False)

    return logger.bind(name=name)


# -----------------------------------------------------------------------------
# Utility Functions
# -----------------------------------------------------------------------------

def log_function_call(func):
    """
    Decorator to log function entry and exit at DEBUG level.

    Arguments are summarised by type and shape so that large arrays never
    end up in the log.

    Example:
        >>> @log_function_call
        ... def load_mnist(data_dir):
        ...     ...
    """

    def _describe(value):
        shape = getattr(value, "shape", None)
        if shape is not None:
            return f"{type(value).__name__}{tuple(shape)}"
        text = repr(value)
        return text if len(text) <= 80 else text[:77] + "..."

    @wraps(func)
    def wrapper(*args, **kwargs):
        func_name = func.__qualname__
        described = [_describe(a) for a in args]
        described += [f"{k}={_describe(v)}" for k, v in kwargs.items()]
        logger.debug(f"Entering {func_name} | {', '.join(described)}")
        try:
            result = func(*args, **kwargs)
            logger.debug(f"Exiting {func_name} | result={_describe(result)}")
            return result
        except Exception as e:
            logger.debug(f"Exception in {func_name}: {e}")
            raise

    return wrapper


class LogContext:
    """
    Context manager binding run-scoped context to log messages.

    Uses loguru's contextualize, which is local to the current thread/task,
    so concurrent runs keep their own experiment/domain/seed tags.

    Example:
        >>> with LogContext(experiment="mnist_k0", domain="complex", seed=3):
        ...     logger.info("Epoch finished")
    """

    def __init__(self, **context):
        self.context = context
        self._manager = None

    def __enter__(self):
        self._manager = logger.contextualize(**self.context)
        self._manager.__enter__()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self._manager.__exit__(exc_type, exc_val, exc_tb)
        return False


__all__ = [
    "logger",
    "setup_logger",
    "setup_from_config",
    "get_logger",
    "log_function_call",
    "LogContext",
]
