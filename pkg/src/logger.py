"""This module is used to configure the logger for the application."""
import logging
from logging.handlers import RotatingFileHandler
from typing import Optional

FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

logger = logging.getLogger("superdet")

_stream_handler = logging.StreamHandler()
_stream_handler.setFormatter(logging.Formatter(FORMAT))
logger.addHandler(_stream_handler)
logger.setLevel(logging.INFO)

_file_handler: Optional[RotatingFileHandler] = None


def configure_logger(log_level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """
    Sets the log level and, when a path is given, attaches a rotating log file.

    Args:
        log_level: One of "DEBUG", "INFO", "WARNING" ("WARN"), "ERROR".
        log_file: Path of the rotating log file, or None for console only.

    Returns:
        The configured logger.
    """
    global _file_handler

    level = logging.getLevelName(log_level.upper())
    if not isinstance(level, int):
        raise ValueError(f"log_level must be one of DEBUG, INFO, WARN, ERROR (got {log_level!r})")
    logger.setLevel(level)

    if _file_handler is not None:
        logger.removeHandler(_file_handler)
        _file_handler.close()
        _file_handler = None

    if log_file:
        _file_handler = RotatingFileHandler(log_file, maxBytes=1000000, backupCount=3)
        _file_handler.setFormatter(logging.Formatter(FORMAT))
        logger.addHandler(_file_handler)

    return logger
