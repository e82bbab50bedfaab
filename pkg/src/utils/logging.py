"""Logging utilities for the Gödel Trick solver."""
import logging
import os
import sys
from typing import Optional, TextIO

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def resolve_level(level: Optional[str] = None) -> str:
    """Pick the log level from the argument, DEBUG=true or LOG_LEVEL."""
    if level:
        return level.upper()
    if os.getenv("DEBUG", "").lower() in ("1", "true", "yes"):
        return "DEBUG"
    return os.getenv("LOG_LEVEL", "INFO").upper()


def _console_handler(logger: logging.Logger) -> Optional[logging.StreamHandler]:
    for handler in logger.handlers:
        if type(handler) is logging.StreamHandler:
            return handler
    return None


def setup_logger(name: str, level: Optional[str] = None, log_file: Optional[str] = None,
                 stream: Optional[TextIO] = None) -> logging.Logger:
    """Set up a logger with consistent formatting; console output goes to stdout unless ``stream`` is given."""
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, resolve_level(level)))

    formatter = logging.Formatter(LOG_FORMAT)

    # Console handler, reused on later calls
    console_handler = _console_handler(logger)
    if console_handler is None:
        console_handler = logging.StreamHandler(stream or sys.stdout)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)
    elif stream is not None:
        console_handler.setStream(stream)

    # File handler (optional)
    if log_file:
        path = os.path.abspath(log_file)
        if not any(isinstance(h, logging.FileHandler) and h.baseFilename == path for h in logger.handlers):
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger
