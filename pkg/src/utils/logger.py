"""
Centralized logging configuration for primespline.
Uses loguru for structured logging.

The console sink writes to stderr: the CLI reserves stdout for data.
"""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger as _logger

from src.config.settings import Settings, get_settings

FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"


def configure_logging(settings: Optional[Settings] = None) -> None:
    """(Re)install the console sink and, with log_to_file, the two file sinks under log_dir."""
    settings = settings or get_settings()

    # Remove default handler
    _logger.remove()

    # Add console handler with color
    _logger.add(
        sys.stderr,
        format="<level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
        level=settings.log_level.upper(),
        colorize=True,
    )

    if not settings.log_to_file:
        return

    log_dir = Path(settings.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    # All logs
    _logger.add(log_dir / "app.log", format=FILE_FORMAT, level="DEBUG", rotation="500 MB", retention="7 days")

    # Errors only
    _logger.add(log_dir / "errors.log", format=FILE_FORMAT, level="ERROR", rotation="500 MB", retention="30 days")


configure_logging()


def get_logger(name: str = None):
    """
    Get a logger instance.

    Args:
        name: Module name (typically __name__)

    Returns:
        Logger instance
    """
    return _logger.bind(module=name) if name else _logger
