"""
Logging configuration for the diacritic language-identification toolkit.
Creates a structured logger that writes to a log file and to stdout.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Optional

# Project root directory
PROJECT_ROOT = Path(__file__).parent.parent.parent
LOG_FILE = Path(os.getenv("DIACRITIC_LOG_FILE", str(PROJECT_ROOT / "diacritic_langid.log")))
LOG_LEVEL = os.getenv("DIACRITIC_LOG_LEVEL", "INFO").upper()


def setup_logger(
    name: str = "diacritic_langid",
    log_file: Optional[Path] = None,
    level: int = logging.INFO,
) -> logging.Logger:
    """
    Set up a structured logger with file and console handlers.

    Args:
        name: Logger name
        log_file: Path to log file (defaults to diacritic_langid.log in project root)
        level: Logging level

    Returns:
        Configured logger instance
    """
    if log_file is None:
        log_file = LOG_FILE

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid duplicate handlers if logger already configured
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        fmt="%(asctime)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    except OSError as e:
        print(f"Warning: could not open log file {log_file}: {e}", file=sys.stderr)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    return logger


# Global logger instance
_logger: Optional[logging.Logger] = None


def get_logger() -> logging.Logger:
    """Get or create the global logger instance."""
    global _logger
    if _logger is None:
        _logger = setup_logger(level=getattr(logging, LOG_LEVEL, logging.INFO))
    return _logger


def quiet_console(level: int = logging.WARNING) -> None:
    """Raise the console handler threshold so stdout carries only program output."""
    for handler in get_logger().handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            handler.setLevel(level)
