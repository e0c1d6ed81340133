import logging
import os
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

logger = logging.getLogger("annulus_conformal")

TEXT_FORMAT = "[%(asctime)s] %(levelname)s {%(filename)s:%(lineno)d} - %(message)s"
JSON_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s %(filename)s %(lineno)d"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _formatter(log_format: str) -> logging.Formatter:
    if log_format == "json":
        return jsonlogger.JsonFormatter(fmt=JSON_FORMAT, datefmt=DATE_FORMAT)
    return logging.Formatter(fmt=TEXT_FORMAT, datefmt=DATE_FORMAT)


def configure_logger(level: str = "INFO", log_format: Optional[str] = None) -> None:
    """
    Attach a single stderr handler to the package logger.

    Args:
        level (str): Logging level name.
        log_format (str, optional): 'text' or 'json'; falls back to LOG_MESSAGES_FORMAT.
    """
    log_format = (log_format or os.getenv("LOG_MESSAGES_FORMAT", "text")).lower()
    logger.setLevel(level.upper())

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_formatter(log_format))
    logger.handlers = []
    logger.addHandler(handler)
    # stdout carries command output
    logger.propagate = False

    # numpy/scipy RuntimeWarnings (overflow next to the pole, bisection notes) use the same handler
    logging.captureWarnings(True)
    warnings_logger = logging.getLogger("py.warnings")
    warnings_logger.handlers = [handler]
    warnings_logger.propagate = False


configure_logger(level=os.getenv("LOG_LEVEL", "INFO"))


def set_log_level(level: str, log_format: Optional[str] = None) -> None:
    """
    Set the log level for the logger.

    Parameters:
    - level (str): A logging level such as 'debug', 'info', 'warning', 'error', or 'critical'.
    - log_format (str, optional): 'text' or 'json'.
    """
    configure_logger(level, log_format)


def log_stage_failure(stage: str, message: str) -> None:
    """Log a failed computation stage; JSON output carries ``stage`` as its own field."""
    logger.error(message, extra={"stage": stage})


__all__ = ["logger", "set_log_level", "configure_logger", "log_stage_failure"]
