"""
Logging configuration for command-line runs.
Plain text by default, JSON records through python-json-logger on request.
"""

import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

from ..config.settings import LoggingConfig


def configure_logging(level: Optional[str] = None, json_output: Optional[bool] = None) -> logging.Logger:
    """Install a single stderr handler on the root logger"""
    level = (level or LoggingConfig.LEVEL).upper()
    json_output = LoggingConfig.JSON if json_output is None else json_output

    handler = logging.StreamHandler(sys.stderr)
    if json_output:
        handler.setFormatter(jsonlogger.JsonFormatter(LoggingConfig.JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(LoggingConfig.FORMAT))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(getattr(logging, level, logging.INFO))
    return root
