"""Utility modules for the SL(2) endoscopy library."""

from src.sl2_endoscopy.utils.exceptions import (
    CheckExecutionError,
    ExtensionError,
    ParseError,
    PrecisionError,
    SuiteExecutionError,
)
from src.sl2_endoscopy.utils.logger import get_logger

__all__ = [
    "PrecisionError",
    "ParseError",
    "ExtensionError",
    "CheckExecutionError",
    "SuiteExecutionError",
    "get_logger",
]
