# -*- coding: utf-8 -*-
"""Utils module."""
from app.utils.logging import setup_logging, get_logger
from app.utils.error_handler import ErrorHandler, with_error_handling, resample_on

__all__ = [
    "setup_logging",
    "get_logger",
    "ErrorHandler",
    "with_error_handling",
    "resample_on",
]
