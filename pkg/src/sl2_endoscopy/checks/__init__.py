"""Verification checks and the suite that runs them."""

from src.sl2_endoscopy.checks.acceptance import ACCEPTANCE_CHECKS
from src.sl2_endoscopy.checks.base_check import BaseCheck, CheckContext, CheckOutcome
from src.sl2_endoscopy.checks.suite import CheckSuite

__all__ = [
    "BaseCheck",
    "CheckContext",
    "CheckOutcome",
    "CheckSuite",
    "ACCEPTANCE_CHECKS",
]
