"""Base verification check with error handling."""

import asyncio
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Literal

from src.sl2_endoscopy.utils.exceptions import CheckExecutionError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)

Verdict = Literal["passed", "failed", "inconclusive"]


@dataclass(frozen=True)
class CheckContext:
    """Parameters shared by every check of one suite run."""

    quick: bool = True
    seed: int = 0
    run_id: str = ""

    def rng(self, name: str) -> random.Random:
        """Independent, reproducible stream per check."""
        return random.Random(f"{self.seed}:{name}")


@dataclass
class CheckOutcome:
    """Verdict of one check with the probes that support it."""

    name: str
    verdict: Verdict = "passed"
    probes: int = 0
    failures: list[str] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    def expect(self, condition: bool, label: str) -> None:
        """Record one probe; a false condition fails the check."""
        self.probes += 1
        if not condition:
            self.failures.append(label)
            self.verdict = "failed"

    def inconclusive(self, label: str) -> None:
        self.notes.setdefault("inconclusive", []).append(label)
        if self.verdict == "passed":
            self.verdict = "inconclusive"


class BaseCheck(ABC):
    """Abstract base class for all verification checks."""

    def __init__(self, name: str, description: str):
        """
        Initialize base check.

        Args:
            name: Check name, used in reports and logs
            description: One-line statement of the property checked
        """
        self.name = name
        self.description = description

    @abstractmethod
    def evaluate(self, context: CheckContext) -> CheckOutcome:
        """
        Compute the check synchronously.

        Args:
            context: Suite parameters

        Returns:
            Outcome with verdict and probes
        """

    async def execute(self, context: CheckContext) -> CheckOutcome:
        """Run ``evaluate`` in a worker thread so checks can overlap."""
        return await asyncio.to_thread(self.evaluate, context)

    async def run(self, context: CheckContext) -> CheckOutcome:
        """
        Run check with error handling and logging.

        Args:
            context: Suite parameters

        Returns:
            Outcome with verdict and probes

        Raises:
            CheckExecutionError: If the check raises
        """
        logger.info(
            f"Check {self.name} starting execution",
            extra={"check_name": self.name, "run_id": context.run_id, "quick": context.quick},
        )
        try:
            outcome = await self.execute(context)
            log = logger.warning if outcome.verdict == "failed" else logger.info
            log(
                f"Check {self.name} finished: {outcome.verdict}",
                extra={"check_name": self.name, "run_id": context.run_id, "probes": outcome.probes},
            )
            return outcome
        except Exception as e:
            error_msg = str(e)
            logger.error(
                f"Check {self.name} failed: {error_msg}",
                exc_info=True,
                extra={"check_name": self.name, "run_id": context.run_id},
            )
            raise CheckExecutionError(
                check_name=self.name,
                message=error_msg,
                original_error=e,
            ) from e

    def __repr__(self) -> str:
        """String representation of check."""
        return f"{self.__class__.__name__}(name={self.name})"
