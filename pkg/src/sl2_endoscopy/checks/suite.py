"""Verification suite with sequential and parallel execution modes."""

import asyncio
import time
from typing import Any
from uuid import uuid4

from src.sl2_endoscopy.checks.acceptance import ACCEPTANCE_CHECKS
from src.sl2_endoscopy.checks.base_check import BaseCheck, CheckContext
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.utils.exceptions import SuiteExecutionError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


class CheckSuite:
    """Runs a list of checks sequentially or in parallel and aggregates their verdicts."""

    def __init__(
        self,
        checks: list[BaseCheck] | None = None,
        mode: str | None = None,
        quick: bool = True,
        seed: int | None = None,
        run_id: str | None = None,
    ):
        """
        Initialize suite.

        Args:
            checks: Checks to run (defaults to the acceptance checks)
            mode: Execution mode ("sequential" or "parallel"), defaults to settings
            quick: Use the reduced parameter sets
            seed: Seed for sampled checks, defaults to settings
            run_id: Identifier attached to every log line of the run
        """
        self.checks = checks if checks is not None else [cls() for cls in ACCEPTANCE_CHECKS]
        self.mode = mode or settings.SUITE_MODE
        self.context = CheckContext(
            quick=quick,
            seed=settings.DEFAULT_SEED if seed is None else seed,
            run_id=run_id or str(uuid4()),
        )

    async def execute(self) -> dict[str, Any]:
        """
        Execute all checks according to the specified mode.

        Returns:
            Dictionary with per-check results, the overall verdict and timings

        Raises:
            SuiteExecutionError: If the suite itself fails
        """
        start_time = time.time()
        logger.info(
            f"Starting verification suite in {self.mode} mode",
            extra={"suite_mode": self.mode, "run_id": self.context.run_id, "checks": len(self.checks)},
        )

        try:
            if self.mode == "parallel":
                results = await self._execute_parallel()
            else:
                results = await self._execute_sequential()

            total_time = time.time() - start_time
            aggregated = {
                "run_id": self.context.run_id,
                "mode": self.mode,
                "quick": self.context.quick,
                "seed": self.context.seed,
                "check_results": [results[check.name] for check in self.checks],
                "verdict": overall_verdict([results[check.name] for check in self.checks]),
                "total_execution_time": total_time,
            }

            logger.info(
                f"Verification suite completed in {total_time:.2f}s: {aggregated['verdict']}",
                extra={"suite_mode": self.mode, "run_id": self.context.run_id, "total_execution_time": total_time},
            )
            return aggregated

        except Exception as e:
            logger.error(
                f"Verification suite failed: {str(e)}",
                exc_info=True,
                extra={"suite_mode": self.mode, "run_id": self.context.run_id},
            )
            raise SuiteExecutionError(message=str(e), original_error=e) from e

    async def _run_one(self, check: BaseCheck) -> dict[str, Any]:
        check_start = time.time()
        try:
            outcome = await check.run(self.context)
            return {
                "check_name": check.name,
                "description": check.description,
                "outcome": outcome,
                "execution_time": time.time() - check_start,
                "status": "success",
            }
        except Exception as e:
            return {
                "check_name": check.name,
                "description": check.description,
                "outcome": None,
                "execution_time": time.time() - check_start,
                "status": "error",
                "error_message": str(e),
            }

    async def _execute_sequential(self) -> dict[str, dict[str, Any]]:
        """Execute checks one after another."""
        results: dict[str, dict[str, Any]] = {}
        for check in self.checks:
            results[check.name] = await self._run_one(check)
        return results

    async def _execute_parallel(self) -> dict[str, dict[str, Any]]:
        """Execute checks concurrently; each one runs in its own worker thread."""
        results_list = await asyncio.gather(*(self._run_one(check) for check in self.checks))
        return {result["check_name"]: result for result in results_list}


def overall_verdict(results: list[dict[str, Any]]) -> str:
    """failed if any check failed or errored, inconclusive if any was, passed otherwise."""
    verdicts = ["failed" if r["status"] == "error" else r["outcome"].verdict for r in results]
    if "failed" in verdicts:
        return "failed"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "passed"
