"""Define a configured facade over the defect engines."""
from __future__ import annotations

import asyncio
from concurrent.futures import ThreadPoolExecutor
from functools import partial
import logging
import time
from typing import Any, Callable, Iterable, TypeVar

from .const import DEFAULT_MAX_WORKERS, LOGGER, MAX_NUMERIC_FOURIER_SIZE
from .defect import DefectReport, all_defect_reports, defect_report
from .errors import InvalidParameterError, NumericGuardError
from .families import HadamardFamily, hadamard_family
from .fourier import DefectTableRow, defect_table_row
from .matcore import DEFAULT_POLICY, TolerancePolicy, UnitaryMatrix

_T = TypeVar("_T")


class Engine:
    """Define the engine."""

    def __init__(
        self,
        *,
        logger: logging.Logger = LOGGER,
        tolerance: TolerancePolicy = DEFAULT_POLICY,
        max_workers: int = DEFAULT_MAX_WORKERS,
    ) -> None:
        """Initialize."""
        if max_workers < 1:
            raise InvalidParameterError(f"max_workers must be positive: {max_workers}")
        self._logger = logger
        self._max_workers = max_workers
        self.tolerance = tolerance

    async def _async_map(
        self, func: Callable[[Any], _T], items: Iterable[Any]
    ) -> list[_T]:
        """Run func over items on worker threads, keeping input order."""
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self._max_workers) as executor:
            return list(
                await asyncio.gather(
                    *(loop.run_in_executor(executor, func, item) for item in items)
                )
            )

    def defect(self, unitary: UnitaryMatrix, method: str = "M") -> DefectReport:
        """Return the defect report of one method."""
        start = time.perf_counter()
        report = defect_report(unitary, method, self.tolerance)
        self._logger.debug(
            "Defect of N=%s via %s: %s (%.3f s)",
            unitary.size,
            method,
            report.defect,
            time.perf_counter() - start,
        )
        return report

    def all_defects(self, unitary: UnitaryMatrix) -> dict[str, DefectReport]:
        """Return the reports of every method."""
        return all_defect_reports(unitary, self.tolerance)

    def family(self, p: int, k: int, construction: str = "direct") -> HadamardFamily:
        """Return the family around F_{p^k}."""
        family = hadamard_family(p, k, construction, self.tolerance)
        self._logger.debug("Family for p=%s, k=%s has dim %s", p, k, family.dim)
        return family

    async def async_defect_table(
        self, n_max: int, *, numeric: bool = False
    ) -> list[DefectTableRow]:
        """Return the Fourier defect table for N = 1..n_max, rows ordered by N."""
        if n_max < 1:
            raise InvalidParameterError(f"Need n_max >= 1, got {n_max}")
        if numeric and n_max > MAX_NUMERIC_FOURIER_SIZE:
            raise NumericGuardError(
                f"Numeric table limited to N <= {MAX_NUMERIC_FOURIER_SIZE}, got {n_max}"
            )
        row = partial(
            defect_table_row,
            numeric=numeric,
            policy=self.tolerance,
            logger=self._logger,
        )
        rows = await self._async_map(row, range(1, n_max + 1))
        self._logger.debug("Computed %s table rows (numeric=%s)", len(rows), numeric)
        return rows

    async def async_defects(
        self, unitaries: Iterable[UnitaryMatrix], method: str = "M"
    ) -> list[DefectReport]:
        """Return one report per matrix, in input order."""
        return await self._async_map(partial(self.defect, method=method), unitaries)
