"""Define Fourier matrices and the closed-form formulas for their defects."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
import logging
import math
from typing import Sequence

import numpy as np

from .const import LOGGER, MAX_NUMERIC_FOURIER_SIZE
from .defect import DefectMethod, DefectReport, defect_via_M
from .errors import ConsistencyError, InvalidParameterError, NumericGuardError
from .matcore import DEFAULT_POLICY, TolerancePolicy, UnitaryMatrix
from .numtheory import euler_product, factorize, is_prime


class SpecialCase(str, Enum):
    """Define the factorization shapes with dedicated formulas."""

    PQ = "pq"
    PQR = "pqr"
    P_POW_K = "p_pow_k"


@dataclass(frozen=True)
class DefectTableRow:
    """Define one row of the Fourier defect table."""

    N: int
    closed_form: int
    numeric: int | None = None
    uncertain: bool = False

    @property
    def agree(self) -> bool | None:
        """Return whether both engines agree (None without a numeric value)."""
        if self.numeric is None:
            return None
        return self.numeric == self.closed_form


def _require_size(size: int, minimum: int = 1) -> None:
    """Reject sizes below the minimum."""
    if isinstance(size, bool) or not isinstance(size, int) or size < minimum:
        raise InvalidParameterError(f"Need an integer N >= {minimum}, got {size!r}")


def fourier_matrix(size: int) -> UnitaryMatrix:
    """Return F_N with entries exp(2 pi i (i-1)(j-1) / N) / sqrt(N)."""
    _require_size(size)
    index = np.arange(size)
    exponents = np.outer(index, index) % size
    return UnitaryMatrix.from_array(
        np.exp(2j * np.pi * exponents / size) / math.sqrt(size)
    )


def fourier_kron(sizes: Sequence[int]) -> UnitaryMatrix:
    """Return F_{n_1} x F_{n_2} x ... (Kronecker product)."""
    if not sizes:
        raise InvalidParameterError("Need at least one factor")
    factors = [fourier_matrix(size).matrix for size in sizes]
    return UnitaryMatrix.from_array(reduce(np.kron, factors))


def defect_fourier_gcd(size: int) -> int:
    """Return d(F_N) from the gcd sums split by parity."""
    _require_size(size)
    if size == 1:
        return 0
    if size % 2:
        steps = range(1, (size - 1) // 2 + 1)
        return 1 - size + 2 * sum(math.gcd(size, l) for l in steps)
    steps = range(1, size // 2)
    return 1 - size // 2 + 2 * sum(math.gcd(size, l) for l in steps)


def defect_fourier_sum(size: int) -> int:
    """Return the sum of gcd(N, l) - 1 over l = 1..N-1."""
    _require_size(size)
    return sum(math.gcd(size, l) - 1 for l in range(1, size))


def defect_fourier_factorized(size: int) -> int:
    """Return N (prod (1 + k_j - k_j/p_j) - 2) + 1 in exact arithmetic."""
    _require_size(size)
    value = size * (euler_product(size) - 2) + 1
    if not isinstance(value, Fraction) or value.denominator != 1:
        raise ConsistencyError(f"Non-integral factorized defect for N={size}: {value}")
    return int(value)


def defect_fourier_special(case: SpecialCase | str, params: Sequence[int]) -> int:
    """Return d(F_N) for N = pq, pqr or p^k from the dedicated formulas."""
    case = SpecialCase(case)
    if case is SpecialCase.P_POW_K:
        if len(params) != 2:
            raise InvalidParameterError("p_pow_k takes (p, k)")
        p, k = params
        if not is_prime(p) or isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise InvalidParameterError(f"Need prime p and k >= 1, got ({p}, {k})")
        return p ** (k - 1) * ((p - 1) * k - p) + 1

    expected = 2 if case is SpecialCase.PQ else 3
    if len(params) != expected:
        raise InvalidParameterError(f"{case.value} takes {expected} primes")
    if not all(is_prime(value) for value in params):
        raise InvalidParameterError(f"Not all prime: {tuple(params)}")
    if len(set(params)) != expected:
        raise InvalidParameterError(f"Primes must be distinct: {tuple(params)}")

    if case is SpecialCase.PQ:
        p, q = params
        return 2 * (p - 1) * (q - 1)
    p, q, r = params
    return 2 * (3 * p * q * r - 2 * (p * q + p * r + q * r) + (p + q + r))


def special_case_of(size: int) -> tuple[SpecialCase, tuple[int, ...]] | None:
    """Return the special formula shape of N, if it has one."""
    factors = factorize(size)
    if len(factors.primes) == 1:
        return SpecialCase.P_POW_K, (factors.primes[0], factors.exponents[0])
    if set(factors.exponents) == {1} and len(factors.primes) in (2, 3):
        case = SpecialCase.PQ if len(factors.primes) == 2 else SpecialCase.PQR
        return case, factors.primes
    return None


def closed_form_report(size: int) -> DefectReport:
    """Return a report for F_N built from the closed form alone."""
    defect = defect_fourier_gcd(size)
    return DefectReport(
        N=size,
        defect=defect,
        method=DefectMethod.CLOSED_FORM,
        rank_result=None,
        spanning_dim=2 * size - 1,
        zero_count=0,
        bound_b=defect,
    )


def numeric_fourier_defect(
    size: int, policy: TolerancePolicy = DEFAULT_POLICY
) -> DefectReport:
    """Return the SVD-based report for F_N, refusing sizes above the guard."""
    _require_size(size)
    if size > MAX_NUMERIC_FOURIER_SIZE:
        raise NumericGuardError(
            f"Numeric defect limited to N <= {MAX_NUMERIC_FOURIER_SIZE}, got {size}"
        )
    return defect_via_M(fourier_matrix(size), policy)


def defect_table_row(
    size: int,
    *,
    numeric: bool = False,
    policy: TolerancePolicy = DEFAULT_POLICY,
    logger: logging.Logger = LOGGER,
) -> DefectTableRow:
    """Return one table row, warning when the closed form and the SVD disagree."""
    closed = defect_fourier_gcd(size)
    if not numeric:
        return DefectTableRow(size, closed)
    report = numeric_fourier_defect(size, policy)
    if report.defect != closed:
        logger.warning(
            "Engines disagree for N=%s: closed %s, numeric %s",
            size,
            closed,
            report.defect,
        )
    return DefectTableRow(size, closed, report.defect, report.uncertain)


def defect_table(
    n_max: int, *, numeric: bool = False, policy: TolerancePolicy = DEFAULT_POLICY
) -> list[DefectTableRow]:
    """Return the defect table for N = 1..n_max."""
    _require_size(n_max)
    if numeric and n_max > MAX_NUMERIC_FOURIER_SIZE:
        raise NumericGuardError(
            f"Numeric table limited to N <= {MAX_NUMERIC_FOURIER_SIZE}, got {n_max}"
        )

    return [
        defect_table_row(size, numeric=numeric, policy=policy)
        for size in range(1, n_max + 1)
    ]


def defect_table_tsv(rows: Sequence[DefectTableRow]) -> str:
    """Return the table as tab-separated values."""
    with_numeric = any(row.numeric is not None for row in rows)
    header = ["N", "defect_closed"]
    if with_numeric:
        header += ["defect_numeric", "agree"]

    lines = ["\t".join(header)]
    for row in rows:
        fields = [str(row.N), str(row.closed_form)]
        if with_numeric:
            fields += [str(row.numeric), str(row.agree).lower()]
        lines.append("\t".join(fields))
    return "\n".join(lines) + "\n"


def defect_table_markdown(rows: Sequence[DefectTableRow]) -> str:
    """Return the table as Markdown with N and d(F_N) columns."""
    with_numeric = any(row.numeric is not None for row in rows)
    header = "| N | d(F_N) |" + (" numeric | agree |" if with_numeric else "")
    rule = "|---|---|" + ("---|---|" if with_numeric else "")

    lines = [header, rule]
    for row in rows:
        line = f"| {row.N} | {row.closed_form} |"
        if with_numeric:
            line += f" {row.numeric} | {'yes' if row.agree else 'no'} |"
        lines.append(line)
    return "\n".join(lines) + "\n"
