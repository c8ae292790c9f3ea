"""Define parameter cycle matrices and the defect solutions R = P F_N they yield."""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Any, Sequence

import numpy as np
import numpy.typing as npt

from .const import LOGGER
from .defect import build_M
from .errors import ConsistencyError, InvalidParameterError
from .fourier import fourier_matrix
from .matcore import ComplexMatrix, RealMatrix, mod1

IMAGINARY_RESIDUE_TOL = 1e-12
SOLUTION_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ParameterCycleMatrix:
    """Define a PCM of size N.

    step_blocks[s - 1] holds the gcd(N, s) complex cycle parameters of column s + 1;
    column N - s + 1 carries their conjugates. central_column is only non-empty for
    even N.
    """

    N: int
    first_column: tuple[float, ...]
    step_blocks: tuple[tuple[complex, ...], ...]
    central_column: tuple[float, ...]
    materialized: ComplexMatrix = field(repr=False)


@dataclass(frozen=True)
class PcmCheck:
    """Define the verification outcome of a PCM."""

    N: int
    parameter_count: int
    structure_ok: bool
    imaginary_residue: float
    residual: float

    @property
    def passed(self) -> bool:
        """Return whether every check passed."""
        return (
            self.structure_ok
            and self.imaginary_residue <= IMAGINARY_RESIDUE_TOL
            and self.residual <= SOLUTION_RESIDUAL_TOL
        )


def _require_size(size: int) -> None:
    """Reject non-positive sizes."""
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise InvalidParameterError(f"Need an integer N >= 1, got {size!r}")


def step_count(size: int) -> int:
    """Return the number of conjugate column pairs."""
    return (size - 1) // 2 if size % 2 else size // 2 - 1


def central_count(size: int) -> int:
    """Return the number of central column parameters."""
    return 0 if size % 2 else size // 2


def pcm_parameter_count(size: int) -> int:
    """Return the number of real parameters of a PCM of size N."""
    _require_size(size)
    steps = sum(math.gcd(size, s) for s in range(1, step_count(size) + 1))
    return size + 2 * steps + central_count(size)


def pcm_from_parameters(
    size: int,
    first_column: Sequence[float],
    step_blocks: Sequence[Sequence[complex]],
    central_column: Sequence[float] = (),
) -> ParameterCycleMatrix:
    """Return the PCM built from structured parameters."""
    _require_size(size)
    if len(first_column) != size:
        raise InvalidParameterError(f"First column needs {size} values")
    if len(step_blocks) != step_count(size):
        raise InvalidParameterError(f"Need {step_count(size)} step blocks")
    if len(central_column) != central_count(size):
        raise InvalidParameterError(
            f"Central column needs {central_count(size)} values"
        )
    for step, block in enumerate(step_blocks, start=1):
        if len(block) != math.gcd(size, step):
            raise InvalidParameterError(
                f"Step {step} needs {math.gcd(size, step)} cycles, got {len(block)}"
            )
    real_parts = np.asarray([*first_column, *central_column], dtype=np.complex128)
    if np.any(real_parts.imag != 0):
        raise InvalidParameterError("First and central columns must be real")

    matrix = np.zeros((size, size), dtype=np.complex128)
    matrix[:, 0] = np.real(first_column)
    for step, block in enumerate(step_blocks, start=1):
        cycles = math.gcd(size, step)
        for row in range(1, size + 1):
            value = complex(block[mod1(row, cycles) - 1])
            matrix[row - 1, step] = value
            matrix[row - 1, size - step] = value.conjugate()
    if central_count(size):
        half = size // 2
        for row in range(1, size + 1):
            value = central_column[mod1(row, half) - 1]
            matrix[row - 1, half] = float(np.real(value))

    matrix.setflags(write=False)
    return ParameterCycleMatrix(
        size,
        tuple(float(np.real(v)) for v in first_column),
        tuple(tuple(complex(v) for v in block) for block in step_blocks),
        tuple(float(np.real(v)) for v in central_column),
        matrix,
    )


def pcm_from_vector(size: int, vector: npt.ArrayLike) -> ParameterCycleMatrix:
    """Return the PCM for a real vector in canonical parameter order.

    Order: first column top to bottom, then steps by increasing index with cycles
    by increasing k as (Re, Im) pairs, then the central column.
    """
    values = np.asarray(vector, dtype=np.float64).reshape(-1)
    if values.size != pcm_parameter_count(size):
        raise InvalidParameterError(
            f"Need {pcm_parameter_count(size)} parameters, got {values.size}"
        )
    first_column = values[:size]
    position = size
    step_blocks = []
    for step in range(1, step_count(size) + 1):
        cycles = math.gcd(size, step)
        pairs = values[position : position + 2 * cycles]
        step_blocks.append(pairs[0::2] + 1j * pairs[1::2])
        position += 2 * cycles
    return pcm_from_parameters(size, first_column, step_blocks, values[position:])


def pcm_to_vector(pcm: ParameterCycleMatrix) -> RealMatrix:
    """Return the canonical real parameter vector of a PCM."""
    values: list[float] = list(pcm.first_column)
    for block in pcm.step_blocks:
        for value in block:
            values += [value.real, value.imag]
    values += pcm.central_column
    return np.array(values)


def pcm_parameter_basis(size: int) -> list[ParameterCycleMatrix]:
    """Return one PCM per real parameter, in canonical order."""
    count = pcm_parameter_count(size)
    return [pcm_from_vector(size, row) for row in np.eye(count)]


def random_pcm(size: int, seed: int | None = None) -> ParameterCycleMatrix:
    """Return a PCM with standard normal parameters."""
    rng = np.random.default_rng(seed)
    return pcm_from_vector(size, rng.standard_normal(pcm_parameter_count(size)))


def is_pcm_structured(matrix: ComplexMatrix, tol: float = 1e-14) -> bool:
    """Return whether a matrix follows the PCM cycle and conjugation pattern."""
    size = matrix.shape[0]
    if np.max(np.abs(matrix[:, 0].imag), initial=0) > tol:
        return False
    for step in range(1, step_count(size) + 1):
        cycles = math.gcd(size, step)
        column = matrix[:, step]
        if not np.allclose(matrix[:, size - step], column.conj(), rtol=0, atol=tol):
            return False
        for row in range(1, size + 1):
            if abs(column[row - 1] - column[mod1(row, cycles) - 1]) > tol:
                return False
    if central_count(size):
        half = size // 2
        central = matrix[:, half]
        if np.max(np.abs(central.imag)) > tol:
            return False
        if not np.allclose(central[:half], central[half:], rtol=0, atol=tol):
            return False
    return True


def pcm_to_solution(pcm: ParameterCycleMatrix) -> RealMatrix:
    """Return R = P F_N, which is real for a valid PCM."""
    product = pcm.materialized @ fourier_matrix(pcm.N).matrix
    residue = float(np.max(np.abs(product.imag)))
    if residue > IMAGINARY_RESIDUE_TOL:
        raise ConsistencyError(f"P F_N has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(product.real)


def solution_residual(solution: RealMatrix) -> float:
    """Return ||M^T vec(R)|| with M built for F_N."""
    size = solution.shape[0]
    if size == 1:
        return 0.0
    m_matrix = build_M(fourier_matrix(size))
    return float(np.linalg.norm(m_matrix.T @ solution.reshape(-1)))


def pcm_solution_basis(size: int) -> RealMatrix:
    """Return vec(P F_N) for every PCM basis element, as columns."""
    return np.array(
        [pcm_to_solution(pcm).reshape(-1) for pcm in pcm_parameter_basis(size)]
    ).T


def pcm_check(pcm: ParameterCycleMatrix) -> PcmCheck:
    """Return the structural and solution checks of a PCM."""
    product = pcm.materialized @ fourier_matrix(pcm.N).matrix
    check = PcmCheck(
        N=pcm.N,
        parameter_count=pcm_parameter_count(pcm.N),
        structure_ok=is_pcm_structured(pcm.materialized),
        imaginary_residue=float(np.max(np.abs(product.imag))),
        residual=solution_residual(np.ascontiguousarray(product.real)),
    )
    LOGGER.debug("PCM check: %s", check)
    return check


def pcm_to_json(pcm: ParameterCycleMatrix) -> dict[str, Any]:
    """Return the JSON form of a PCM's parameters."""
    return {
        "N": pcm.N,
        "first_col": list(pcm.first_column),
        "steps": [
            {"j": step + 1, "cycles": [[v.real, v.imag] for v in block]}
            for step, block in enumerate(pcm.step_blocks, start=1)
        ],
        "central": list(pcm.central_column),
    }


def pcm_from_json(data: dict[str, Any]) -> ParameterCycleMatrix:
    """Return the PCM described by a JSON document."""
    try:
        size = int(data["N"])
        steps = sorted(data["steps"], key=lambda step: int(step["j"]))
        columns = [int(step["j"]) for step in steps]
        blocks = [[complex(re, im) for re, im in step["cycles"]] for step in steps]
        first_column = [float(v) for v in data["first_col"]]
        central_column = [float(v) for v in data.get("central", [])]
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidParameterError(f"Malformed PCM document: {err}") from err

    if columns != list(range(2, len(steps) + 2)):
        raise InvalidParameterError("Step columns must run 2, 3, ... without gaps")
    return pcm_from_parameters(size, first_column, blocks, central_column)
