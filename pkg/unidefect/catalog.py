"""Define named special matrices."""
from __future__ import annotations

from fractions import Fraction
import math
from typing import Callable, Union

import numpy as np

from .const import LOGGER
from .errors import InvalidParameterError, MatrixSourceError
from .fourier import fourier_kron, fourier_matrix
from .matcore import (
    AnyMatrix,
    RealMatrix,
    UnitaryMatrix,
    random_orthogonal,
    random_unitary,
)

RAY_T_MIN = Fraction(-1, 9)

RAY_DIRECTION = np.array(
    [
        [9 / 4, -3 / 4, -3 / 4, -3 / 4],
        [-3 / 4, 1 / 4, 1 / 4, 1 / 4],
        [-3 / 4, 1 / 4, 1 / 4, 1 / 4],
        [-3 / 4, 1 / 4, 1 / 4, 1 / 4],
    ]
)

CatalogEntry = Union[UnitaryMatrix, RealMatrix]


def spectral_matrix_s6() -> UnitaryMatrix:
    """Return the isolated 6 x 6 complex Hadamard matrix S_6."""
    # Exponents of omega = exp(2 pi i / 3).
    powers = np.array(
        [
            [0, 0, 0, 0, 0, 0],
            [0, 0, 1, 1, 2, 2],
            [0, 1, 0, 2, 2, 1],
            [0, 1, 2, 0, 1, 2],
            [0, 2, 2, 1, 0, 1],
            [0, 2, 1, 2, 1, 0],
        ]
    )
    return UnitaryMatrix.from_array(np.exp(2j * np.pi * powers / 3) / math.sqrt(6))


def flat_matrix(size: int) -> RealMatrix:
    """Return J_N, the bistochastic matrix with every entry 1/N."""
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise InvalidParameterError(f"Need an integer N >= 1, got {size!r}")
    return np.full((size, size), 1 / size)


def non_unistochastic_ray_point(t: float | Fraction) -> RealMatrix:
    """Return J_4 + t K for t in [-1/9, 0).

    Points on this ray are bistochastic but not unistochastic although they
    approach J_4. The closed endpoint t = -1/9 is where entry (1, 1) reaches 0.
    """
    exact = Fraction(t)
    if not RAY_T_MIN <= exact < 0:
        raise InvalidParameterError(f"t must lie in [-1/9, 0), got {t}")
    entries = [
        [Fraction(1, 4) + exact * Fraction(direction) for direction in row]
        for row in RAY_DIRECTION.tolist()
    ]
    return np.array(entries, dtype=np.float64)


def moduli_map(matrix: AnyMatrix | UnitaryMatrix) -> RealMatrix:
    """Return the entrywise squared moduli |U_ij|^2."""
    if isinstance(matrix, UnitaryMatrix):
        matrix = matrix.matrix
    return np.abs(np.asarray(matrix)) ** 2


def _integers(text: str) -> list[int]:
    """Parse a comma separated list of integers."""
    return [int(value) for value in text.split(",")]


def _resolve_random(argument: str) -> UnitaryMatrix:
    """Build random:N:seed."""
    size, _, seed = argument.partition(":")
    return random_unitary(int(size), int(seed) if seed else None)


def _resolve_orthogonal(argument: str) -> UnitaryMatrix:
    """Build orthogonal:N:seed."""
    size, _, seed = argument.partition(":")
    return random_orthogonal(int(size), int(seed) if seed else None)


def _resolve_identity(argument: str) -> UnitaryMatrix:
    """Build identity:N."""
    return UnitaryMatrix.from_array(np.eye(int(argument)))


CATALOG: dict[str, Callable[[str], CatalogEntry]] = {
    "fourier": lambda argument: fourier_matrix(int(argument)),
    "identity": _resolve_identity,
    "jn": lambda argument: flat_matrix(int(argument)),
    "kron": lambda argument: fourier_kron(_integers(argument)),
    "orthogonal": _resolve_orthogonal,
    "random": _resolve_random,
    "ray4": lambda argument: non_unistochastic_ray_point(Fraction(argument)),
}


def is_catalog_name(name: str) -> bool:
    """Return whether a string addresses the catalog rather than a file."""
    return name == "s6" or name.partition(":")[0] in CATALOG


def resolve(name: str) -> CatalogEntry:
    """Return the matrix addressed by a catalog name such as "fourier:6"."""
    if name == "s6":
        return spectral_matrix_s6()

    kind, _, argument = name.partition(":")
    if kind not in CATALOG or not argument:
        raise MatrixSourceError(f"Unknown catalog name: {name}")
    LOGGER.debug("Resolving catalog entry %s", name)
    try:
        return CATALOG[kind](argument)
    except (ValueError, ZeroDivisionError) as err:
        raise MatrixSourceError(f"Bad argument in catalog name {name}: {err}") from err
