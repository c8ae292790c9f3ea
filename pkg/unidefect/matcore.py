"""Define dense matrix primitives: vector forms, indexing, ranks and nullspaces."""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Iterator, Union

import numpy as np
import numpy.typing as npt
from scipy import linalg

from .const import (
    DEFAULT_GAP_WARNING,
    DEFAULT_REL_TOL,
    DEFAULT_UNITARITY_TOL,
    DEFAULT_ZERO_TOL,
    LOGGER,
)
from .errors import InvalidParameterError, NotUnitaryError

ComplexMatrix = npt.NDArray[np.complex128]
RealMatrix = npt.NDArray[np.float64]
AnyMatrix = Union[ComplexMatrix, RealMatrix]

ELIMINATION_TOL = 1e-13


@dataclass(frozen=True)
class TolerancePolicy:
    """Define how singular values are split into kept and dropped ones."""

    rel_tol: float = DEFAULT_REL_TOL
    gap_warning: float = DEFAULT_GAP_WARNING

    def __post_init__(self) -> None:
        """Validate the policy."""
        if not 0 < self.rel_tol < 1:
            raise InvalidParameterError(f"rel_tol must lie in (0, 1): {self.rel_tol}")
        if self.gap_warning <= 1:
            raise InvalidParameterError(
                f"gap_warning must exceed 1: {self.gap_warning}"
            )


DEFAULT_POLICY = TolerancePolicy()


@dataclass(frozen=True, eq=False)
class RankResult:
    """Define the outcome of a numerical rank decision."""

    rank: int
    singular_values: RealMatrix
    gap_ratio: float
    tolerance_used: float
    gap_warning: float = DEFAULT_GAP_WARNING

    @property
    def uncertain(self) -> bool:
        """Return whether the kept/dropped split is too close to call."""
        return self.gap_ratio < self.gap_warning

    def candidate_ranks(self) -> tuple[int, int]:
        """Return the chosen rank and the most plausible alternative.

        The alternative is the cut at the largest ratio between consecutive singular
        values; if that coincides with the chosen rank, the neighbouring rank is used.
        """
        sigma = self.singular_values
        if sigma.size < 2 or sigma[0] == 0:
            return self.rank, self.rank

        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(sigma[1:] > 0, sigma[:-1] / sigma[1:], np.inf)
        alternative = int(np.argmax(ratios)) + 1
        if alternative == self.rank:
            alternative = self.rank + 1 if self.rank < sigma.size else self.rank - 1
        return self.rank, alternative


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Define a square complex matrix validated to be unitary."""

    matrix: ComplexMatrix = field(repr=False)
    unitarity_residual: float

    @classmethod
    def from_array(
        cls, array: npt.ArrayLike, *, tol: float = DEFAULT_UNITARITY_TOL
    ) -> "UnitaryMatrix":
        """Validate an array and wrap it."""
        matrix = np.array(array, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or not matrix.size:
            raise InvalidParameterError(
                f"A unitary matrix must be square and non-empty: {matrix.shape}"
            )
        residual = unitarity_residual(matrix)
        if residual > tol:
            raise NotUnitaryError(
                f"Unitarity residual {residual:.3e} exceeds tolerance {tol:.1e}"
            )
        matrix.setflags(write=False)
        return cls(matrix, residual)

    @property
    def size(self) -> int:
        """Return N."""
        return int(self.matrix.shape[0])

    def adjoint(self) -> "UnitaryMatrix":
        """Return U*."""
        return UnitaryMatrix.from_array(self.matrix.conj().T)

    def conj(self) -> "UnitaryMatrix":
        """Return the entrywise conjugate."""
        return UnitaryMatrix.from_array(self.matrix.conj())

    def transpose(self) -> "UnitaryMatrix":
        """Return U transposed."""
        return UnitaryMatrix.from_array(self.matrix.T)

    def zero_count(self, tol: float = DEFAULT_ZERO_TOL) -> int:
        """Return the number of entries with modulus at most tol."""
        return int(np.count_nonzero(np.abs(self.matrix) <= tol))


def unitarity_residual(matrix: ComplexMatrix) -> float:
    """Return max |(A A* - I)_ij|."""
    size = matrix.shape[0]
    return float(np.max(np.abs(matrix @ matrix.conj().T - np.eye(size))))


def vec_forms(matrix: AnyMatrix) -> tuple[ComplexMatrix, RealMatrix]:
    """Return the row-by-row complex and real vector forms of a matrix."""
    vec_c = np.asarray(matrix, dtype=np.complex128).reshape(-1)
    return vec_c, np.concatenate((vec_c.real, vec_c.imag))


def unvec_c(vec_c: npt.ArrayLike, shape: tuple[int, int]) -> ComplexMatrix:
    """Rebuild a matrix from its complex vector form."""
    return np.asarray(vec_c, dtype=np.complex128).reshape(shape)


def unvec_r(vec_r: npt.ArrayLike, shape: tuple[int, int]) -> ComplexMatrix:
    """Rebuild a matrix from its real vector form."""
    vector = np.asarray(vec_r, dtype=np.float64)
    half = vector.size // 2
    if vector.size != 2 * shape[0] * shape[1]:
        raise InvalidParameterError(
            f"Vector of length {vector.size} cannot fill a {shape} matrix"
        )
    return (vector[:half] + 1j * vector[half:]).reshape(shape)


def alpha_index(i: int, j: int, size: int) -> int:
    """Return the 1-based position of the pair (i, j), i < j, in lexicographic order."""
    if not 1 <= i < j <= size:
        raise InvalidParameterError(f"Need 1 <= i < j <= {size}, got ({i}, {j})")
    return (i - 1) * size - i * (i - 1) // 2 + (j - i)


def alpha_pairs(size: int) -> Iterator[tuple[int, int]]:
    """Yield the 1-based pairs (i, j), i < j, in alpha order."""
    for i in range(1, size):
        for j in range(i + 1, size + 1):
            yield i, j


def mod1(value: int, modulus: int) -> int:
    """Return value mod modulus with representatives in {1..modulus}."""
    return (value - 1) % modulus + 1


def numerical_rank(
    matrix: AnyMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> RankResult:
    """Return the SVD rank of a matrix along with gap diagnostics."""
    array = np.atleast_2d(np.asarray(matrix))
    if not array.size:
        return RankResult(0, np.zeros(0), math.inf, 0.0, policy.gap_warning)

    sigma = linalg.svd(array, compute_uv=False)
    return _rank_from_singular_values(sigma, array.shape, policy)


def _rank_from_singular_values(
    sigma: RealMatrix, shape: tuple[int, ...], policy: TolerancePolicy
) -> RankResult:
    """Split singular values at the relative threshold."""
    tolerance = policy.rel_tol * float(sigma[0]) * max(shape) if sigma.size else 0.0
    rank = int(np.count_nonzero(sigma > tolerance))

    if rank in (0, sigma.size) or sigma[rank] == 0:
        gap_ratio = math.inf
    else:
        gap_ratio = float(sigma[rank - 1] / sigma[rank])

    if gap_ratio < policy.gap_warning:
        LOGGER.warning(
            "Small singular value gap %.3e at rank %s (shape %s)",
            gap_ratio,
            rank,
            shape,
        )
    return RankResult(rank, sigma, gap_ratio, tolerance, policy.gap_warning)


def nullspace_basis(
    matrix: AnyMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> AnyMatrix:
    """Return an orthonormal kernel basis as the columns of a matrix."""
    array = np.atleast_2d(np.asarray(matrix))
    n_cols = array.shape[1]
    if not n_cols:
        return np.zeros((0, 0), dtype=array.dtype)
    if not array.shape[0] or not np.any(array):
        return np.eye(n_cols, dtype=array.dtype)

    _, sigma, vh = linalg.svd(array, full_matrices=True)
    rank = _rank_from_singular_values(sigma, array.shape, policy).rank
    return vh[rank:].conj().T


def elimination_rank(matrix: AnyMatrix, tol: float = ELIMINATION_TOL) -> int:
    """Return the rank found by Gaussian elimination with complete pivoting.

    Used as an SVD-independent oracle on small matrices; tol is relative to the
    largest entry.
    """
    work = np.array(matrix, dtype=np.complex128)
    if not work.size:
        return 0
    scale = float(np.max(np.abs(work)))
    if scale == 0:
        return 0
    work /= scale

    rank = 0
    n_rows, n_cols = work.shape
    while rank < min(n_rows, n_cols):
        block = np.abs(work[rank:, rank:])
        row, col = np.unravel_index(int(np.argmax(block)), block.shape)
        if block[row, col] <= tol:
            break
        row, col = row + rank, col + rank
        work[[rank, row]] = work[[row, rank]]
        work[:, [rank, col]] = work[:, [col, rank]]
        factors = work[rank + 1 :, rank] / work[rank, rank]
        work[rank + 1 :] -= np.outer(factors, work[rank])
        rank += 1
    return rank


def subspace_distance(first: AnyMatrix, second: AnyMatrix) -> float:
    """Return the largest principal angle between two column spans."""
    if not first.size and not second.size:
        return 0.0
    if not first.size or not second.size:
        return math.pi / 2
    return float(np.max(linalg.subspace_angles(first, second)))


def phasing_tangents(unitary: UnitaryMatrix) -> RealMatrix:
    """Return vec_R(i diag(e_k) U) and vec_R(U i diag(e_l)) as 2N rows."""
    size = unitary.size
    rows = []
    for k in range(size):
        tangent = np.zeros((size, size), dtype=np.complex128)
        tangent[k] = 1j * unitary.matrix[k]
        rows.append(vec_forms(tangent)[1])
    for col in range(size):
        tangent = np.zeros((size, size), dtype=np.complex128)
        tangent[:, col] = 1j * unitary.matrix[:, col]
        rows.append(vec_forms(tangent)[1])
    return np.array(rows)


def is_bistochastic(matrix: RealMatrix, tol: float = DEFAULT_ZERO_TOL) -> bool:
    """Return whether a matrix is nonnegative with unit row and column sums."""
    array = np.asarray(matrix, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        return False
    return bool(
        np.all(array >= -tol)
        and np.allclose(array.sum(axis=0), 1, rtol=0, atol=tol)
        and np.allclose(array.sum(axis=1), 1, rtol=0, atol=tol)
    )


def random_unitary(size: int, seed: int | None = None) -> UnitaryMatrix:
    """Return a Haar-distributed unitary matrix."""
    if size < 1:
        raise InvalidParameterError(f"Size must be positive: {size}")
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((size, size)) + 1j * rng.standard_normal(
        (size, size)
    )
    q_factor, r_factor = linalg.qr(gaussian / math.sqrt(2))
    diagonal = np.diag(r_factor)
    return UnitaryMatrix.from_array(q_factor * (diagonal / np.abs(diagonal)))


def random_orthogonal(size: int, seed: int | None = None) -> UnitaryMatrix:
    """Return a Haar-distributed real orthogonal matrix."""
    if size < 1:
        raise InvalidParameterError(f"Size must be positive: {size}")
    rng = np.random.default_rng(seed)
    q_factor, r_factor = linalg.qr(rng.standard_normal((size, size)))
    signs = np.where(np.diag(r_factor) < 0, -1.0, 1.0)
    return UnitaryMatrix.from_array(q_factor * signs)
