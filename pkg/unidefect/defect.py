"""Define the defect of a unitary matrix and its characterizations."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math
from typing import Any, Callable, Sequence

import numpy as np
import numpy.typing as npt
from scipy import linalg

from .const import DEFAULT_ZERO_TOL, LOGGER
from .errors import ConsistencyError, InvalidParameterError
from .matcore import (
    DEFAULT_POLICY,
    ComplexMatrix,
    RankResult,
    RealMatrix,
    TolerancePolicy,
    UnitaryMatrix,
    alpha_pairs,
    elimination_rank,
    nullspace_basis,
    numerical_rank,
    phasing_tangents,
    vec_forms,
)


class DefectMethod(str, Enum):
    """Define the ways a defect can be obtained."""

    B_SPAN = "B_span"
    CLOSED_FORM = "closed_form"
    DF_IMAGE = "Df_image"
    DG_NULLSPACE = "Dg_nullspace"
    M_RANK = "M_rank"
    W_NULLSPACE = "W_nullspace"


@dataclass(frozen=True, eq=False)
class DefectReport:
    """Define the outcome of a defect computation.

    zero_count counts entries of modulus at most 1e-12. When the singular value gap
    of the underlying rank decision is below the warning ratio, the report is
    marked uncertain and candidate_defects holds the two plausible values.
    """

    N: int
    defect: int
    method: DefectMethod
    rank_result: RankResult | None
    spanning_dim: int
    zero_count: int
    bound_b: int
    uncertain: bool = False
    candidate_defects: tuple[int, ...] = ()

    @property
    def isolated(self) -> bool:
        """Return whether a zero defect certifies isolation."""
        return self.defect == 0

    def as_dict(self) -> dict[str, Any]:
        """Return the JSON-ready form of the report."""
        rank = gap_ratio = None
        if self.rank_result is not None:
            rank = self.rank_result.rank
            if math.isfinite(self.rank_result.gap_ratio):
                gap_ratio = self.rank_result.gap_ratio
        data: dict[str, Any] = {
            "N": self.N,
            "defect": self.defect,
            "method": self.method.value,
            "rank": rank,
            "gap_ratio": gap_ratio,
            "isolated": self.isolated,
            "spanning_dim": self.spanning_dim,
            "zero_count": self.zero_count,
            "bound_b": self.bound_b,
            "uncertain": self.uncertain,
        }
        if self.uncertain:
            data["candidate_defects"] = list(self.candidate_defects)
        return data


@dataclass(frozen=True)
class EquivalenceTransform:
    """Define V = P_r D_r U D_c P_c with 1-based permutations and phase angles."""

    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    row_phases: tuple[float, ...]
    col_phases: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate the transform."""
        size = len(self.row_perm)
        for name in ("col_perm", "row_phases", "col_phases"):
            if len(getattr(self, name)) != size:
                raise InvalidParameterError(f"{name} must have length {size}")
        for perm in (self.row_perm, self.col_perm):
            if sorted(perm) != list(range(1, size + 1)):
                raise InvalidParameterError(f"Not a permutation of 1..{size}: {perm}")

    @property
    def size(self) -> int:
        """Return N."""
        return len(self.row_perm)

    @classmethod
    def identity(cls, size: int) -> "EquivalenceTransform":
        """Return the transform that changes nothing."""
        perm = tuple(range(1, size + 1))
        return cls(perm, perm, (0.0,) * size, (0.0,) * size)

    @classmethod
    def random(cls, size: int, seed: int | None = None) -> "EquivalenceTransform":
        """Return a random transform."""
        rng = np.random.default_rng(seed)
        return cls(
            tuple(int(v) + 1 for v in rng.permutation(size)),
            tuple(int(v) + 1 for v in rng.permutation(size)),
            tuple(float(v) for v in rng.uniform(0, 2 * np.pi, size)),
            tuple(float(v) for v in rng.uniform(0, 2 * np.pi, size)),
        )


def _require_size(unitary: UnitaryMatrix, minimum: int = 2) -> int:
    """Return N after checking it is large enough."""
    if unitary.size < minimum:
        raise InvalidParameterError(f"Need N >= {minimum}, got N = {unitary.size}")
    return unitary.size


def build_Mc(unitary: UnitaryMatrix) -> ComplexMatrix:
    """Return M_C, whose column alpha(i, j) is vec_C(U^(i,j))."""
    size = _require_size(unitary)
    u = unitary.matrix
    columns = []
    for i, j in alpha_pairs(size):
        block = np.zeros((size, size), dtype=np.complex128)
        block[i - 1] = u[i - 1] * u[j - 1].conj()
        block[j - 1] = -block[i - 1]
        columns.append(block.reshape(-1))
    return np.array(columns).T


def build_M(unitary: UnitaryMatrix) -> RealMatrix:
    """Return M = [Re M_C | Im M_C]."""
    m_c = build_Mc(unitary)
    return np.hstack((m_c.real, m_c.imag))


def build_W(unitary: UnitaryMatrix) -> ComplexMatrix:
    """Return W = [M_C | -conj(M_C)]."""
    m_c = build_Mc(unitary)
    return np.hstack((m_c, -m_c.conj()))


def build_Bij(unitary: UnitaryMatrix, i: int, j: int) -> ComplexMatrix:
    """Return B^(i,j) for 1-based i, j (i may equal j)."""
    size = unitary.size
    if not (1 <= i <= size and 1 <= j <= size):
        raise InvalidParameterError(f"Indices ({i}, {j}) outside 1..{size}")
    u = unitary.matrix
    row = u[j - 1] * u[j - 1, i - 1].conj()
    row[i - 1] = 0
    block = np.zeros((size, size), dtype=np.complex128)
    block[i - 1] = row
    block[:, i - 1] = -row.conj()
    return block


def build_B_stack(unitary: UnitaryMatrix) -> ComplexMatrix:
    """Return the N^2 x N^2 matrix whose rows are vec_C(B^(i,j)) for all i, j."""
    size = unitary.size
    return np.array(
        [
            build_Bij(unitary, i, j).reshape(-1)
            for i in range(1, size + 1)
            for j in range(1, size + 1)
        ]
    )


def commutator_expansion(
    unitary: UnitaryMatrix, alpha: npt.ArrayLike, beta: npt.ArrayLike
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Return D_1 U*D_2U - U*D_2U D_1 and sum alpha_i beta_j B^(i,j)."""
    size = unitary.size
    d_1 = np.diag(np.asarray(alpha, dtype=np.complex128))
    d_2 = np.diag(np.asarray(beta, dtype=np.complex128))
    u = unitary.matrix
    conjugated = u.conj().T @ d_2 @ u
    commutator = d_1 @ conjugated - conjugated @ d_1

    expansion = np.zeros((size, size), dtype=np.complex128)
    for i in range(size):
        for j in range(size):
            expansion += d_1[i, i] * d_2[j, j] * build_Bij(unitary, i + 1, j + 1)
    return commutator, expansion


def unitarity_residual_g(unitary: UnitaryMatrix, phases: RealMatrix) -> RealMatrix:
    """Return g(vec(R)), which vanishes iff U o EXP(iR) is unitary."""
    size = unitary.size
    modulated = unitary.matrix * np.exp(1j * np.asarray(phases, dtype=np.float64))
    gram = modulated @ modulated.conj().T
    values = np.array([-1j * gram[i - 1, j - 1] for i, j in alpha_pairs(size)])
    if not values.size:
        return np.zeros(0)
    return np.concatenate((values.real, values.imag))


def dg_jacobian(unitary: UnitaryMatrix) -> RealMatrix:
    """Return the analytic differential of g at R = 0 (N(N-1) x N^2)."""
    size = unitary.size
    u = unitary.matrix
    half = size * (size - 1) // 2
    jacobian = np.zeros((2 * half, size * size))
    for row, (i, j) in enumerate(alpha_pairs(size)):
        coefficients = u[i - 1] * u[j - 1].conj()
        for k in range(size):
            for target, sign in (((i - 1) * size + k, 1), ((j - 1) * size + k, -1)):
                jacobian[row, target] += sign * coefficients[k].real
                jacobian[half + row, target] += sign * coefficients[k].imag
    return jacobian


def build_Df(unitary: UnitaryMatrix) -> RealMatrix:
    """Return the Jacobian of the moduli-squaring map at vec_R(U)."""
    _, vec_r = vec_forms(unitary.matrix)
    half = vec_r.size // 2
    return 2 * np.hstack((np.diag(vec_r[:half]), np.diag(vec_r[half:])))


def tangent_basis(unitary: UnitaryMatrix) -> RealMatrix:
    """Return vec_R(A^(i,j) U), i < j, and vec_R(S^(i,j) U), i <= j, as columns."""
    size = unitary.size
    columns = []
    for i in range(size):
        for j in range(i + 1, size):
            generator = np.zeros((size, size), dtype=np.complex128)
            generator[i, j], generator[j, i] = 1, -1
            columns.append(vec_forms(generator @ unitary.matrix)[1])
    for i in range(size):
        for j in range(i, size):
            generator = np.zeros((size, size), dtype=np.complex128)
            generator[i, j] = generator[j, i] = 1j
            columns.append(vec_forms(generator @ unitary.matrix)[1])
    return np.array(columns).T


def spanning_dimension(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> int:
    """Return the dimension spanned by the 2N phasing tangents at U."""
    return numerical_rank(phasing_tangents(unitary), policy).rank


def spanning_set(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return 1-based (rows, columns) of an independent subset of phasing tangents.

    Rows are taken first; columns are visited from 2 to N and then 1, so for a
    matrix without zeros the first column is the one left out.
    """
    size = unitary.size
    tangents = phasing_tangents(unitary)
    order = [("row", k) for k in range(1, size + 1)]
    order += [("col", col) for col in [*range(2, size + 1), 1]]

    chosen: list[int] = []
    rows: list[int] = []
    cols: list[int] = []
    for kind, index in order:
        position = index - 1 if kind == "row" else size + index - 1
        trial = tangents[[*chosen, position]]
        if numerical_rank(trial, policy).rank == len(chosen) + 1:
            chosen.append(position)
            (rows if kind == "row" else cols).append(index)
    return tuple(rows), tuple(cols)


def is_valid_pattern_set(
    unitary: UnitaryMatrix,
    rows: Sequence[int],
    cols: Sequence[int],
    pattern: Sequence[tuple[int, int]],
    *,
    policy: TolerancePolicy = DEFAULT_POLICY,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> bool:
    """Return whether a pattern set fits U and the spanning set (rows, cols)."""
    size = unitary.size
    tangents = phasing_tangents(unitary)
    selected = [k - 1 for k in rows] + [size + col - 1 for col in cols]
    if numerical_rank(tangents[selected], policy).rank != len(selected):
        return False
    if len(selected) != spanning_dimension(unitary, policy):
        return False
    if len(set(pattern)) != len(selected):
        return False
    if any(abs(unitary.matrix[i - 1, j - 1]) <= zero_tol for i, j in pattern):
        return False

    filtering = np.zeros((size, size))
    for i, j in pattern:
        filtering[i - 1, j - 1] = 1
    vectors = []
    for k in rows:
        embedded = np.zeros((size, size))
        embedded[k - 1] = filtering[k - 1]
        vectors.append(embedded.reshape(-1))
    for col in cols:
        embedded = np.zeros((size, size))
        embedded[:, col - 1] = filtering[:, col - 1]
        vectors.append(embedded.reshape(-1))
    return numerical_rank(np.array(vectors), policy).rank == len(vectors)


def first_row_column_pattern(size: int) -> tuple[tuple[int, int], ...]:
    """Return the pattern set made of the first column and the first row."""
    return tuple((i, 1) for i in range(1, size + 1)) + tuple(
        (1, j) for j in range(2, size + 1)
    )


def is_dephased(
    candidate: UnitaryMatrix,
    unitary: UnitaryMatrix,
    pattern: Sequence[tuple[int, int]],
    tol: float = DEFAULT_ZERO_TOL,
) -> bool:
    """Return whether V has the moduli of U and agrees with U on the pattern."""
    if candidate.size != unitary.size:
        return False
    if not np.allclose(
        np.abs(candidate.matrix), np.abs(unitary.matrix), rtol=0, atol=tol
    ):
        return False
    return all(
        abs(candidate.matrix[i - 1, j - 1] - unitary.matrix[i - 1, j - 1]) <= tol
        for i, j in pattern
    )


def dephase(
    unitary: UnitaryMatrix, zero_tol: float = DEFAULT_ZERO_TOL
) -> tuple[UnitaryMatrix, RealMatrix, RealMatrix]:
    """Return V = diag(e^{i a}) U diag(e^{i b}) with real nonnegative first row/column.

    The angles a and b are returned alongside V.
    """
    u = unitary.matrix
    if np.any(np.abs(u[:, 0]) <= zero_tol) or np.any(np.abs(u[0]) <= zero_tol):
        raise InvalidParameterError("Cannot dephase: zero in the first row or column")
    row_phases = -np.angle(u[:, 0])
    col_phases = -np.angle(u[0] * np.exp(1j * row_phases[0]))
    col_phases[0] = 0.0
    dephased = np.exp(1j * row_phases)[:, None] * u * np.exp(1j * col_phases)
    return UnitaryMatrix.from_array(dephased), row_phases, col_phases


def zero_count(unitary: UnitaryMatrix, tol: float = DEFAULT_ZERO_TOL) -> int:
    """Return #U_0."""
    return unitary.zero_count(tol)


def _make_report(
    unitary: UnitaryMatrix,
    method: DefectMethod,
    rank_result: RankResult | None,
    to_defect: Callable[[int], int],
    policy: TolerancePolicy,
) -> DefectReport:
    """Assemble a report from a rank decision."""
    if rank_result is None:
        defect, uncertain, candidates = 0, False, ()
    else:
        defect = to_defect(rank_result.rank)
        uncertain = rank_result.uncertain
        candidates = tuple(to_defect(r) for r in rank_result.candidate_ranks())
    if uncertain:
        LOGGER.warning(
            "Defect of %sx%s matrix via %s is uncertain: candidates %s",
            unitary.size,
            unitary.size,
            method.value,
            candidates,
        )

    spanning = spanning_dimension(unitary, policy)
    zeros = zero_count(unitary)
    LOGGER.debug("Defect via %s for N=%s: %s", method.value, unitary.size, defect)
    return DefectReport(
        N=unitary.size,
        defect=defect,
        method=method,
        rank_result=rank_result,
        spanning_dim=spanning,
        zero_count=zeros,
        bound_b=defect + 2 * unitary.size - 1 - zeros - spanning,
        uncertain=uncertain,
        candidate_defects=candidates if uncertain else (),
    )


def _square_deficit(size: int) -> Callable[[int], int]:
    """Return rank -> (N-1)^2 - rank."""
    return lambda rank: (size - 1) ** 2 - rank


def defect_via_M(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> DefectReport:
    """Return (N-1)^2 - rank(M)."""
    size = unitary.size
    rank_result = numerical_rank(build_M(unitary), policy) if size > 1 else None
    return _make_report(
        unitary, DefectMethod.M_RANK, rank_result, _square_deficit(size), policy
    )


def defect_via_W(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> DefectReport:
    """Return dim N_C(W^T) - (2N-1)."""
    size = unitary.size
    rank_result = numerical_rank(build_W(unitary).T, policy) if size > 1 else None
    return _make_report(
        unitary,
        DefectMethod.W_NULLSPACE,
        rank_result,
        lambda rank: (size * size - rank) - (2 * size - 1),
        policy,
    )


def defect_via_B_span(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> DefectReport:
    """Return (N-1)^2 - dim span_C{vec_C(B^(i,j))}."""
    size = unitary.size
    rank_result = numerical_rank(build_B_stack(unitary), policy) if size > 1 else None
    return _make_report(
        unitary, DefectMethod.B_SPAN, rank_result, _square_deficit(size), policy
    )


def defect_via_Dg(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> DefectReport:
    """Return dim N_R(Dg_0) - (2N-1)."""
    size = unitary.size
    rank_result = numerical_rank(dg_jacobian(unitary), policy) if size > 1 else None
    return _make_report(
        unitary,
        DefectMethod.DG_NULLSPACE,
        rank_result,
        lambda rank: (size * size - rank) - (2 * size - 1),
        policy,
    )


def defect_via_tangent_image(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> DefectReport:
    """Return (N-1)^2 - dim Df(T_U), straight from the definition."""
    size = unitary.size
    rank_result = None
    if size > 1:
        rank_result = numerical_rank(build_Df(unitary) @ tangent_basis(unitary), policy)
    return _make_report(
        unitary, DefectMethod.DF_IMAGE, rank_result, _square_deficit(size), policy
    )


DEFECT_METHODS: dict[str, Callable[[UnitaryMatrix, TolerancePolicy], DefectReport]] = {
    "B": defect_via_B_span,
    "Df": defect_via_tangent_image,
    "Dg": defect_via_Dg,
    "M": defect_via_M,
    "W": defect_via_W,
}


def defect_report(
    unitary: UnitaryMatrix, method: str = "M", policy: TolerancePolicy = DEFAULT_POLICY
) -> DefectReport:
    """Return the report of a single named method."""
    try:
        compute = DEFECT_METHODS[method]
    except KeyError:
        raise InvalidParameterError(
            f"Unknown method {method!r}; choose from {sorted(DEFECT_METHODS)}"
        ) from None
    return compute(unitary, policy)


def all_defect_reports(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> dict[str, DefectReport]:
    """Return the reports of every method, checking that certain ones agree."""
    reports = {
        name: compute(unitary, policy) for name, compute in DEFECT_METHODS.items()
    }
    certain = {name: r.defect for name, r in reports.items() if not r.uncertain}
    if len(set(certain.values())) > 1:
        raise ConsistencyError(f"Defect methods disagree: {certain}")
    return reports


def elimination_defect(unitary: UnitaryMatrix) -> int:
    """Return (N-1)^2 - rank(M) with rank from Gaussian elimination."""
    size = unitary.size
    if size == 1:
        return 0
    return (size - 1) ** 2 - elimination_rank(build_M(unitary))


def bound_b(unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY) -> int:
    """Return b(U) = d(U) + (2N-1) - #U_0 - #S."""
    return defect_via_M(unitary, policy).bound_b


def kernel_solutions(
    unitary: UnitaryMatrix, policy: TolerancePolicy = DEFAULT_POLICY
) -> list[RealMatrix]:
    """Return real matrices R spanning the solutions of M^T vec(R) = 0."""
    size = unitary.size
    if size == 1:
        return [np.ones((1, 1))]
    basis = nullspace_basis(build_M(unitary).T, policy)
    return [basis[:, col].reshape(size, size) for col in range(basis.shape[1])]


def apply_equivalence(
    unitary: UnitaryMatrix, transform: EquivalenceTransform
) -> UnitaryMatrix:
    """Return P_r D_r U D_c P_c."""
    if transform.size != unitary.size:
        raise InvalidParameterError(
            f"Transform of size {transform.size} for matrix of size {unitary.size}"
        )
    phased = (
        np.exp(1j * np.array(transform.row_phases))[:, None]
        * unitary.matrix
        * np.exp(1j * np.array(transform.col_phases))
    )
    rows = [k - 1 for k in transform.row_perm]
    cols = [k - 1 for k in transform.col_perm]
    return UnitaryMatrix.from_array(phased[rows][:, cols])


def direct_sum(*unitaries: UnitaryMatrix) -> UnitaryMatrix:
    """Return the block diagonal matrix U_1 + U_2 + ... + U_r."""
    if not unitaries:
        raise InvalidParameterError("Need at least one block")
    return UnitaryMatrix.from_array(linalg.block_diag(*(u.matrix for u in unitaries)))
