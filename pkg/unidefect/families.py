"""Define the affine Hadamard families stemming from Fourier matrices of size p^k."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math
from typing import Any, Sequence

import numpy as np
import numpy.typing as npt
from scipy import linalg

from .const import (
    DEFAULT_BASIS_CHOP,
    DEFAULT_COMPLETENESS_RADIUS,
    DEFAULT_FAMILY_TOL,
    LOGGER,
)
from .defect import dg_jacobian
from .errors import ConsistencyError, InvalidParameterError, NotUnitaryError
from .fourier import defect_fourier_special, fourier_matrix
from .matcore import (
    DEFAULT_POLICY,
    RealMatrix,
    TolerancePolicy,
    UnitaryMatrix,
    nullspace_basis,
    numerical_rank,
    subspace_distance,
    unitarity_residual,
)
from .numtheory import is_prime
from .pcm import pcm_from_parameters, pcm_to_solution, step_count

COMPLETENESS_MAX_SIZE = 9
CONSTRAINT_TOL = 1e-12
MODULUS_TOL = 1e-12
SUBSPACE_TOL = 1e-8

DEPHASING_LABEL = "dephasing"


class Construction(str, Enum):
    """Define the two ways of building a family basis."""

    DIRECT = "direct_constraints"
    PCM = "pcm_constrained"

    @classmethod
    def parse(cls, value: str) -> "Construction":
        """Return the construction for a short or full name."""
        aliases = {"direct": cls.DIRECT, "pcm": cls.PCM}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise InvalidParameterError(f"Unknown construction: {value}") from None


@dataclass(frozen=True, eq=False)
class ConstraintSpace:
    """Define a real linear space of phase matrices R with its constraints.

    constraints holds one linear functional over vec(R) per row; labels[i] names
    the order p^m the row comes from, or "dephasing".
    """

    p: int
    k: int
    construction: Construction
    labels: tuple[str, ...]
    constraints: RealMatrix
    basis: tuple[RealMatrix, ...]

    @property
    def N(self) -> int:
        """Return p^k."""
        return int(self.p**self.k)

    @property
    def dim(self) -> int:
        """Return the number of basis elements."""
        return len(self.basis)

    def basis_matrix(self) -> RealMatrix:
        """Return vec(R^(i)) as columns."""
        return np.array([element.reshape(-1) for element in self.basis]).T

    def combine(self, phi: npt.ArrayLike) -> RealMatrix:
        """Return sum phi_i R^(i)."""
        weights = np.asarray(phi, dtype=np.float64).reshape(-1)
        if weights.size != self.dim:
            raise InvalidParameterError(
                f"Need {self.dim} parameters, got {weights.size}"
            )
        return np.tensordot(weights, np.array(self.basis), axes=1)


@dataclass(frozen=True, eq=False)
class HadamardFamily:
    """Define the family F o EXP(i sum phi_i R^(i)) around F_{p^k}."""

    base: UnitaryMatrix
    space: ConstraintSpace

    @property
    def construction(self) -> Construction:
        """Return how the basis was built."""
        return self.space.construction

    @property
    def dim(self) -> int:
        """Return the family dimension."""
        return self.space.dim


@dataclass(frozen=True)
class FamilyVerification:
    """Define the outcome of the family checks."""

    p: int
    k: int
    dim: int
    expected_dim: int
    samples: int
    max_unitarity_residual: float
    max_modulus_error: float
    dephased: bool
    span_equal: bool

    @property
    def checks(self) -> dict[str, bool]:
        """Return pass/fail per check."""
        return {
            "dimension": self.dim == self.expected_dim,
            "unitarity": self.max_unitarity_residual <= DEFAULT_FAMILY_TOL,
            "hadamard": self.max_modulus_error <= MODULUS_TOL,
            "dephasing": self.dephased,
            "span_equality": self.span_equal,
        }

    @property
    def passed(self) -> bool:
        """Return whether every check passed."""
        return all(self.checks.values())


@dataclass(frozen=True)
class CompletenessReport:
    """Define the outcome of the linearized local completeness check."""

    p: int
    k: int
    kernel_dim: int
    expected_dim: int
    subspace_distance: float
    trials: int
    radius: float
    min_residual: float
    escaped: int

    @property
    def passed(self) -> bool:
        """Return whether the kernel matches the family and no sample escaped."""
        return (
            self.kernel_dim == self.expected_dim
            and self.subspace_distance <= SUBSPACE_TOL
            and self.escaped == 0
        )


def _require_prime_power(p: int, k: int) -> int:
    """Return p^k after validating p prime and k >= 2."""
    if not is_prime(p):
        raise InvalidParameterError(f"p must be prime, got {p}")
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise InvalidParameterError(f"k must be an integer >= 2, got {k}")
    return int(p**k)


def family_dimension(p: int, k: int) -> int:
    """Return d(F_{p^k}) = p^{k-1}((k-1)p - k) + 1."""
    _require_prime_power(p, k)
    return p ** (k - 1) * ((k - 1) * p - k) + 1


def _unit_row(size: int, entries: Sequence[tuple[int, int, float]]) -> RealMatrix:
    """Return a functional over vec(R) from 1-based (row, col, coefficient) terms."""
    row = np.zeros(size * size)
    for i, l, coefficient in entries:
        row[(i - 1) * size + (l - 1)] += coefficient
    return row


def dephasing_rows(size: int) -> RealMatrix:
    """Return the 2N - 1 functionals pinning the first column and first row."""
    rows = [_unit_row(size, [(i, 1, 1.0)]) for i in range(1, size + 1)]
    rows += [_unit_row(size, [(1, l, 1.0)]) for l in range(2, size + 1)]
    return np.array(rows)


def order_constraint_rows(p: int, k: int, m: int) -> RealMatrix:
    """Return the constraints of order p^m as functionals over vec(R).

    Each row states Delta^{i,i+p^m}_l - Delta^{i,i+p^m}_{l+q t} = 0 with
    t = p^{k-m-1}, q = 1..p-1, l = 1..t and i running over the stated cycles.
    """
    size = _require_prime_power(p, k)
    if not 0 <= m < k:
        raise InvalidParameterError(f"Order exponent m must lie in 0..{k - 1}")
    shift = p**m
    period = p ** (k - m - 1)
    starts = sorted(
        r + s * shift for r in range(1, shift + 1) for s in range(p ** (k - m) - 1)
    )

    rows = []
    for i in starts:
        j = i + shift
        for l in range(1, period + 1):
            for q in range(1, p):
                other = l + q * period
                rows.append(
                    _unit_row(
                        size,
                        [(i, l, 1.0), (j, l, -1.0), (i, other, -1.0), (j, other, 1.0)],
                    )
                )
    return np.array(rows).reshape(-1, size * size)


def constraint_count(p: int, k: int) -> dict[str, int]:
    """Return the number of equations per order along with their total."""
    size = _require_prime_power(p, k)
    counts = {
        f"order_{p}^{m}": p ** (k - m - 1) * (p - 1) * p**m * (p ** (k - m) - 1)
        for m in range(k)
    }
    counts["total"] = sum(counts.values())
    counts[DEPHASING_LABEL] = 2 * size - 1
    return counts


def _chop(matrix: RealMatrix) -> RealMatrix:
    """Round entries below the basis threshold to exact zeros."""
    chopped = np.array(matrix, dtype=np.float64)
    chopped[np.abs(chopped) < DEFAULT_BASIS_CHOP] = 0.0
    return chopped


def _validated_space(
    p: int,
    k: int,
    construction: Construction,
    labels: Sequence[str],
    constraints: RealMatrix,
    basis: Sequence[RealMatrix],
    policy: TolerancePolicy,
) -> ConstraintSpace:
    """Check a basis against its constraints and the closed-form dimension."""
    expected = family_dimension(p, k)
    if len(basis) != expected:
        raise ConsistencyError(
            f"{construction.value} space for p={p}, k={k} has dimension "
            f"{len(basis)}, expected {expected}"
        )
    stacked = np.array([element.reshape(-1) for element in basis])
    if numerical_rank(stacked, policy).rank != expected:
        raise ConsistencyError(f"{construction.value} basis is linearly dependent")
    violation = float(np.max(np.abs(constraints @ stacked.T), initial=0.0))
    if violation > CONSTRAINT_TOL:
        raise ConsistencyError(f"Basis violates its constraints by {violation:.3e}")

    LOGGER.debug("Built %s space for p=%s, k=%s: dim %s", construction, p, k, expected)
    return ConstraintSpace(
        p, k, construction, tuple(labels), constraints, tuple(basis)
    )


def constraint_space_direct(
    p: int, k: int, policy: TolerancePolicy = DEFAULT_POLICY
) -> ConstraintSpace:
    """Return the space cut out by the order-p^m and dephasing constraints."""
    size = _require_prime_power(p, k)
    blocks = []
    labels: list[str] = []
    for m in range(k):
        rows = order_constraint_rows(p, k, m)
        blocks.append(rows)
        labels += [f"order_{p}^{m}"] * rows.shape[0]
    blocks.append(dephasing_rows(size))
    labels += [DEPHASING_LABEL] * (2 * size - 1)
    constraints = np.vstack(blocks)

    kernel = nullspace_basis(constraints, policy)
    basis = [_chop(column.reshape(size, size)) for column in kernel.T]
    return _validated_space(
        p, k, Construction.DIRECT, labels, constraints, basis, policy
    )


def _dephased_pcm_solution(
    size: int, step_blocks: list[list[complex]], central: list[float]
) -> RealMatrix:
    """Return P F for the PCM whose first column cancels its row sums."""
    draft = pcm_from_parameters(size, [0.0] * size, step_blocks, central)
    first_column = -draft.materialized[:, 1:].sum(axis=1).real
    pcm = pcm_from_parameters(size, first_column, step_blocks, central)
    return _chop(pcm_to_solution(pcm))


def constraint_space_pcm(
    p: int, k: int, policy: TolerancePolicy = DEFAULT_POLICY
) -> ConstraintSpace:
    """Return the space of P F_{p^k} over PCMs with vanishing first row and row sums.

    Cycle 0 of every step (and of the central column when p = 2) is zero, and the
    first column is minus the sum of the remaining columns.
    """
    size = _require_prime_power(p, k)
    steps = step_count(size)
    half = size // 2 if p == 2 else 0

    def empty() -> tuple[list[list[complex]], list[float]]:
        blocks = [[0j] * math.gcd(size, step) for step in range(1, steps + 1)]
        return blocks, [0.0] * half

    basis = []
    for step in range(1, steps + 1):
        for cycle in range(1, math.gcd(size, step)):
            for unit in (1.0 + 0j, 1j):
                blocks, central = empty()
                blocks[step - 1][cycle] = unit
                basis.append(_dephased_pcm_solution(size, blocks, central))
    for cycle in range(1, half):
        blocks, central = empty()
        central[cycle] = 1.0
        basis.append(_dephased_pcm_solution(size, blocks, central))

    constraints = dephasing_rows(size)
    labels = [DEPHASING_LABEL] * constraints.shape[0]
    return _validated_space(p, k, Construction.PCM, labels, constraints, basis, policy)


def hadamard_family(
    p: int,
    k: int,
    construction: Construction | str = Construction.DIRECT,
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> HadamardFamily:
    """Return the family around F_{p^k} for the chosen construction."""
    if isinstance(construction, str):
        construction = Construction.parse(construction)
    if construction is Construction.DIRECT:
        space = constraint_space_direct(p, k, policy)
    else:
        space = constraint_space_pcm(p, k, policy)
    return HadamardFamily(fourier_matrix(space.N), space)


def family_member(family: HadamardFamily, phi: npt.ArrayLike) -> UnitaryMatrix:
    """Return F_{p^k} o EXP(i sum phi_i R^(i))."""
    phases = family.space.combine(phi)
    try:
        return UnitaryMatrix.from_array(
            family.base.matrix * np.exp(1j * phases), tol=DEFAULT_FAMILY_TOL
        )
    except NotUnitaryError as err:
        raise ConsistencyError(f"Family member is not unitary: {err}") from err


def sample_members(
    family: HadamardFamily, count: int, seed: int | None = None
) -> list[tuple[RealMatrix, UnitaryMatrix]]:
    """Return (phi, member) pairs for phi uniform in [0, 2 pi)^d."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(count):
        phi = rng.uniform(0, 2 * np.pi, family.dim)
        samples.append((phi, family_member(family, phi)))
    return samples


def spans_equal(
    first: ConstraintSpace,
    second: ConstraintSpace,
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> bool:
    """Return whether both bases span the same space."""
    if first.dim != second.dim or first.N != second.N:
        return False
    joined = np.hstack((first.basis_matrix(), second.basis_matrix()))
    return numerical_rank(joined, policy).rank == first.dim


def verify_family(
    family: HadamardFamily,
    *,
    samples: int = 20,
    seed: int | None = 0,
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> FamilyVerification:
    """Return unitarity, modulus, dephasing and span-equality checks."""
    space = family.space
    base = family.base.matrix
    modulus = 1 / math.sqrt(space.N)

    residuals, modulus_errors, dephased = [0.0], [0.0], True
    for _, member in sample_members(family, samples, seed):
        residuals.append(member.unitarity_residual)
        modulus_errors.append(float(np.max(np.abs(np.abs(member.matrix) - modulus))))
        dephased &= bool(
            np.array_equal(member.matrix[0], base[0])
            and np.array_equal(member.matrix[:, 0], base[:, 0])
        )

    if family.construction is Construction.DIRECT:
        other = constraint_space_pcm(space.p, space.k, policy)
    else:
        other = constraint_space_direct(space.p, space.k, policy)

    verification = FamilyVerification(
        p=space.p,
        k=space.k,
        dim=space.dim,
        expected_dim=defect_fourier_special("p_pow_k", (space.p, space.k)),
        samples=samples,
        max_unitarity_residual=max(residuals),
        max_modulus_error=max(modulus_errors),
        dephased=dephased,
        span_equal=spans_equal(space, other, policy),
    )
    LOGGER.debug("Family verification: %s", verification)
    return verification


def family_metadata(family: HadamardFamily) -> dict[str, Any]:
    """Return the JSON metadata of a family."""
    return {
        "p": family.space.p,
        "k": family.space.k,
        "dim": family.dim,
        "construction": family.construction.value,
    }


def explicit_P8(a: float, b: float, c: float, d: float, e: float) -> npt.NDArray:
    """Return the 8 x 8 constrained PCM with parameters a..e."""
    u, v = complex(a, b), complex(a, -b)
    pattern = [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [-(2 * a + c), 0, u, 0, c, 0, v, 0],
        [-d, 0, 0, 0, d, 0, 0, 0],
        [-(2 * a + e), 0, u, 0, e, 0, v, 0],
    ]
    return np.array(pattern * 2, dtype=np.complex128)


def explicit_R8(a: float, b: float, c: float, d: float, e: float) -> RealMatrix:
    """Return the 8 x 8 phase matrix with parameters a..e."""
    block = [
        [0, 0, 0, 0],
        [0, a, b, c],
        [0, d, 0, d],
        [0, e, b, c - a + e],
    ]
    return np.tile(np.array(block, dtype=np.float64), (2, 2))


def explicit_P9(a: float, b: float, c: float, d: float) -> npt.NDArray:
    """Return the 9 x 9 constrained PCM with parameters a..d."""
    pattern = []
    for x, y in ((0.0, 0.0), (a, b), (c, d)):
        row = [0j] * 9
        row[0] = -2 * x
        row[3], row[6] = complex(x, y), complex(x, -y)
        pattern.append(row)
    return np.array(pattern * 3, dtype=np.complex128)


def explicit_R9(a: float, b: float, c: float, d: float) -> RealMatrix:
    """Return the 9 x 9 phase matrix with parameters a..d."""
    block = [[0, 0, 0], [0, a, b], [0, c, d]]
    return np.tile(np.array(block, dtype=np.float64), (3, 3))


def r8_parameters_from_p8(
    a: float, b: float, c: float, d: float, e: float
) -> tuple[float, ...]:
    """Return the R_8 parameters with R_8(...) == P_8(a, ..., e) F_8."""
    scale = math.sqrt(8)
    return (
        -(2 * a + 2 * b + 2 * c) / scale,
        -4 * a / scale,
        (-2 * a + 2 * b - 2 * c) / scale,
        -2 * d / scale,
        -(2 * a + 2 * b + 2 * e) / scale,
    )


def r9_parameters_from_p9(a: float, b: float, c: float, d: float) -> tuple[float, ...]:
    """Return the R_9 parameters with R_9(...) == P_9(a, ..., d) F_9."""
    root = math.sqrt(3)
    return (
        (-3 * a - root * b) / 3,
        (-3 * a + root * b) / 3,
        (-3 * c - root * d) / 3,
        (-3 * c + root * d) / 3,
    )


def delta_groups(p: int, k: int, n: int) -> list[list[int]]:
    """Return the 1-based column groups g_1..g_p whose differences must agree.

    For gcd(n, p^k) = p^m the groups are l + t p^{k-m-1} + r p^{k-m} for
    t = 0..p-1, over l = 1..p^{k-m-1} and r = 0..p^m - 1.
    """
    size = _require_prime_power(p, k)
    if not 1 <= n < size:
        raise InvalidParameterError(f"Row distance must lie in 1..{size - 1}")
    m = 0
    while n % p ** (m + 1) == 0:
        m += 1
    period = p ** (k - m - 1)
    return [
        [l + t * period + r * p ** (k - m) for t in range(p)]
        for r in range(p**m)
        for l in range(1, period + 1)
    ]


def delta_deviation(phases: RealMatrix, p: int, k: int, i: int, j: int) -> float:
    """Return the largest spread of Delta^{i,j} within any group."""
    differences = phases[i - 1] - phases[j - 1]
    return max(
        float(np.ptp(differences[[g - 1 for g in group]]))
        for group in delta_groups(p, k, abs(j - i))
    )


def check_delta_equalities(
    phases: RealMatrix, p: int, k: int, i: int, j: int, tol: float = CONSTRAINT_TOL
) -> bool:
    """Return whether Delta^{i,j} is constant on every group."""
    return delta_deviation(phases, p, k, i, j) <= tol


def dephased_unitarity_jacobian(p: int, k: int) -> RealMatrix:
    """Return Dh: the differential of g at F_{p^k} stacked with the pinning rows."""
    size = _require_prime_power(p, k)
    return np.vstack((dg_jacobian(fourier_matrix(size)), dephasing_rows(size)))


def local_completeness_check(
    p: int,
    k: int,
    trials: int = 20,
    radius: float = DEFAULT_COMPLETENESS_RADIUS,
    *,
    seed: int | None = 0,
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> CompletenessReport:
    """Return the linearized completeness evidence for the family around F_{p^k}.

    The kernel of Dh must be the family tangent space; random dephased directions
    orthogonal to the family, scaled to the radius, must break unitarity. The
    sampling part is evidence, not proof.
    """
    size = _require_prime_power(p, k)
    if size > COMPLETENESS_MAX_SIZE:
        raise InvalidParameterError(
            f"Completeness check limited to p^k <= {COMPLETENESS_MAX_SIZE}"
        )
    if radius <= 0:
        raise InvalidParameterError(f"Radius must be positive, got {radius}")

    kernel = nullspace_basis(dephased_unitarity_jacobian(p, k), policy)
    space = constraint_space_direct(p, k, policy)
    family_basis = space.basis_matrix()
    distance = subspace_distance(kernel, family_basis)

    orthonormal = linalg.orth(family_basis)
    base = fourier_matrix(size).matrix
    rng = np.random.default_rng(seed)
    residuals = []
    for _ in range(trials):
        direction = rng.standard_normal((size, size))
        direction[0, :] = 0
        direction[:, 0] = 0
        vector = direction.reshape(-1)
        vector -= orthonormal @ (orthonormal.T @ vector)
        vector *= radius / np.linalg.norm(vector)
        candidate = base * np.exp(1j * vector.reshape(size, size))
        residuals.append(unitarity_residual(candidate))

    escaped = sum(residual <= 10 * DEFAULT_FAMILY_TOL for residual in residuals)
    report = CompletenessReport(
        p=p,
        k=k,
        kernel_dim=kernel.shape[1],
        expected_dim=space.dim,
        subspace_distance=distance,
        trials=trials,
        radius=radius,
        min_residual=min(residuals, default=math.inf),
        escaped=escaped,
    )
    LOGGER.debug("Local completeness: %s", report)
    return report
