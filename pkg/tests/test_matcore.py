"""Define tests for the matrix primitives."""
import logging
import math

from hypothesis import given, seed, settings
from hypothesis import strategies as st
import numpy as np
import pytest

from unidefect.errors import InvalidParameterError, NotUnitaryError
from unidefect.matcore import (
    TolerancePolicy,
    UnitaryMatrix,
    alpha_index,
    alpha_pairs,
    elimination_rank,
    is_bistochastic,
    mod1,
    nullspace_basis,
    numerical_rank,
    phasing_tangents,
    random_orthogonal,
    random_unitary,
    subspace_distance,
    unitarity_residual,
    unvec_c,
    unvec_r,
    vec_forms,
)


def test_alpha_index():
    """Test the lexicographic numbering of index pairs."""
    assert alpha_index(1, 2, 4) == 1
    assert alpha_index(2, 3, 4) == 4
    assert alpha_index(3, 4, 4) == 6
    for position, (i, j) in enumerate(alpha_pairs(5), start=1):
        assert alpha_index(i, j, 5) == position

    with pytest.raises(InvalidParameterError):
        alpha_index(2, 2, 4)


def test_mod1():
    """Test the representatives 1..v of the modulo operation."""
    assert mod1(4, 4) == 4
    assert mod1(5, 4) == 1
    assert mod1(0, 4) == 4
    assert [mod1(value, 3) for value in range(1, 7)] == [1, 2, 3, 1, 2, 3]


def test_nullspace_basis():
    """Test kernel bases, including the degenerate inputs."""
    matrix = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    basis = nullspace_basis(matrix)
    assert basis.shape == (3, 1)
    assert np.allclose(matrix @ basis, 0, atol=1e-14)

    assert np.array_equal(nullspace_basis(np.zeros((2, 3))), np.eye(3))
    assert np.array_equal(nullspace_basis(np.zeros((0, 2))), np.eye(2))


def test_numerical_rank_clear_gap():
    """Test a rank decision with a wide singular value gap."""
    result = numerical_rank(np.diag([1.0, 1e-3, 0.0]))
    assert result.rank == 2
    assert math.isinf(result.gap_ratio)
    assert not result.uncertain

    result = numerical_rank(np.diag([1.0, 1e-13]))
    assert result.rank == 1
    assert result.gap_ratio == pytest.approx(1e13)


def test_numerical_rank_empty():
    """Test that an empty matrix has rank zero."""
    result = numerical_rank(np.zeros((0, 3)))
    assert result.rank == 0
    assert not result.uncertain


def test_numerical_rank_uncertain(caplog):
    """Test that a narrow gap is flagged and logged."""
    caplog.set_level(logging.WARNING)
    result = numerical_rank(np.diag([1.0, 1e-10, 1e-12]))
    assert result.rank == 2
    assert result.gap_ratio == pytest.approx(100)
    assert result.uncertain
    assert result.candidate_ranks() == (2, 1)
    assert any("Small singular value gap" in r.message for r in caplog.records)


@seed(7)
@settings(max_examples=25, deadline=None)
@given(
    rank=st.integers(min_value=0, max_value=4),
    shape=st.tuples(st.integers(4, 7), st.integers(4, 7)),
    draw=st.integers(min_value=0, max_value=2**31),
)
def test_rank_engines_agree(rank, shape, draw):
    """Test that the SVD and elimination ranks agree on random low-rank inputs."""
    rng = np.random.default_rng(draw)
    matrix = rng.standard_normal((shape[0], rank)) @ rng.standard_normal(
        (rank, shape[1])
    )
    assert numerical_rank(matrix).rank == rank
    assert elimination_rank(matrix) == rank


def test_phasing_tangents(fourier_4):
    """Test that the phasing tangents of F_4 span 2N - 1 dimensions."""
    tangents = phasing_tangents(fourier_4)
    assert tangents.shape == (8, 32)
    assert numerical_rank(tangents).rank == 7


def test_random_matrices():
    """Test the random unitary and orthogonal generators."""
    unitary = random_unitary(5, seed=3)
    assert unitary.unitarity_residual < 1e-12
    assert np.array_equal(unitary.matrix, random_unitary(5, seed=3).matrix)
    assert is_bistochastic(np.abs(unitary.matrix) ** 2)

    orthogonal = random_orthogonal(4, seed=3)
    assert np.all(orthogonal.matrix.imag == 0)
    assert unitarity_residual(orthogonal.matrix) < 1e-12

    with pytest.raises(InvalidParameterError):
        random_unitary(0)


def test_subspace_distance():
    """Test principal angles between equal and orthogonal spans."""
    first = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    second = np.array([[1.0, 1.0], [1.0, -1.0], [0.0, 0.0]])
    assert subspace_distance(first, second) == pytest.approx(0, abs=1e-12)

    third = np.array([[0.0], [0.0], [1.0]])
    assert subspace_distance(first[:, :1], third) == pytest.approx(math.pi / 2)


def test_unitary_matrix_validation():
    """Test the checks done when wrapping a unitary matrix."""
    with pytest.raises(InvalidParameterError):
        UnitaryMatrix.from_array(np.ones((2, 3)))
    with pytest.raises(NotUnitaryError):
        UnitaryMatrix.from_array([[1, 1], [0, 1]])

    unitary = UnitaryMatrix.from_array(np.eye(3))
    assert unitary.size == 3
    assert unitary.zero_count() == 6
    with pytest.raises(ValueError):
        unitary.matrix[0, 0] = 2

    adjoint = random_unitary(4, seed=1).adjoint()
    assert adjoint.unitarity_residual < 1e-12


def test_vec_forms():
    """Test the row-by-row vector forms and their inverses."""
    matrix = np.array([[1 + 2j, 3], [4j, -5]])
    vec_c, vec_r = vec_forms(matrix)
    assert vec_c.tolist() == [1 + 2j, 3, 4j, -5]
    assert vec_r.tolist() == [1, 3, 0, -5, 2, 0, 4, 0]
    assert np.array_equal(unvec_c(vec_c, (2, 2)), matrix)
    assert np.array_equal(unvec_r(vec_r, (2, 2)), matrix)

    with pytest.raises(InvalidParameterError):
        unvec_r(vec_r, (3, 3))


def _low_rank(rng, rows, cols, rank):
    """Return a random complex matrix of the given rank."""
    left = rng.standard_normal((rows, rank)) + 1j * rng.standard_normal((rows, rank))
    right = rng.standard_normal((rank, cols)) + 1j * rng.standard_normal((rank, cols))
    return left @ right


@seed(11)
@settings(max_examples=30, deadline=None)
@given(
    rows=st.integers(min_value=1, max_value=40),
    cols=st.integers(min_value=1, max_value=40),
    rank=st.integers(min_value=0, max_value=40),
    draw=st.integers(min_value=0, max_value=2**31),
)
def test_rank_nullity(rows, cols, rank, draw):
    """Test that rank plus nullity equals the column count."""
    rank = min(rank, rows, cols)
    matrix = _low_rank(np.random.default_rng(draw), rows, cols, rank)
    result = numerical_rank(matrix)
    assert result.rank == rank
    assert result.rank + nullspace_basis(matrix).shape[1] == cols


@seed(13)
@settings(max_examples=20, deadline=None)
@given(
    size=st.integers(min_value=2, max_value=12),
    rank=st.integers(min_value=0, max_value=12),
    draw=st.integers(min_value=0, max_value=2**31),
)
def test_rank_invariance(size, rank, draw):
    """Test that permutations and unitary factors leave the rank unchanged."""
    rank = min(rank, size)
    rng = np.random.default_rng(draw)
    matrix = _low_rank(rng, size, size, rank)
    expected = numerical_rank(matrix).rank

    permuted = matrix[rng.permutation(size)][:, rng.permutation(size)]
    assert numerical_rank(permuted).rank == expected

    left = random_unitary(size, seed=draw).matrix
    right = random_unitary(size, seed=draw + 1).matrix
    assert numerical_rank(left @ matrix @ right).rank == expected
