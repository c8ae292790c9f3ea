"""Define tests for the defect characterizations."""
import logging

import numpy as np
import pytest

from unidefect.defect import (
    DefectMethod,
    EquivalenceTransform,
    all_defect_reports,
    apply_equivalence,
    bound_b,
    build_B_stack,
    build_Bij,
    build_M,
    build_Df,
    build_Mc,
    build_W,
    commutator_expansion,
    defect_report,
    defect_via_B_span,
    defect_via_Dg,
    defect_via_M,
    defect_via_tangent_image,
    defect_via_W,
    dephase,
    dg_jacobian,
    direct_sum,
    elimination_defect,
    first_row_column_pattern,
    is_dephased,
    is_valid_pattern_set,
    kernel_solutions,
    spanning_dimension,
    spanning_set,
    tangent_basis,
    unitarity_residual_g,
    zero_count,
)
from unidefect.const import DEFAULT_FD_STEP
from unidefect.errors import InvalidParameterError
from unidefect.fourier import fourier_matrix
from unidefect.matcore import (
    TolerancePolicy,
    UnitaryMatrix,
    nullspace_basis,
    random_orthogonal,
    random_unitary,
    subspace_distance,
    vec_forms,
)


def _random_blocks(seed):
    """Return up to three random unitary blocks with sizes summing to at most 10."""
    rng = np.random.default_rng(seed)
    count = int(rng.integers(2, 4))
    sizes = [int(size) for size in rng.integers(1, 4, size=count)]
    return [random_unitary(size, seed + index) for index, size in enumerate(sizes)]


def test_all_methods_on_fourier(fourier_defects):
    """Test that every characterization reproduces d(F_N)."""
    for size in range(2, 13):
        reports = all_defect_reports(fourier_matrix(size))
        assert {report.defect for report in reports.values()} == {
            fourier_defects[size - 1]
        }
        assert not any(report.uncertain for report in reports.values())


@pytest.mark.parametrize("seed", range(20))
def test_all_methods_on_random_unitaries(seed):
    """Test that every characterization agrees on random unitaries with N <= 7."""
    unitary = random_unitary(2 + seed % 6, seed=1000 + seed)
    reports = all_defect_reports(unitary)
    assert len({report.defect for report in reports.values()}) == 1
    assert not any(report.uncertain for report in reports.values())


def test_bound_b(fourier_4):
    """Test b(U) for matrices with and without zeros."""
    assert bound_b(fourier_4) == defect_via_M(fourier_4).defect

    report = defect_via_M(UnitaryMatrix.from_array(np.eye(3)))
    assert report.defect == 4
    assert report.zero_count == 6
    assert report.spanning_dim == 3
    assert report.bound_b == 0


def test_build_mc():
    """Test M_C and M for F_2."""
    m_c = build_Mc(fourier_matrix(2))
    assert m_c.shape == (4, 1)
    assert np.allclose(m_c[:, 0], [0.5, -0.5, -0.5, 0.5])

    m_matrix = build_M(fourier_matrix(2))
    assert m_matrix.shape == (4, 2)
    assert np.allclose(m_matrix[:, 1], 0)

    with pytest.raises(InvalidParameterError):
        build_Mc(UnitaryMatrix.from_array([[1]]))


def test_build_mc_column_norms():
    """Test that every M_C column of a Hadamard matrix has squared norm 2/N."""
    m_c = build_Mc(fourier_matrix(6))
    assert m_c.shape == (36, 15)
    assert np.allclose(np.sum(np.abs(m_c) ** 2, axis=0), 2 / 6)
    assert np.allclose(m_c.sum(axis=0), 0)


def test_commutator_expansion():
    """Test that the commutator expands over the B^(i,j) matrices."""
    rng = np.random.default_rng(5)
    unitary = random_unitary(4, seed=5)
    commutator, expansion = commutator_expansion(
        unitary, rng.standard_normal(4), rng.standard_normal(4)
    )
    assert np.allclose(commutator, expansion, atol=1e-12)

    block = build_Bij(unitary, 2, 2)
    assert block[1, 1] == 0
    assert np.allclose(block, -block.conj().T)
    assert build_B_stack(unitary).shape == (16, 16)


def test_method_dispatch(fourier_4):
    """Test the named method dispatcher."""
    assert defect_report(fourier_4, "W").method is DefectMethod.W_NULLSPACE
    assert defect_report(fourier_4, "Df").method is DefectMethod.DF_IMAGE

    with pytest.raises(InvalidParameterError):
        defect_report(fourier_4, "X")


def test_dephase():
    """Test that dephasing yields a real nonnegative first row and column."""
    unitary = random_unitary(5, seed=11)
    dephased, _, col_phases = dephase(unitary)
    matrix = dephased.matrix
    assert col_phases[0] == 0
    assert np.allclose(matrix[:, 0].imag, 0, atol=1e-14)
    assert np.allclose(matrix[0].imag, 0, atol=1e-14)
    assert np.all(matrix[:, 0].real > 0)
    assert np.allclose(np.abs(matrix), np.abs(unitary.matrix))

    with pytest.raises(InvalidParameterError):
        dephase(UnitaryMatrix.from_array(np.eye(2)))


def test_direct_sum_of_fourier_matrices():
    """Test d(F_2 + F_2) against the block formula."""
    assert defect_via_M(direct_sum(fourier_matrix(2), fourier_matrix(2))).defect == 7


@pytest.mark.parametrize("seed", range(20))
def test_direct_sum_identities(seed):
    """Test the defect formula and b additivity of block diagonal matrices."""
    blocks = _random_blocks(10 * seed)
    assembled = direct_sum(*blocks)
    size = assembled.size
    defects = [defect_via_M(block).defect for block in blocks]

    expected = (size - 1) ** 2 - sum((b.size - 1) ** 2 for b in blocks) + sum(defects)
    assert defect_via_M(assembled).defect == expected
    assert expected > sum(defects)
    assert bound_b(assembled) == sum(bound_b(block) for block in blocks)


def test_elimination_oracle():
    """Test the Gaussian elimination oracle on small matrices."""
    for unitary in (fourier_matrix(2), fourier_matrix(3), random_unitary(3, seed=2)):
        assert elimination_defect(unitary) == defect_via_M(unitary).defect
    assert elimination_defect(UnitaryMatrix.from_array([[1j]])) == 0


@pytest.mark.parametrize("seed", range(100))
def test_equivalence_invariance(seed):
    """Test invariance under equivalence, transpose, conjugation and adjoint."""
    size = 2 + seed % 6
    unitary = random_unitary(size, seed=seed)
    defect = defect_via_M(unitary).defect
    transform = EquivalenceTransform.random(size, seed=seed + 100)
    assert defect_via_M(apply_equivalence(unitary, transform)).defect == defect
    for variant in (unitary.transpose(), unitary.conj(), unitary.adjoint()):
        assert defect_via_M(variant).defect == defect

    fourier = apply_equivalence(fourier_matrix(6), EquivalenceTransform.random(6, seed))
    assert defect_via_M(fourier).defect == 4


def test_equivalence_transform_validation(fourier_4):
    """Test malformed transforms."""
    assert np.array_equal(
        apply_equivalence(fourier_4, EquivalenceTransform.identity(4)).matrix,
        fourier_4.matrix,
    )
    with pytest.raises(InvalidParameterError):
        EquivalenceTransform((1, 1), (1, 2), (0.0, 0.0), (0.0, 0.0))
    with pytest.raises(InvalidParameterError):
        EquivalenceTransform((1, 2), (1, 2), (0.0,), (0.0, 0.0))
    with pytest.raises(InvalidParameterError):
        apply_equivalence(fourier_4, EquivalenceTransform.identity(3))


@pytest.mark.parametrize("size", [2, 3, 4, 5, 6])
def test_gradient_check(size):
    """Test the analytic differential of g against central differences."""
    step = DEFAULT_FD_STEP
    for trial in range(10):
        unitary = random_unitary(size, seed=100 * size + trial)
        jacobian = dg_jacobian(unitary)
        numeric = np.zeros_like(jacobian)
        for position in range(size * size):
            direction = np.zeros(size * size)
            direction[position] = step
            forward = unitarity_residual_g(unitary, direction.reshape(size, size))
            backward = unitarity_residual_g(unitary, -direction.reshape(size, size))
            numeric[:, position] = (forward - backward) / (2 * step)
        assert np.max(np.abs(jacobian - numeric)) <= 1e-6


def test_isolated_matrices(s6):
    """Test that S_6 and F_5 have zero defect and are flagged isolated."""
    reports = all_defect_reports(s6)
    assert all(report.defect == 0 and report.isolated for report in reports.values())
    assert defect_via_M(fourier_matrix(5)).isolated


def test_kernel_solutions(fourier_4):
    """Test that kernel solutions make (iR o U)U* anti-Hermitian."""
    solutions = kernel_solutions(fourier_4)
    assert len(solutions) == 1 + 2 * 4 - 1
    for solution in solutions:
        product = (1j * solution * fourier_4.matrix) @ fourier_4.matrix.conj().T
        assert np.allclose(product, -product.conj().T, atol=1e-12)

    assert np.array_equal(
        kernel_solutions(UnitaryMatrix.from_array([[1]]))[0], np.ones((1, 1))
    )


def test_transpose_invariance(fourier_4):
    """Test invariance under transpose, conjugation and adjoint."""
    for unitary in (fourier_4, random_unitary(5, seed=4), fourier_matrix(6)):
        defect = defect_via_M(unitary).defect
        for variant in (unitary.transpose(), unitary.conj(), unitary.adjoint()):
            assert defect_via_M(variant).defect == defect


def test_one_by_one():
    """Test that 1 x 1 matrices have zero defect by every method."""
    unitary = UnitaryMatrix.from_array([[1j]])
    for method in (
        defect_via_B_span,
        defect_via_Dg,
        defect_via_M,
        defect_via_tangent_image,
        defect_via_W,
    ):
        report = method(unitary)
        assert report.defect == 0
        assert report.rank_result is None


@pytest.mark.parametrize("size", [3, 4, 5, 6, 7, 8])
def test_orthogonal_lower_bound(size):
    """Test d(Q) >= (N-1)(N-2)/2 for real orthogonal matrices."""
    for seed in range(20):
        orthogonal = random_orthogonal(size, seed=seed)
        assert np.allclose(build_M(orthogonal)[:, size * (size - 1) // 2 :], 0)
        assert defect_via_W(orthogonal).defect >= (size - 1) * (size - 2) // 2


def test_pattern_sets(fourier_4):
    """Test spanning sets and pattern sets."""
    rows, cols = spanning_set(fourier_4)
    assert rows == (1, 2, 3, 4)
    assert cols == (2, 3, 4)
    assert spanning_dimension(fourier_4) == 7
    assert is_valid_pattern_set(fourier_4, rows, cols, first_row_column_pattern(4))

    identity = UnitaryMatrix.from_array(np.eye(3))
    rows, cols = spanning_set(identity)
    assert rows == (1, 2, 3)
    assert cols == ()
    assert not is_valid_pattern_set(identity, rows, cols, [(1, 2), (2, 2), (3, 3)])
    assert is_valid_pattern_set(identity, rows, cols, [(1, 1), (2, 2), (3, 3)])

    assert is_dephased(fourier_4, fourier_4, first_row_column_pattern(4))
    shifted = UnitaryMatrix.from_array(fourier_4.matrix * 1j)
    assert not is_dephased(shifted, fourier_4, first_row_column_pattern(4))


def test_phasing_tangents_solve_kernel(fourier_4):
    """Test that one-row and one-column patterns lie in the kernel of M^T."""
    m_matrix = build_M(fourier_4)
    for index in range(4):
        row_pattern = np.zeros((4, 4))
        row_pattern[index] = 1
        assert np.allclose(m_matrix.T @ row_pattern.reshape(-1), 0, atol=1e-12)
        assert np.allclose(m_matrix.T @ row_pattern.T.reshape(-1), 0, atol=1e-12)


def test_report_as_dict():
    """Test the JSON form of a report."""
    data = defect_via_M(UnitaryMatrix.from_array(np.eye(3))).as_dict()
    assert data == {
        "N": 3,
        "defect": 4,
        "method": "M_rank",
        "rank": 0,
        "gap_ratio": None,
        "isolated": False,
        "spanning_dim": 3,
        "zero_count": 6,
        "bound_b": 0,
        "uncertain": False,
    }


def test_unitarity_residual_g():
    """Test g at zero, along phasings and at a random point."""
    fourier = fourier_matrix(3)
    assert np.allclose(unitarity_residual_g(fourier, np.zeros((3, 3))), 0, atol=1e-14)

    phasing = np.zeros((3, 3))
    phasing[1] = 0.7
    assert np.allclose(unitarity_residual_g(fourier, phasing), 0, atol=1e-14)

    rng = np.random.default_rng(0)
    residual = unitarity_residual_g(fourier, rng.standard_normal((3, 3)))
    assert np.linalg.norm(residual) > 0


def test_tangent_image():
    """Test the unitary tangent basis and the moduli Jacobian."""
    fourier = fourier_matrix(3)
    basis = tangent_basis(fourier)
    assert basis.shape == (18, 9)
    assert build_Df(fourier).shape == (9, 18)
    assert build_W(fourier).shape == (9, 6)

    phasing = np.diag([2j, 0, 0]) @ fourier.matrix
    assert np.allclose(build_Df(fourier) @ vec_forms(phasing)[1], 0, atol=1e-14)
    assert np.linalg.matrix_rank(build_Df(fourier) @ basis) == 4
    assert zero_count(UnitaryMatrix.from_array(np.eye(3))) == 6


def test_dg_kernel_matches_m_transpose(fourier_4):
    """Test that Dg equals M^T, so both have the same kernel."""
    for unitary in (fourier_4, fourier_matrix(6), random_unitary(5, seed=8)):
        jacobian = dg_jacobian(unitary)
        m_transpose = build_M(unitary).T
        assert np.allclose(jacobian, m_transpose, atol=1e-14)

        kernel = nullspace_basis(jacobian)
        assert kernel.shape == nullspace_basis(m_transpose).shape
        assert subspace_distance(kernel, nullspace_basis(m_transpose)) <= 1e-8


def test_uncertain_report(caplog):
    """Test the candidates carried by a report whose gap is below the warning ratio."""
    caplog.set_level(logging.WARNING)
    policy = TolerancePolicy(gap_warning=1e20)
    report = defect_via_M(fourier_matrix(6), policy)
    assert report.defect == 4
    assert report.uncertain
    assert report.candidate_defects == (4, 3)
    assert report.as_dict()["candidate_defects"] == [4, 3]
    assert any("is uncertain" in record.message for record in caplog.records)

    certain = defect_via_M(fourier_matrix(6))
    assert not certain.uncertain
    assert certain.candidate_defects == ()
    assert "candidate_defects" not in certain.as_dict()
