"""Tests for structured Kronecker-product operators and moment helpers.

Every KronOp code path is checked against the equivalent dense
computation, which serves as the independent reference throughout.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, random_hermitian, random_state_vector
from qflows import linalg
from qflows.tensorops import (
    KronOp,
    apply_op,
    comm_expectation,
    covariance_sym,
    expect,
    pair_moment,
    variance,
)


def _random_kron_op(rng, d_s: int, d_e: int, n_terms: int = 3) -> KronOp:
    """Random Hermitian KronOp including identity (None) factors."""
    terms = []
    for k in range(n_terms):
        a = random_hermitian(rng, d_s) if k % 3 != 1 else None
        b = random_hermitian(rng, d_e) if k % 3 != 2 else None
        terms.append((rng.normal(), a, b))
    return KronOp.from_terms(terms, dims=(d_s, d_e))


class TestKronOp:
    def test_as_matrix_matches_kron(self, rng):
        a = random_hermitian(rng, 2)
        b = random_hermitian(rng, 3)
        op = KronOp.from_terms([(2.5, a, b)])
        np.testing.assert_allclose(op.as_matrix(), 2.5 * np.kron(a, b), atol=1e-12)

    def test_none_factor_is_identity(self, rng):
        a = random_hermitian(rng, 2)
        op = KronOp.from_terms([(1.0, a, None)], dims=(2, 3))
        np.testing.assert_allclose(op.as_matrix(), np.kron(a, np.eye(3)), atol=1e-12)

    def test_dims_required_when_not_inferrable(self):
        with pytest.raises(ValueError, match="pass dims"):
            KronOp.from_terms([(1.0, None, None)])

    def test_dims_inferred_from_factors(self, rng):
        a = random_hermitian(rng, 2)
        b = random_hermitian(rng, 5)
        op = KronOp.from_terms([(1.0, a, b)])
        assert op.dims == (2, 5)
        assert op.dim == 10

    def test_inconsistent_factor_dimension(self, rng):
        a = random_hermitian(rng, 2)
        b = random_hermitian(rng, 3)
        with pytest.raises(ValueError, match="inconsistent"):
            KronOp.from_terms([(1.0, a, a), (1.0, a, b)])

    def test_non_square_factor(self):
        with pytest.raises(ValueError, match="square"):
            KronOp.from_terms([(1.0, np.zeros((2, 3)), None)], dims=(2, 2))

    @pytest.mark.parametrize("d_s,d_e", [(2, 2), (2, 5), (3, 4)])
    def test_apply_matches_dense(self, rng, d_s, d_e):
        op = _random_kron_op(rng, d_s, d_e)
        psi = random_state_vector(rng, d_s * d_e)
        np.testing.assert_allclose(op.apply(psi), op.as_matrix() @ psi, atol=1e-12)

    def test_dagger(self, rng):
        op = KronOp.from_terms(
            [(1.0 + 2.0j, rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)), None)],
            dims=(2, 3),
        )
        np.testing.assert_allclose(
            op.dagger().as_matrix(), linalg.dag(op.as_matrix()), atol=1e-12
        )

    def test_add_and_scale(self, rng):
        op1 = _random_kron_op(rng, 2, 3)
        op2 = _random_kron_op(rng, 2, 3)
        np.testing.assert_allclose(
            (op1 + op2).as_matrix(), op1.as_matrix() + op2.as_matrix(), atol=1e-12
        )
        np.testing.assert_allclose(
            op1.scaled(-1.5j).as_matrix(), -1.5j * op1.as_matrix(), atol=1e-12
        )

    def test_add_dimension_mismatch(self, rng):
        op1 = _random_kron_op(rng, 2, 3)
        op2 = _random_kron_op(rng, 2, 4)
        with pytest.raises(TypeError):
            _ = op1 + op2

    def test_matmul_matches_dense_product(self, rng):
        op1 = _random_kron_op(rng, 2, 3)
        op2 = _random_kron_op(rng, 2, 3)
        np.testing.assert_allclose(
            op1.matmul(op2).as_matrix(), op1.as_matrix() @ op2.as_matrix(), atol=1e-11
        )


class TestMoments:
    @pytest.mark.parametrize("density", [False, True])
    def test_expect_dense(self, rng, density):
        h = random_hermitian(rng, 4)
        state = random_density(rng, 4) if density else random_state_vector(rng, 4)
        ref = linalg.expectation(h, state)
        assert expect(h, state) == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("density", [False, True])
    def test_expect_kron(self, rng, density):
        op = _random_kron_op(rng, 2, 3)
        state = random_density(rng, 6) if density else random_state_vector(rng, 6)
        ref = linalg.expectation(op.as_matrix(), state)
        assert expect(op, state) == pytest.approx(ref, abs=1e-10)

    def test_expect_rejects_imaginary(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        op = KronOp.from_terms([(1.0, a, None)], dims=(2, 2))
        psi = random_state_vector(rng, 4)
        with pytest.raises(ValueError, match="imaginary"):
            expect(op, psi)

    def test_apply_op_dispatch(self, rng):
        h = random_hermitian(rng, 4)
        psi = random_state_vector(rng, 4)
        np.testing.assert_allclose(apply_op(h, psi), h @ psi, atol=1e-12)
        op = _random_kron_op(rng, 2, 2)
        np.testing.assert_allclose(apply_op(op, psi), op.apply(psi), atol=1e-12)

    @pytest.mark.parametrize("density", [False, True])
    def test_pair_moment_dense(self, rng, density):
        a = random_hermitian(rng, 3)
        b = random_hermitian(rng, 3)
        state = random_density(rng, 3) if density else random_state_vector(rng, 3)
        rho = state if density else np.outer(state, state.conj())
        ref = complex(np.trace(a @ b @ rho))
        assert pair_moment(a, b, state) == pytest.approx(ref, abs=1e-12)

    def test_pair_moment_kron_vector(self, rng):
        op_a = _random_kron_op(rng, 2, 3)
        op_b = _random_kron_op(rng, 2, 3)
        psi = random_state_vector(rng, 6)
        ref = complex(psi.conj() @ op_a.as_matrix() @ op_b.as_matrix() @ psi)
        assert pair_moment(op_a, op_b, psi) == pytest.approx(ref, abs=1e-10)

    def test_pair_moment_kron_density_raises(self, rng):
        op = _random_kron_op(rng, 2, 2)
        rho = random_density(rng, 4)
        with pytest.raises(ValueError, match="state vector"):
            pair_moment(op, op, rho)

    def test_variance_nonnegative_and_exact(self, rng):
        h = random_hermitian(rng, 4)
        psi = random_state_vector(rng, 4)
        ref = linalg.expectation(h @ h, psi) - linalg.expectation(h, psi) ** 2
        v = variance(h, psi)
        assert v == pytest.approx(ref, abs=1e-10)
        assert v >= -1e-12

    def test_variance_of_eigenstate_is_zero(self):
        sz = np.diag([1.0, -1.0]).astype(complex)
        assert variance(sz, np.array([1.0, 0.0])) == pytest.approx(0.0, abs=1e-15)

    def test_covariance_symmetry(self, rng):
        a = random_hermitian(rng, 4)
        b = random_hermitian(rng, 4)
        rho = random_density(rng, 4)
        assert covariance_sym(a, b, rho) == pytest.approx(covariance_sym(b, a, rho), abs=1e-12)

    def test_covariance_of_operator_with_itself(self, rng):
        a = random_hermitian(rng, 3)
        psi = random_state_vector(rng, 3)
        assert covariance_sym(a, a, psi) == pytest.approx(variance(a, psi), abs=1e-12)

    def test_comm_expectation_imaginary(self, rng):
        a = random_hermitian(rng, 4)
        b = random_hermitian(rng, 4)
        rho = random_density(rng, 4)
        val = comm_expectation(a, b, rho)
        ref = complex(np.trace((a @ b - b @ a) @ rho))
        assert val == pytest.approx(ref, abs=1e-12)
        assert abs(val.real) < 1e-10

    @given(st.integers(0, 3), st.integers(0, 3))
    @settings(max_examples=20, deadline=None)
    def test_pauli_commutators(self, i, j):
        paulis = [
            np.eye(2, dtype=complex),
            np.array([[0, 1], [1, 0]], dtype=complex),
            np.array([[0, -1j], [1j, 0]], dtype=complex),
            np.diag([1.0, -1.0]).astype(complex),
        ]
        psi = np.array([0.6, 0.8j])
        val = comm_expectation(paulis[i], paulis[j], psi)
        ref = complex(psi.conj() @ linalg.commutator(paulis[i], paulis[j]) @ psi)
        assert val == pytest.approx(ref, abs=1e-12)
