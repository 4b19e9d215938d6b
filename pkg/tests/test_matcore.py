import numpy as np
import pytest

from conftest import (
    jacobi_eigenvalues,
    naive_kron,
    partial_trace_4index,
    random_density,
    random_hermitian,
)
from qrandlab import matcore
from qrandlab.sampler import SeededStream, haar_pure_states, haar_unitary


class TestTraceNorm:
    def test_diagonal(self):
        assert matcore.trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1.0, abs=1e-12)

    def test_identity(self):
        assert matcore.trace_norm(np.eye(4)) == pytest.approx(4.0, abs=1e-12)

    def test_matches_independent_eigensolver(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            h = random_hermitian(4, rng)
            expected = float(np.abs(jacobi_eigenvalues(h)).sum())
            assert matcore.trace_norm(h) == pytest.approx(expected, abs=1e-10)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            matcore.trace_norm(np.ones((2, 3)))


class TestOperatorNorm:
    def test_diagonal(self):
        assert matcore.operator_norm(np.diag([0.3, -0.7])) == pytest.approx(0.7, abs=1e-12)

    def test_zero(self):
        assert matcore.operator_norm(np.zeros((3, 3))) == 0.0

    def test_conjugated_pure_state_deviation(self):
        # eigenvalues of U phi U^dag - I/4 are {1 - 1/4, -1/4 x3}
        u = haar_unitary(4, SeededStream(3))
        phi = haar_pure_states(4, 1, SeededStream(4))[0]
        m = u @ matcore.projector(phi) @ u.conj().T - np.eye(4) / 4
        assert matcore.operator_norm(m) == pytest.approx(0.75, abs=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            matcore.operator_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestPureTraceDistance:
    def test_equal_states(self):
        phi = haar_pure_states(4, 1, SeededStream(5))[0]
        assert matcore.pure_trace_distance(phi, phi) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_pair(self):
        e0 = np.array([1, 0], dtype=complex)
        e1 = np.array([0, 1], dtype=complex)
        assert matcore.pure_trace_distance(e0, e1) == pytest.approx(2.0, abs=1e-12)

    def test_matches_trace_norm_of_projector_difference(self):
        phi, psi = haar_pure_states(8, 2, SeededStream(6))
        direct = matcore.trace_norm(matcore.projector(phi) - matcore.projector(psi))
        assert matcore.pure_trace_distance(phi, psi) == pytest.approx(direct, abs=1e-10)

    def test_identity_sweep(self):
        # closed form vs full trace norm, 1000 pairs per dimension
        for i, d in enumerate((2, 4, 8, 16)):
            pairs = haar_pure_states(d, 2000, SeededStream(100 + i)).reshape(1000, 2, d)
            for phi, psi in pairs:
                direct = matcore.trace_norm(matcore.projector(phi) - matcore.projector(psi))
                assert abs(matcore.pure_trace_distance(phi, psi) - direct) <= 1e-10

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            matcore.pure_trace_distance(np.ones(2) / np.sqrt(2), np.ones(3) / np.sqrt(3))


class TestPartialTrace:
    def test_maximally_entangled(self):
        phi = np.zeros(4, dtype=complex)
        phi[0] = phi[3] = 1 / np.sqrt(2)
        reduced = matcore.partial_trace(matcore.projector(phi), 2, 2, "B")
        assert np.allclose(reduced, np.eye(2) / 2, atol=1e-12)

    def test_product_state(self):
        rng = np.random.default_rng(8)
        sigma = random_density(2, rng)
        tau = random_density(3, rng)
        joint = np.kron(sigma, tau)
        assert np.allclose(matcore.partial_trace(joint, 2, 3, "B"), sigma, atol=1e-12)
        assert np.allclose(matcore.partial_trace(joint, 2, 3, "A"), tau, atol=1e-12)

    def test_matches_index_summation(self):
        rng = np.random.default_rng(9)
        rho = random_density(4, rng)
        for side in ("A", "B"):
            oracle = partial_trace_4index(rho, 2, 2, side)
            assert np.allclose(matcore.partial_trace(rho, 2, 2, side), oracle, atol=1e-12)

    def test_preserves_trace(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            rho = random_density(6, rng)
            red = matcore.partial_trace(rho, 2, 3, "B")
            assert abs(np.trace(red) - 1.0) <= 1e-12

    def test_factorization_mismatch(self):
        with pytest.raises(ValueError, match="factorization"):
            matcore.partial_trace(np.eye(6) / 6, 2, 2, "B")


class TestTensorProduct:
    def test_identities(self):
        assert np.array_equal(matcore.tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal(self):
        out = matcore.tensor_product(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        assert np.allclose(out, np.diag([0.0, 1.0, 0.0, 0.0]))

    def test_matches_naive_loop(self):
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        z = np.array([[1, 0], [0, -1]], dtype=complex)
        assert np.array_equal(matcore.tensor_product(x, z), naive_kron(x, z))


class TestHermitianInvSqrt:
    def test_identity(self):
        assert np.allclose(matcore.hermitian_inv_sqrt(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        out = matcore.hermitian_inv_sqrt(np.diag([4.0, 9.0]))
        assert np.allclose(out, np.diag([0.5, 1 / 3]), atol=1e-12)

    def test_multiply_back_gives_support_projector(self):
        rng = np.random.default_rng(11)
        g = rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5))
        m = g @ g.conj().T  # rank 5 PSD
        x = matcore.hermitian_inv_sqrt(m)
        assert np.allclose(x @ m @ x, matcore.support_projector(m), atol=1e-8)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            matcore.hermitian_inv_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestEntropies:
    def test_shannon_point_mass(self):
        assert matcore.shannon_entropy(np.array([1.0, 0.0])) == 0.0

    def test_shannon_uniform(self):
        assert matcore.shannon_entropy(np.full(16, 1 / 16)) == pytest.approx(4.0, abs=1e-12)

    def test_shannon_mixed(self):
        assert matcore.shannon_entropy(np.array([0.5, 0.25, 0.25])) == pytest.approx(1.5, abs=1e-12)

    def test_shannon_rejects_negative_mass(self):
        with pytest.raises(ValueError, match="negative"):
            matcore.shannon_entropy(np.array([1.1, -0.1]))

    def test_shannon_rejects_bad_sum(self):
        with pytest.raises(ValueError, match="sum"):
            matcore.shannon_entropy(np.array([0.5, 0.4]))

    def test_von_neumann_pure(self):
        phi = haar_pure_states(4, 1, SeededStream(12))[0]
        assert matcore.von_neumann_entropy(matcore.projector(phi)) == pytest.approx(0.0, abs=1e-8)

    def test_von_neumann_maximally_mixed(self):
        assert matcore.von_neumann_entropy(np.eye(8) / 8) == pytest.approx(3.0, abs=1e-12)

    def test_von_neumann_matches_eigenvalue_oracle(self):
        rng = np.random.default_rng(13)
        rho = random_density(4, rng)
        eigs = np.clip(jacobi_eigenvalues(rho), 0.0, 1.0)
        expected = matcore.shannon_entropy(eigs, sum_tol=1e-8)
        assert matcore.von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-9)


class TestNormOrdering:
    def test_operator_trace_dim_chain(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            h = random_hermitian(6, rng)
            op = matcore.operator_norm(h)
            tr = matcore.trace_norm(h)
            assert op <= tr + 1e-12
            assert tr <= 6 * op + 1e-12


class TestValidators:
    def test_density_accepts_valid(self):
        matcore.check_density_operator(np.eye(3) / 3)

    def test_density_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            matcore.check_density_operator(np.eye(3))

    def test_density_rejects_negative(self):
        with pytest.raises(ValueError, match="eigenvalue"):
            matcore.check_density_operator(np.diag([1.5, -0.5]))

    def test_pure_state_norm(self):
        with pytest.raises(ValueError, match="norm"):
            matcore.check_pure_state(np.array([1.0, 1.0]))
