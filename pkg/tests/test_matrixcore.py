import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pencilradius import matrixcore as mc
from pencilradius.exceptions import ContractViolation

from conftest import rand_complex


class TestSvd:
    def test_diagonal(self):
        _, s, _ = mc.svd(np.diag([1.0, 2.0]).astype(complex))
        assert_allclose(s, [2.0, 1.0])

    def test_zero_matrix(self):
        _, s, _ = mc.svd(np.zeros((2, 2), dtype=complex))
        assert_allclose(s, [0.0, 0.0])

    def test_nilpotent_block(self):
        _, s, _ = mc.svd(np.array([[0, 1], [0, 0]], dtype=complex))
        assert_allclose(s, [1.0, 0.0], atol=1e-15)

    def test_reconstruction_random(self, rng):
        for _ in range(25):
            rows = int(rng.integers(1, 13))
            cols = int(rng.integers(1, 13))
            a = rand_complex(rng, rows, cols)
            u, s, v = mc.svd(a)
            err = mc.operator_norm(a - u @ np.diag(s) @ mc.adjoint(v))
            assert err <= 1e-10 * (1.0 + s[0])
            assert_allclose(mc.adjoint(u) @ u, np.eye(u.shape[1]), atol=1e-12)
            assert_allclose(mc.adjoint(v) @ v, np.eye(v.shape[1]), atol=1e-12)
            assert np.all(np.diff(s) <= 0) and np.all(s >= 0)


class TestRankWithTol:
    def test_rank_one(self):
        assert mc.rank_with_tol(np.array([[1, 0], [0, 0]], dtype=complex)).rank == 1

    def test_identity(self):
        assert mc.rank_with_tol(np.eye(3, dtype=complex)).rank == 3

    def test_near_singular_pair(self):
        # sigma_2 ~ |det|/sigma_1 ~ 5e-16 by the svd oracle, far below tolerance
        a = np.array([[1, 1], [1, 1 + 1e-15]], dtype=complex)
        sigma = np.linalg.svd(a, compute_uv=False)
        assert sigma[1] < 1e-14
        decision = mc.rank_with_tol(a)
        assert decision.rank == 1
        assert decision.gap_ratio > 1e3
        assert decision.tol_used == pytest.approx(1e-10 * 2 * sigma[0])

    def test_retained_vs_discarded(self, rng):
        for _ in range(10):
            a = rand_complex(rng, 5, 7)
            d = mc.rank_with_tol(a)
            assert all(s > d.tol_used for s in d.singular_values[:d.rank])
            assert all(s <= d.tol_used for s in d.singular_values[d.rank:])

    def test_bad_eps(self):
        with pytest.raises(ContractViolation):
            mc.rank_with_tol(np.eye(2, dtype=complex), eps_rel=0.0)


class TestSpectralRadius:
    def test_nilpotent(self):
        assert mc.spectral_radius(np.array([[0, 1], [0, 0]], dtype=complex)) == 0.0

    def test_off_diagonal(self):
        # mu^2 = 1/2 from the characteristic polynomial, by hand
        a = np.array([[0, 0.5], [1, 0]], dtype=complex)
        assert mc.spectral_radius(a) == pytest.approx(1 / math.sqrt(2), rel=1e-12)

    def test_diagonal(self):
        assert mc.spectral_radius(np.diag([1.0, 0.5]).astype(complex)) == 1.0

    def test_rejects_rectangular(self):
        with pytest.raises(ContractViolation):
            mc.spectral_radius(np.zeros((2, 3), dtype=complex))

    def test_bounded_by_operator_norm(self, rng):
        for _ in range(20):
            a = rand_complex(rng, 6, 6)
            assert mc.spectral_radius(a) <= mc.operator_norm(a) + 1e-12

    def test_power_roots_decrease_to_sr(self, rng):
        for _ in range(10):
            a = rand_complex(rng, 6, 6)
            roots = [mc.spectral_radius(np.linalg.matrix_power(a, k)) ** (1.0 / k)
                     for k in (1, 2, 4, 8)]
            for earlier, later in zip(roots, roots[1:]):
                assert later <= earlier + 1e-6
            assert roots[-1] >= mc.spectral_radius(a) - 1e-6


class TestPseudoInverse:
    def test_diagonal(self):
        assert_allclose(mc.pseudo_inverse(np.diag([1.0, 2.0]).astype(complex)),
                        np.diag([1.0, 0.5]), atol=1e-14)

    def test_row_vector(self):
        assert_allclose(mc.pseudo_inverse(np.array([[1.0, 0.0]], dtype=complex)),
                        np.array([[1.0], [0.0]]), atol=1e-14)

    def test_rank_deficient(self):
        a = np.array([[1, 0], [0, 0]], dtype=complex)
        assert_allclose(mc.pseudo_inverse(a), a, atol=1e-14)

    @pytest.mark.parametrize("rows,cols,rank", [(4, 4, 4), (5, 3, 3), (3, 5, 2), (6, 6, 3)])
    def test_penrose_identities(self, rng, rows, cols, rank):
        a = rand_complex(rng, rows, rank) @ rand_complex(rng, rank, cols)
        x = mc.pseudo_inverse(a)
        scale = 1.0 + mc.operator_norm(a)
        for res in mc.penrose_residuals(a, x):
            assert res <= 1e-8 * scale


class TestPlumbing:
    def test_operator_norm(self):
        assert mc.operator_norm(np.diag([1.0, 2.0]).astype(complex)) == 2.0

    def test_adjoint_involution(self, rng):
        a = rand_complex(rng, 3, 5)
        assert_allclose(mc.adjoint(mc.adjoint(a)), a)

    def test_identity_neutral(self, rng):
        a = rand_complex(rng, 4, 4)
        assert_allclose(mc.identity(4) @ a, a)

    def test_as_matrix_rejects_nonfinite(self):
        with pytest.raises(ContractViolation):
            mc.as_matrix(np.array([[1.0, np.nan]]))
        with pytest.raises(ContractViolation):
            mc.as_matrix(np.array([[np.inf, 1.0]]))

    def test_matmul_shape_mismatch_raises(self):
        with pytest.raises(ValueError):
            np.zeros((2, 3), dtype=complex) @ np.zeros((2, 3), dtype=complex)
