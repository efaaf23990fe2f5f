import math

import numpy as np
import pytest

from pencilradius import matrixcore as mc
from pencilradius import pencil as pen
from pencilradius import subspace as sub
from pencilradius.exceptions import ContractViolation
from pencilradius.pencil import Pencil

from conftest import (diag_pencil, inf_pencil, kpos_pencil, rand_complex,
                      rect_pencil, swap_pencil)


def random_square_pencil(rng, n):
    return Pencil(rand_complex(rng, n, n), rand_complex(rng, n, n))


class TestLimitSpaces:
    def test_kpos_hand_recursion(self):
        # R_m = span{e1} for m >= 1, X_inf = span{e1}, N(T) = span{e2}, k = 1
        ls = pen.limit_spaces(kpos_pencil())
        assert [s.dim for s in ls.r_seq] == [2, 1]
        assert ls.x_inf.dim == 1
        assert sub.distance(np.array([1, 0], dtype=complex), ls.x_inf) < 1e-10
        assert ls.k == 1

    def test_rect_hand_recursion(self):
        # range S inside T C^3, so R_1 = C^3 and everything stabilizes at once
        ls = pen.limit_spaces(rect_pencil())
        assert ls.x_inf.dim == 3
        assert ls.k == 0

    def test_invertible_t(self, rng):
        for _ in range(5):
            t = rand_complex(rng, 4, 4) + 5 * np.eye(4)
            p = Pencil(t, rand_complex(rng, 4, 4))
            ls = pen.limit_spaces(p)
            assert all(s.dim == 0 for s in ls.n_seq)
            assert ls.k == 0

    def test_monotone_dims(self, rng):
        for _ in range(8):
            p = random_square_pencil(rng, 5)
            ls = pen.limit_spaces(p)
            n_dims = [s.dim for s in ls.n_seq]
            r_dims = [s.dim for s in ls.r_seq]
            assert n_dims == sorted(n_dims)
            assert r_dims == sorted(r_dims, reverse=True)

    def test_s_identity_kernel_chain(self, rng):
        # with S = I the m-th space is exactly kernel(T^m)
        for _ in range(5):
            t = rand_complex(rng, 4, 2) @ rand_complex(rng, 2, 4)  # rank <= 2
            p = Pencil(t, np.eye(4, dtype=complex))
            for m in range(1, 4):
                nm = pen.nth_kernel_space(p, m)
                km = sub.kernel(np.linalg.matrix_power(t, m))
                assert sub.contains(nm, km) and sub.contains(km, nm)

    def test_k0_limit_identities(self, rng):
        # k = 0 forces T X_inf = Y_inf and preimage(S, Y_inf) = X_inf
        seen = 0
        for trial in range(12):
            p = random_square_pencil(np.random.default_rng(trial), 4)
            ls = pen.limit_spaces(p)
            if ls.k != 0:
                continue
            seen += 1
            tx = sub.image(p.T, ls.x_inf)
            assert sub.contains(tx, ls.y_inf) and sub.contains(ls.y_inf, tx)
            pre = sub.preimage(p.S, ls.y_inf)
            assert sub.contains(pre, ls.x_inf) and sub.contains(ls.x_inf, pre)
        assert seen >= 3


class TestChainSpace:
    def test_s_identity_dimension(self, rng):
        # chains are (T^{m-1}x, ..., Tx, x): dimension n for every m
        t = rand_complex(rng, 3, 3)
        p = Pencil(t, np.eye(3, dtype=complex))
        for m in (1, 2, 4):
            cs = pen.chain_space(p, m)
            assert cs.basis.shape[1] == 3
            assert pen.verify_chain_columns(p, cs) <= 1e-8

    def test_s_zero_invertible_t(self, rng):
        # T x_i = 0 forces x_2 = ... = x_m = 0; only x_1 is free
        t = rand_complex(rng, 3, 3) + 4 * np.eye(3)
        p = Pencil(t, np.zeros((3, 3), dtype=complex))
        cs = pen.chain_space(p, 3)
        assert cs.basis.shape[1] == 3
        assert np.linalg.norm(cs.basis[3:, :]) < 1e-10

    def test_m_one_full(self):
        cs = pen.chain_space(rect_pencil(), 1)
        assert cs.basis.shape == (3, 3)

    def test_bad_m(self):
        with pytest.raises(ContractViolation):
            pen.chain_space(rect_pencil(), 0)


class TestGamma:
    def test_gamma1_is_reduced_min_modulus(self):
        assert pen.gamma_m(swap_pencil(), 1) == pytest.approx(1.0, rel=1e-12)

    def test_diag_powers_of_two(self):
        p = diag_pencil()
        for m in range(1, 11):
            assert pen.gamma_m(p, m) == pytest.approx(2.0 ** -m, rel=1e-10)

    def test_infinite_when_chains_trapped(self):
        p = inf_pencil()
        assert pen.gamma_m(p, 1) == 1.0
        for m in (2, 3, 5):
            assert math.isinf(pen.gamma_m(p, m))

    def test_matches_power_modulus_for_identity_s(self, rng):
        # gamma_m(T; I) equals the reduced minimum modulus of T^m; T kept
        # well conditioned so sigma_min(T^m) stays above the rank tolerance
        # of the explicitly formed power
        from pencilradius.generator import well_conditioned
        for trial in range(10):
            local = np.random.default_rng(trial + 1)
            n = int(local.integers(2, 7))
            t = well_conditioned(n, local, cond_max=8.0)
            p = Pencil(t, np.eye(n, dtype=complex))
            for m in (1, 2, 4, 8):
                expected = pen.reduced_min_modulus(np.linalg.matrix_power(t, m))
                got = pen.gamma_m(p, m)
                assert got == pytest.approx(expected, rel=1e-6)

    def test_eig_route_agrees(self, rng):
        for trial in range(6):
            local = np.random.default_rng(trial + 100)
            p = random_square_pencil(local, 4)
            for m in (1, 2, 3):
                a = pen.gamma_m(p, m)
                b = pen.gamma_m_eig(p, m)
                if math.isinf(a) or math.isinf(b):
                    assert a == b
                else:
                    assert a == pytest.approx(b, rel=1e-8, abs=1e-12)

    def test_scale_covariance(self, rng):
        p = random_square_pencil(rng, 4)
        c = 3.7
        scaled = Pencil(c * p.T, c * p.S)
        for m in (1, 2, 3):
            assert pen.gamma_m(scaled, m) == pytest.approx(
                c * pen.gamma_m(p, m), rel=1e-8)

    def test_evaluation_order_independent(self):
        p = swap_pencil()
        forward = [pen.gamma_m(p, m) for m in (1, 2, 3, 4)]
        backward = [pen.gamma_m(p, m) for m in (4, 3, 2, 1)][::-1]
        assert forward == backward


class TestReducedMinModulus:
    def test_diagonal(self):
        assert pen.reduced_min_modulus(np.diag([1.0, 2.0]).astype(complex)) == 1.0

    def test_rank_deficient(self):
        assert pen.reduced_min_modulus(np.array([[1, 0], [0, 0]], dtype=complex)) == 1.0

    def test_zero_matrix(self):
        assert math.isinf(pen.reduced_min_modulus(np.zeros((3, 2), dtype=complex)))


class TestPencilType:
    def test_shape_mismatch(self):
        with pytest.raises(ContractViolation):
            Pencil(np.eye(2, dtype=complex), np.zeros((2, 3), dtype=complex))

    def test_at(self):
        p = swap_pencil()
        lam = 0.5 + 0.25j
        np.testing.assert_allclose(p.at(lam), p.T - lam * p.S)
