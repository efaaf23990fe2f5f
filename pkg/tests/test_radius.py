import math

import numpy as np
import pytest
import scipy.linalg

from pencilradius import matrixcore as mc
from pencilradius.exceptions import ContractViolation
from pencilradius.generator import generate
from pencilradius.geninv import OptBudget, parametrize_inner
from pencilradius.pencil import Pencil
from pencilradius.radius import (WARN_HYPOTHESIS, WARN_SLOW, SearchConfig,
                                 d_bartlay, d_geninv, d_oracle, full_report)

from conftest import (diag_pencil, inf_pencil, kpos_pencil, rand_complex,
                      rect_pencil, swap_pencil)

SQRT2 = math.sqrt(2.0)


def qz_drop_points(p):
    """Independent cross-check: finite generalized eigenvalues via QZ."""
    w = scipy.linalg.eigvals(p.T, p.S)
    return sorted(abs(x) for x in w if np.isfinite(x))


class TestOracle:
    def test_swap_plus_minus_sqrt2(self):
        res = d_oracle(swap_pencil())
        assert res.d == pytest.approx(SQRT2, rel=1e-9)
        assert sorted(abs(z) for z in res.drop_points) == pytest.approx(
            [SQRT2, SQRT2], rel=1e-9)

    def test_diag_half(self):
        res = d_oracle(diag_pencil())
        assert res.d == pytest.approx(0.5, rel=1e-9)
        assert sorted(abs(z) for z in res.drop_points) == pytest.approx(
            [0.5, 2.0], rel=1e-9)

    def test_rectangular_single_drop(self):
        res = d_oracle(rect_pencil())
        assert res.d == pytest.approx(1.0, rel=1e-9)
        assert len(res.drop_points) == 1

    def test_zero_s_infinite(self):
        res = d_oracle(inf_pencil())
        assert math.isinf(res.d) and res.drop_points == []

    def test_origin_drop_not_counted(self):
        res = d_oracle(kpos_pencil())
        assert res.d == pytest.approx(1.0, rel=1e-9)
        assert min(abs(z) for z in res.drop_points) <= 1e-9

    def test_matches_qz_on_planted(self):
        for trial in range(8):
            rng = np.random.default_rng(trial)
            drops = [float(np.exp(rng.uniform(np.log(0.4), np.log(2.5))))
                     * np.exp(1j * rng.uniform(0, 2 * np.pi))]
            p, _ = generate("regular", 4, None, drops, seed=trial)
            res = d_oracle(p, SearchConfig(seed=trial))
            qz = qz_drop_points(p)
            assert res.d == pytest.approx(qz[0], rel=1e-8)


class TestBartLay:
    def test_diag_exact(self):
        res = d_bartlay(diag_pencil(), 12)
        assert res.d == pytest.approx(0.5, rel=1e-10)
        assert not res.slow_convergence
        for row in res.table:
            assert row.value == pytest.approx(2.0 ** -row.m, rel=1e-10)
            assert row.root == pytest.approx(0.5, rel=1e-10)
            if row.m < 12:
                assert row.ratio == pytest.approx(0.5, rel=1e-10)

    def test_swap_root_estimator(self):
        # gamma ratios alternate 2,1,2,1: the ratio estimator cannot settle,
        # but gamma_12^(1/12) = sqrt(2) exactly
        res = d_bartlay(swap_pencil(), 12)
        assert res.slow_convergence
        assert res.d == pytest.approx(SQRT2, rel=1e-2)

    def test_infinite_propagates(self):
        res = d_bartlay(inf_pencil(), 12)
        assert math.isinf(res.d)
        assert math.isinf(res.table[3].value)

    def test_m_max_guard(self):
        with pytest.raises(ContractViolation):
            d_bartlay(diag_pencil(), 2)


class TestGenInv:
    def test_swap_exact(self):
        res = d_geninv(swap_pencil(), OptBudget(starts=4, evals=200))
        assert res.d == pytest.approx(SQRT2, rel=1e-10)

    def test_rectangular_one(self):
        res = d_geninv(rect_pencil(), OptBudget(starts=4, evals=200))
        assert res.d == pytest.approx(1.0, rel=1e-8)

    def test_invertible_t_identity_s(self):
        # 1/r(T^{-1}) is the smallest eigenvalue modulus of T
        rng = np.random.default_rng(3)
        t = rand_complex(rng, 4, 4) + 3 * np.eye(4)
        p = Pencil(t, np.eye(4, dtype=complex))
        res = d_geninv(p, OptBudget(starts=4, evals=150))
        expected = min(abs(w) for w in np.linalg.eigvals(t))
        assert res.d == pytest.approx(expected, rel=1e-9)

    def test_reports_both_suprema(self):
        res = d_geninv(swap_pencil(), OptBudget(starts=2, evals=100))
        assert res.d_from_best == pytest.approx(res.d_from_reflexive, rel=1e-9)
        assert res.certificate == "true-spectral-radius"


class TestFullReport:
    def test_swap_three_way(self):
        report = full_report(swap_pencil(), budget=OptBudget(starts=6, evals=300))
        assert report.d_oracle == pytest.approx(SQRT2, rel=1e-6)
        assert report.d_bartlay == pytest.approx(SQRT2, rel=2e-2)
        assert report.d_geninv == pytest.approx(SQRT2, rel=1e-6)
        assert report.k == 0
        kinds = {w["kind"] for w in report.warnings}
        assert WARN_HYPOTHESIS not in kinds

    def test_kpos_gate(self):
        report = full_report(kpos_pencil())
        assert report.d_oracle == pytest.approx(1.0, abs=1e-6)
        assert report.d_bartlay == pytest.approx(1.0, abs=1e-6)
        assert math.isinf(report.d_geninv)
        assert report.k == 1
        assert any(w["kind"] == WARN_HYPOTHESIS for w in report.warnings)

    def test_all_infinite(self):
        report = full_report(inf_pencil(), budget=OptBudget(starts=2, evals=50))
        assert math.isinf(report.d_oracle)
        assert math.isinf(report.d_bartlay)
        assert math.isinf(report.d_geninv)

    def test_joint_scaling_invariance(self):
        # (cT, cS) loses rank at the same lambda as (T, S)
        p = swap_pencil()
        c = 2.75
        scaled = Pencil(c * p.T, c * p.S)
        a = full_report(p, budget=OptBudget(starts=4, evals=150))
        b = full_report(scaled, budget=OptBudget(starts=4, evals=150))
        assert b.d_oracle == pytest.approx(a.d_oracle, rel=1e-8)
        assert b.d_bartlay == pytest.approx(a.d_bartlay, rel=1e-8)
        assert b.d_geninv == pytest.approx(a.d_geninv, rel=1e-8)

    def test_t_scaling_covariance(self):
        # (cT, S) scales every estimate by c
        p = swap_pencil()
        c = 3.0
        scaled = Pencil(c * p.T, p.S)
        a = full_report(p, budget=OptBudget(starts=4, evals=150))
        b = full_report(scaled, budget=OptBudget(starts=4, evals=150))
        assert b.d_oracle == pytest.approx(c * a.d_oracle, rel=1e-8)
        assert b.d_bartlay == pytest.approx(c * a.d_bartlay, rel=1e-8)
        assert b.d_geninv == pytest.approx(c * a.d_geninv, rel=1e-8)

    def test_slow_convergence_flagged_for_swap(self):
        report = full_report(swap_pencil(), budget=OptBudget(starts=2, evals=60))
        assert any(w["kind"] == WARN_SLOW for w in report.warnings)


class TestOneSidedCertificate:
    def test_inner_inverse_bound(self):
        # every inner inverse gives 1/r(SL) <= d when k = 0
        for trial in range(5):
            rng = np.random.default_rng(trial + 60)
            drops = [float(np.exp(rng.uniform(np.log(0.4), np.log(2.2))))]
            p, _ = generate("regular", 4, None, drops, seed=trial + 60)
            d = d_oracle(p, SearchConfig(seed=trial)).d
            for _ in range(20):
                gi = parametrize_inner(p.T, rand_complex(rng, 4, 4), s=p.S)
                if gi.sr_SL > 0:
                    assert 1.0 / gi.sr_SL <= d + 1e-6 * (1 + d)


class TestChainNormBound:
    def test_gamma_against_witness_norms(self):
        # gamma_m * ||L (S L)^(m-1)|| >= 1 for the optimizer's witness, k = 0
        from pencilradius import pencil as pen
        for trial in range(3):
            rng = np.random.default_rng(trial + 80)
            drops = [float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))))]
            p, _ = generate("regular", 3, None, drops, seed=trial + 80)
            res = d_geninv(p, OptBudget(starts=4, evals=150, seed=trial))
            for gi in (res.witness.best, res.witness.reflexive):
                coeff = gi.L.copy()
                for m in range(1, 7):
                    g = pen.gamma_m(p, m)
                    if not math.isinf(g):
                        assert g * mc.operator_norm(coeff) >= 1.0 - 1e-6
                    coeff = coeff @ (p.S @ gi.L)
