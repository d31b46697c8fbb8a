import math

import numpy as np
import pytest

from slspectra import (
    BoundaryParams,
    ae_n,
    ae_tilde_n,
    extract_remainders,
    find_eigenvalue,
    find_spectrum,
    model_a,
    model_b,
    norming_a,
    norming_b,
    norming_records,
    solve_delta,
)
from slspectra.fitting import fit_loglog_slope, window_max_ratio

PI = math.pi


class TestMeasuredNorms:
    def test_free_dirichlet(self, q_zero, bc_dd):
        p = find_eigenvalue(q_zero, bc_dd, 3, grid_size=1024)
        assert norming_a(q_zero, bc_dd, p, 1024) == pytest.approx(PI / 32, rel=1e-10)
        assert norming_b(q_zero, bc_dd, p, 1024) == pytest.approx(PI / 32, rel=1e-10)

    def test_free_neumann(self, q_zero, bc_nn):
        p0 = find_eigenvalue(q_zero, bc_nn, 0, grid_size=1024)
        p5 = find_eigenvalue(q_zero, bc_nn, 5, grid_size=1024)
        assert norming_a(q_zero, bc_nn, p0, 1024) == pytest.approx(PI, abs=1e-10)
        assert norming_a(q_zero, bc_nn, p5, 1024) == pytest.approx(PI / 2, abs=1e-10)
        assert norming_b(q_zero, bc_nn, p5, 1024) == pytest.approx(PI / 2, abs=1e-10)

    def test_left_right_ratio(self, q_step):
        from slspectra import eigenfunction, eigenfunction_right

        bc = BoundaryParams(PI / 3, PI / 4)
        for n in (0, 2, 5):
            p = find_eigenvalue(q_step, bc, n, grid_size=1024)
            a = norming_a(q_step, bc, p, 1024)
            b = norming_b(q_step, bc, p, 1024)
            left = eigenfunction(p, q_step, bc, 1024)
            right = eigenfunction_right(p, q_step, bc, 1024)
            i = len(left.grid) // 3
            ratio = (right.y[i] / left.y[i]) ** 2
            assert b / a == pytest.approx(ratio, rel=1e-6)

    def test_shift_invariance(self, q_step, bc_nn):
        s0 = find_spectrum(q_step, bc_nn, 6, grid_size=1024)
        s3 = find_spectrum(q_step.shifted(3.0), bc_nn, 6, grid_size=1024)
        for p0, p3 in zip(s0.pairs, s3.pairs):
            a0 = norming_a(q_step, bc_nn, p0, 1024)
            a3 = norming_a(q_step.shifted(3.0), bc_nn, p3, 1024)
            assert abs(a3 - a0) < 1e-6


class TestCorrectionIntegral:
    def test_zero_potential(self, q_zero):
        assert ae_n(q_zero, 0.0, 5) == 0.0
        assert ae_tilde_n(q_zero, 5.0) == 0.0

    @pytest.mark.parametrize("n", [2, 7, 30])
    def test_constant_oracle(self, n, q_one):
        # int_0^pi (pi - t) sin(2 m t) dt = pi / (2 m)
        assert ae_n(q_one, 0.0, n) == pytest.approx(-PI / (4 * n), abs=1e-8)
        assert ae_n(q_one, 1.0, n) == pytest.approx(-PI / (4 * (n + 1)), abs=1e-8)

    def test_index_validation(self, q_one):
        with pytest.raises(ValueError):
            ae_n(q_one, 0.0, 1)

    def test_tilde_matches_at_true_frequency(self, q_one, bc_nn):
        # lambda_n = sqrt(n^2 + 1) for the constant potential
        diffs = []
        for n in (10, 40):
            d = solve_delta(n, bc_nn)
            lam = math.sqrt(n * n + 1.0)
            diffs.append(abs(ae_tilde_n(q_one, lam) - ae_n(q_one, d, n)))
        assert diffs[1] < diffs[0]
        assert diffs[1] < 1e-2

    def test_tilde_defect_decays(self, q_step, step_nn_spectrum60):
        ns = np.arange(10, 61)
        diffs = [abs(ae_tilde_n(q_step, step_nn_spectrum60.pair(int(n)).lam)
                     - ae_n(q_step, step_nn_spectrum60.pair(int(n)).delta, int(n)))
                 for n in ns]
        assert fit_loglog_slope(ns, diffs, floor=1e-13) <= -0.8


class TestModelValues:
    def test_pure_sine_bracket(self, bc_nn):
        assert model_a(bc_nn, 0.0, 0.0, 7) == pytest.approx(PI / 2, abs=1e-15)

    def test_pure_cosine_bracket(self, bc_dd):
        assert model_a(bc_dd, 1.0, 0.0, 4) == pytest.approx(PI / 50, abs=1e-15)

    def test_mixed_substitution(self):
        bc = BoundaryParams(PI / 4, PI / 2)
        got = model_a(bc, 0.0, -PI / 16, 4)
        corr = 1.0 - 1.0 / 32.0
        expect = (PI / 2) * corr * 0.5 + (PI / 32) * corr * 0.5
        assert got == pytest.approx(expect, abs=1e-14)

    def test_model_b_mirror(self, bc_dd):
        # beta = 0 puts all weight on the cosine bracket
        assert model_b(bc_dd, 1.0, 0.0, 4) == pytest.approx(PI / 50, abs=1e-15)

    def test_validation(self, bc_nn):
        with pytest.raises(ValueError):
            model_a(bc_nn, 0.0, 0.0, 1)


class TestRemainderExtraction:
    def test_zero_potential_neumann(self, q_zero, bc_nn):
        p = find_eigenvalue(q_zero, bc_nn, 6, grid_size=1024)
        a = norming_a(q_zero, bc_nn, p, 1024)
        r, rt, mode = extract_remainders(a, 0.0, p.delta, bc_nn, 6)
        assert mode == "sin"
        assert abs(r) < 1e-9
        assert math.isnan(rt)

    def test_zero_potential_dirichlet(self, q_zero, bc_dd):
        p = find_eigenvalue(q_zero, bc_dd, 6, grid_size=1024)
        a = norming_a(q_zero, bc_dd, p, 1024)
        r, rt, mode = extract_remainders(a, 0.0, p.delta, bc_dd, 6)
        assert mode == "cos"
        assert abs(rt) < 1e-9
        assert math.isnan(r)

    def test_combined_mode(self, q_step):
        bc = BoundaryParams(PI / 3, PI / 2)
        p = find_eigenvalue(q_step, bc, 5, grid_size=1024)
        a = norming_a(q_step, bc, p, 1024)
        ae = ae_n(q_step, p.delta, 5)
        r, rt, mode = extract_remainders(a, ae, p.delta, bc, 5)
        assert mode == "combined"
        # plugging the combined remainder back into its bracket reproduces a_n
        rebuilt = model_a(bc, p.delta, ae, 5) + (PI / 2) * bc.sin_alpha ** 2 * r
        assert rebuilt == pytest.approx(a, rel=1e-12)

    def test_step_remainder_bounded(self, q_step, bc_nn, step_nn_spectrum60):
        records = norming_records(q_step, bc_nn, step_nn_spectrum60)
        ns = np.array([rec.n for rec in records if rec.n >= 10])
        vals = [rec.n ** 2 * abs(rec.r_n) for rec in records if rec.n >= 10]
        ratio, _, _ = window_max_ratio(ns, vals, 10, 35, 60)
        assert ratio <= 2.0


class TestRecords:
    def test_bookkeeping_identity(self, q_step, bc_nn, step_nn_spectrum60):
        records = norming_records(q_step, bc_nn, step_nn_spectrum60)
        for rec in records:
            if rec.n < 2:
                assert math.isnan(rec.model_a)
                continue
            rebuilt = rec.model_a + (PI / 2) * rec.r_n
            assert rebuilt == pytest.approx(rec.a_n, rel=1e-12)

    def test_smooth_potential_decay(self, q_cos, bc_nn):
        s = find_spectrum(q_cos, bc_nn, 40)
        records = norming_records(q_cos, bc_nn, s)
        ns = np.arange(10, 41)
        defects = [abs(records[n].a_n - PI / 2) for n in ns]
        assert fit_loglog_slope(ns, defects, floor=1e-9) <= -1.8

    def test_dirichlet_scaled_limit(self, q_cos, bc_dd):
        # (n + delta_n)^2 a_n approaches pi/2 at the squared rate for smooth q
        s = find_spectrum(q_cos, bc_dd, 40)
        records = norming_records(q_cos, bc_dd, s)
        ns = np.arange(10, 41)
        defects = [abs(records[n].a_n * (n + s.pair(n).delta.value) ** 2 - PI / 2)
                   for n in ns]
        assert fit_loglog_slope(ns, defects, floor=1e-9) <= -1.8
