import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slspectra import (
    BlowUpError,
    Potential,
    fundamental_system,
    kernel_A,
    kernel_B,
    phi,
    picard_y2,
    psi,
    solve_ivp,
)
from slspectra.odesolve import build_mesh, y_values_batch

from conftest import pool_potentials

PI = math.pi


class TestSolveIvp:
    def test_free_cosine(self, q_zero):
        tr = solve_ivp(q_zero, 4.0, True, 1.0, 0.0, 512)
        assert np.max(np.abs(tr.y - np.cos(2 * tr.grid))) < 1e-12
        assert tr.y[-1] == pytest.approx(1.0, abs=1e-12)

    def test_zero_mu_linear(self, q_zero):
        tr = solve_ivp(q_zero, 0.0, True, 0.0, 1.0, 512)
        assert np.max(np.abs(tr.y - tr.grid)) < 1e-13
        assert tr.y[-1] == pytest.approx(PI, abs=1e-13)

    def test_constant_shift_reduction(self, q_one):
        tr = solve_ivp(q_one, 5.0, True, 1.0, 0.0, 512)
        assert np.max(np.abs(tr.y - np.cos(2 * tr.grid))) < 1e-12

    def test_hyperbolic_regime(self, q_zero):
        tr = solve_ivp(q_zero, -1.0, True, 1.0, 0.0, 512)
        assert np.max(np.abs(tr.y - np.cosh(tr.grid))) < 1e-11

    def test_right_to_left(self, q_zero):
        tr = solve_ivp(q_zero, 1.0, False, 0.0, -1.0, 512)
        # y(pi) = 0, y'(pi) = -1 gives y = sin(pi - x)
        assert np.max(np.abs(tr.y - np.sin(PI - tr.grid))) < 1e-12
        assert np.all(np.diff(tr.grid) > 0)

    def test_blow_up_guard(self, q_zero):
        with pytest.raises(BlowUpError):
            solve_ivp(q_zero, -4000.0, True, 1.0, 0.0, 512)

    def test_grid_size_validation(self, q_zero):
        with pytest.raises(ValueError):
            solve_ivp(q_zero, 1.0, True, 1.0, 0.0, 32)

    def test_mesh_includes_breakpoints(self, q_step):
        mesh = build_mesh(q_step, 100)
        assert np.any(np.isclose(mesh.nodes, PI / 2, atol=1e-14))

    def test_batch_matches_scalar(self, q_step):
        mesh = build_mesh(q_step, 256)
        mus = np.array([3.0, -1.0, 40.0])
        batch = y_values_batch(mesh, mus, 1.0, 0.5)
        for j, mu in enumerate(mus):
            tr = solve_ivp(q_step, float(mu), True, 1.0, 0.5, 256)
            assert np.max(np.abs(batch[:, j] - tr.y)) < 1e-11


class TestBoundaryNormalizedSolutions:
    def test_phi_neumann(self, q_zero):
        tr = phi(q_zero, 4.0, PI / 2, 512)
        assert np.max(np.abs(tr.y - np.cos(2 * tr.grid))) < 1e-12

    def test_phi_dirichlet(self, q_zero):
        tr = phi(q_zero, 1.0, PI, 512)
        assert np.max(np.abs(tr.y - np.sin(tr.grid))) < 1e-12

    def test_phi_superposition(self, q_zero):
        tr = phi(q_zero, 4.0, PI / 4, 512)
        expect = (math.sqrt(2) / 2) * (np.cos(2 * tr.grid) - np.sin(2 * tr.grid) / 2)
        assert np.max(np.abs(tr.y - expect)) < 1e-12

    def test_psi_dirichlet_right(self, q_zero):
        tr = psi(q_zero, 1.0, 0.0, 512)
        assert np.max(np.abs(tr.y - np.sin(PI - tr.grid))) < 1e-12

    def test_psi_neumann_right(self, q_zero):
        tr = psi(q_zero, 4.0, PI / 2, 512)
        assert np.max(np.abs(tr.y - np.cos(2 * (PI - tr.grid)))) < 1e-12

    def test_psi_constant_shift(self):
        q = Potential.constant(3.0)
        tr = psi(q, 7.0, PI / 2, 512)
        assert np.max(np.abs(tr.y - np.cos(2 * (PI - tr.grid)))) < 1e-12

    def test_angle_validation(self, q_zero):
        with pytest.raises(ValueError):
            phi(q_zero, 1.0, 0.0)
        with pytest.raises(ValueError):
            psi(q_zero, 1.0, PI)


class TestStructure:
    @given(mu=st.floats(min_value=-5.0, max_value=200.0),
           qi=st.integers(min_value=0, max_value=6))
    @settings(max_examples=20, deadline=None)
    def test_wronskian_conserved(self, mu, qi):
        q = pool_potentials()[qi]
        fs = fundamental_system(q, mu, 256)
        w = fs.y1.y * fs.y2.yprime - fs.y1.yprime * fs.y2.y
        assert np.max(np.abs(w - 1.0)) < 1e-7

    def test_fundamental_initial_conditions(self, q_step):
        fs = fundamental_system(q_step, 11.0, 256)
        assert (fs.y1.y[0], fs.y1.yprime[0]) == (1.0, 0.0)
        assert (fs.y2.y[0], fs.y2.yprime[0]) == (0.0, 1.0)
        assert (fs.y3.y[-1], fs.y3.yprime[-1]) == (1.0, 0.0)
        assert (fs.y4.y[-1], fs.y4.yprime[-1]) == (0.0, 1.0)

    @given(c=st.floats(min_value=-5.0, max_value=5.0),
           mu=st.floats(min_value=-2.0, max_value=100.0))
    @settings(max_examples=20, deadline=None)
    def test_shift_covariance(self, c, mu, q_step):
        base = solve_ivp(q_step, mu, True, 1.0, 0.3, 256)
        shifted = solve_ivp(q_step.shifted(c), mu + c, True, 1.0, 0.3, 256)
        scale = max(1.0, float(np.max(np.abs(base.y))))
        assert np.max(np.abs(base.y - shifted.y)) < 1e-9 * scale

    def test_leading_order_magnitudes(self, q_step):
        # lam |y1 - cos(lam x)| and lam |lam y2 - sin(lam x)| stay bounded
        c1s, c2s = [], []
        for lam in (10.0, 20.0, 40.0, 80.0):
            fs = fundamental_system(q_step, lam * lam, 2048)
            c1s.append(lam * np.max(np.abs(fs.y1.y - np.cos(lam * fs.y1.grid))))
            c2s.append(lam * np.max(np.abs(lam * fs.y2.y - np.sin(lam * fs.y2.grid))))
        assert max(c1s) < 3 * min(c1s)
        assert max(c2s) < 3 * min(c2s)


class TestPicardSeries:
    def test_zero_potential_exact(self, q_zero):
        pr = picard_y2(q_zero, 7.0, 3, 512)
        assert np.max(np.abs(pr.trace.y - np.sin(7 * pr.trace.grid) / 7)) < 1e-14
        assert pr.tail_bound == 0.0

    @pytest.mark.parametrize("qname", ["one", "step"])
    def test_agrees_with_solver(self, qname, q_one, q_step):
        q = q_one if qname == "one" else q_step
        pr = picard_y2(q, 5.0, 9)
        ref = solve_ivp(q, 25.0, True, 0.0, 1.0, 2048)
        assert abs(pr.trace.y[-1] - ref.y[-1]) < pr.tail_bound + 1e-8
        # derivative endpoint agrees too
        assert abs(pr.trace.yprime[-1] - ref.yprime[-1]) < 5 * pr.tail_bound + 1e-7

    def test_tail_certificate_value(self, q_one):
        # independent oracle: direct summation of sigma0^k / (lam^(k+1) k!)
        pr = picard_y2(q_one, 5.0, 8, 512)
        sigma0 = PI
        expect = sum(sigma0 ** k / (5.0 ** (k + 1) * math.factorial(k))
                     for k in range(9, 40))
        assert pr.tail_bound == pytest.approx(expect, rel=1e-12)
        assert pr.tail_bound < 1e-8

    def test_validation(self, q_one):
        with pytest.raises(ValueError):
            picard_y2(q_one, 0.5, 3)
        with pytest.raises(ValueError):
            picard_y2(q_one, 5.0, 0)


class TestAsymptoticKernels:
    def test_zero_potential(self, q_zero):
        assert kernel_A(q_zero, 5.0, 2.0) == pytest.approx(0.0, abs=1e-12)
        assert kernel_B(q_zero, 5.0, 2.0) == pytest.approx(0.0, abs=1e-12)

    def test_constant_closed_forms(self, q_one):
        for lam, x in ((7.0, 2.0), (13.0, 1.1)):
            assert kernel_A(q_one, lam, x) == pytest.approx(x * math.sin(lam * x), abs=1e-9)
            expect_b = x * math.cos(lam * x) - math.sin(lam * x) / lam
            assert kernel_B(q_one, lam, x) == pytest.approx(expect_b, abs=1e-9)

    def test_integer_frequency_endpoint(self, q_one):
        for n in (3.0, 6.0, 11.0):
            assert kernel_A(q_one, n, PI) == pytest.approx(0.0, abs=1e-9)

    def test_remainder_halving(self, q_step):
        worst = {}
        for lam in (10.0, 20.0):
            tr = solve_ivp(q_step, lam * lam, True, 1.0, 0.0, 2048)
            idx = np.linspace(128, len(tr.grid) - 1, 17).astype(int)
            worst[lam] = max(
                abs(2 * lam * (tr.y[i] - math.cos(lam * tr.grid[i]))
                    - kernel_A(q_step, lam, float(tr.grid[i])))
                for i in idx)
        ratio = worst[20.0] / worst[10.0]
        assert 0.35 <= ratio <= 0.65

    def test_lam_validation(self, q_one):
        with pytest.raises(ValueError):
            kernel_A(q_one, 0.5, 1.0)
