import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slspectra import (
    BoundaryParams,
    Potential,
    Spectrum,
    UnsupportedRegimeError,
    bracket_eigenvalue,
    char_function,
    char_function_right,
    count_interior_zeros,
    eigenfunction,
    eigenfunction_right,
    find_eigenvalue,
    find_spectrum,
    mean_q,
)

PI = math.pi


class TestCharFunction:
    def test_dirichlet_zeros(self, q_zero, bc_dd):
        for n in range(3):
            assert char_function(q_zero, bc_dd, (n + 1) ** 2, 512) == pytest.approx(0.0, abs=1e-12)

    def test_neumann_zeros(self, q_zero, bc_nn):
        for n in (1, 2, 3):
            assert char_function(q_zero, bc_nn, n ** 2, 512) == pytest.approx(0.0, abs=1e-10)

    def test_neumann_closed_form(self, q_zero, bc_nn):
        # Phi(mu) = -sqrt(mu) sin(sqrt(mu) pi) at mu = 2.25
        assert char_function(q_zero, bc_nn, 2.25, 512) == pytest.approx(1.5, abs=1e-12)

    @given(mu=st.floats(min_value=-3.0, max_value=120.0),
           alpha=st.floats(min_value=0.4, max_value=PI),
           beta=st.floats(min_value=0.0, max_value=PI - 0.4))
    @settings(max_examples=20, deadline=None)
    def test_left_right_symmetry(self, mu, alpha, beta, q_step):
        bc = BoundaryParams(alpha, beta)
        left = char_function(q_step, bc, mu, 512)
        right = char_function_right(q_step, bc, mu, 512)
        assert left == pytest.approx(right, abs=1e-7 * max(1.0, abs(left)))


class TestBracketing:
    def test_contains_free_eigenvalue(self, q_zero, bc_dd):
        lo, hi = bracket_eigenvalue(q_zero, bc_dd, 3, 512)
        assert lo < 16.0 < hi

    def test_contains_shifted_eigenvalue(self, q_one, bc_nn):
        lo, hi = bracket_eigenvalue(q_one, bc_nn, 2, 512)
        assert lo < 5.0 < hi

    def test_step_bracket_contains_scanned_root(self, q_step, bc_nn):
        lo, hi = bracket_eigenvalue(q_step, bc_nn, 5, 512)
        # independent oracle: bisect the sign of Phi directly inside the window
        f = lambda m: char_function(q_step, bc_nn, m, 512)
        a, b = lo, hi
        fa = f(a)
        for _ in range(60):
            mid = 0.5 * (a + b)
            if f(mid) * fa > 0:
                a = mid
            else:
                b = mid
        root = 0.5 * (a + b)
        assert lo < root < hi
        assert abs(root - 26.01) < 0.5


class TestFindEigenvalue:
    def test_free_dirichlet(self, q_zero, bc_dd):
        p = find_eigenvalue(q_zero, bc_dd, 4, grid_size=1024)
        assert p.mu == pytest.approx(25.0, abs=1e-8)
        assert p.lam == pytest.approx(5.0, abs=1e-9)
        assert not p.mu_negative

    def test_free_mixed(self, q_zero):
        p = find_eigenvalue(q_zero, BoundaryParams(PI / 2, 0.0), 2, grid_size=1024)
        assert p.mu == pytest.approx(6.25, abs=1e-8)

    def test_constant_shift(self, q_one, bc_dd):
        p = find_eigenvalue(q_one, bc_dd, 4, grid_size=1024)
        assert p.mu == pytest.approx(26.0, abs=1e-8)

    def test_negative_ground_state(self, bc_nn):
        p = find_eigenvalue(Potential.constant(-5.0), bc_nn, 0, grid_size=512)
        assert p.mu == pytest.approx(-5.0, abs=1e-8)
        assert p.mu_negative and p.lam == pytest.approx(math.sqrt(5.0), abs=1e-8)
        assert p.zeros == 0

    def test_unsupported_regime(self, bc_nn):
        with pytest.raises(UnsupportedRegimeError):
            find_eigenvalue(Potential.constant(-30.0), bc_nn, 2, grid_size=512)

    def test_index_validation(self, q_zero, bc_dd):
        with pytest.raises(ValueError):
            find_eigenvalue(q_zero, bc_dd, -1)
        with pytest.raises(ValueError):
            find_eigenvalue(q_zero, bc_dd, 301)


class TestEigenfunctions:
    def test_free_dirichlet_shape(self, q_zero, bc_dd):
        p = find_eigenvalue(q_zero, bc_dd, 1, grid_size=1024)
        tr = eigenfunction(p, q_zero, bc_dd, 1024)
        assert np.max(np.abs(tr.y - np.sin(2 * tr.grid) / 2)) < 1e-9

    def test_free_neumann_shape(self, q_zero, bc_nn):
        p = find_eigenvalue(q_zero, bc_nn, 3, grid_size=1024)
        tr = eigenfunction(p, q_zero, bc_nn, 1024)
        assert np.max(np.abs(tr.y - np.cos(3 * tr.grid))) < 1e-9

    def test_zero_counts_step(self, q_step, bc_nn):
        for n in range(11):
            p = find_eigenvalue(q_step, bc_nn, n, grid_size=1024)
            tr = eigenfunction(p, q_step, bc_nn, 1024)
            assert count_interior_zeros(tr) == n == p.zeros

    def test_right_eigenfunction_proportional(self, q_step):
        bc = BoundaryParams(PI / 3, PI / 4)
        p = find_eigenvalue(q_step, bc, 4, grid_size=1024)
        left = eigenfunction(p, q_step, bc, 1024)
        right = eigenfunction_right(p, q_step, bc, 1024)
        i = len(left.grid) // 3
        scale = right.y[i] / left.y[i]
        assert np.max(np.abs(right.y - scale * left.y)) < 1e-6 * max(1, abs(scale))


class TestSpectrum:
    def test_invariants_and_residual_trend(self, step_nn_spectrum60, q_step):
        s = step_nn_spectrum60
        mus = s.mus
        assert np.all(np.diff(mus) > 0)
        assert all(p.zeros == p.n for p in s.pairs)
        meanq = mean_q(q_step)
        # mu_n - (n + delta_n)^2 - [q] tends to zero
        r = np.array([p.mu - (p.n + p.delta.value) ** 2 - meanq for p in s.pairs[10:]])
        ns = np.arange(10, 61)
        first = np.max(np.abs(r[ns <= 35]))
        second = np.max(np.abs(r[ns > 35]))
        assert second < first
        # n (lambda_n - (n + delta_n) - [q] / (2 (n + delta_n))) tends to zero
        l = np.array([p.n * (p.lam - (p.n + p.delta.value)
                             - meanq / (2 * (p.n + p.delta.value)))
                      for p in s.pairs[10:]])
        assert np.max(np.abs(l[ns > 35])) < np.max(np.abs(l[ns <= 35]))

    def test_shift_invariance(self, q_step, bc_nn):
        for c in (-1.0, 1.0, 5.0):
            s0 = find_spectrum(q_step, bc_nn, 8, grid_size=1024)
            sc = find_spectrum(q_step.shifted(c), bc_nn, 8, grid_size=1024)
            devs = [abs((b.mu - a.mu) - c) for a, b in zip(s0.pairs, sc.pairs)]
            assert max(devs) < 1e-6

    def test_low_index_deltas_flagged(self, q_zero, bc_dd):
        s = find_spectrum(q_zero, bc_dd, 4, grid_size=512)
        assert s.pair(0).delta.extrapolated
        assert s.pair(1).delta.extrapolated
        assert not s.pair(2).delta.extrapolated

    def test_char_residual_small(self, q_zero, bc_dd):
        s = find_spectrum(q_zero, bc_dd, 10, grid_size=1024)
        assert max(p.char_residual for p in s.pairs) < 1e-6

    def test_validation(self, q_zero, bc_dd):
        s = find_spectrum(q_zero, bc_dd, 3, grid_size=512)
        with pytest.raises(ValueError):
            Spectrum(q=q_zero, bc=bc_dd, pairs=s.pairs[1:])
        with pytest.raises(ValueError):
            Spectrum(q=q_zero, bc=bc_dd, pairs=[s.pairs[0], s.pairs[0]])
        with pytest.raises(ValueError):
            find_spectrum(q_zero, bc_dd, -1)
