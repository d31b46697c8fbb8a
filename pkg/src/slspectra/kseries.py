"""Partial sums of the norming-correction series and its split.

The series under study is

    k(x) = sum_{n >= 2} ae_n / (n + delta_n) cos((n + delta_n) x),

on [0, 2 pi].  Integration by parts against sigma(t) = int_0^t (pi - s) q(s) ds
splits every term exactly:

    ae_n / nu = -sigma(pi) c_n + int_0^pi sigma(t) cos(2 nu t) dt,
    c_n = sin(2 pi delta_n) / (2 nu),        nu = n + delta_n,

giving k = k1 + k2 with

    k1(x) = -sigma(pi) sum c_n cos(nu x),
    k2(x) = sum [ (1/2) int_0^{2 pi} sigma_tilde(t) cos(nu t) dt ] cos(nu x),

where sigma_tilde(t) = sigma(t/2).  The half in the k2 coefficient is the
substitution factor from t -> t/2; it is what makes the per-term identity
hold, as the constant-potential oracle confirms.

Two boundary cases are supported: both conditions non-Dirichlet
("interior") and Dirichlet at both ends ("dirichlet-dirichlet").  In the
latter, delta_n = 1 makes every c_n vanish and k2 runs over integer
frequencies m = n + 1 >= 3, so it has a closed form: pi/2 times the even
part of the Fourier series of sigma_tilde with its first three cosine
terms removed.  That closed form is the convergence oracle; absolute
continuity itself is not machine-decidable from finitely many terms, so
the diagnostic reports total-variation stability across a truncation
ladder instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delta import sin_two_pi, solve_delta
from .errors import CaseError
from .potential import (
    PI,
    BoundaryParams,
    CumulativeIntegrals,
    Potential,
    _GAUSS_OFFSET,
    integrate,
    sigma_functions,
)

TRUNCATION_CAP = 400
DEFAULT_GRID_POINTS = 2048
DEFAULT_SERIES_TOL = 1e-10

CASE_INTERIOR = "interior"
CASE_DIRICHLET_DIRICHLET = "dirichlet-dirichlet"


@dataclass
class KSeriesResult:
    """Partial sums on a grid for a ladder of truncation orders.

    k_partial, k1_partial, k2_partial have shape (len(N_list), len(grid));
    row i is the partial sum through index N_list[i].  closed_form is the
    dirichlet-dirichlet oracle on the same grid, None in the interior case.
    """

    case_tag: str
    grid: np.ndarray
    N_list: tuple[int, ...]
    k_partial: np.ndarray
    k1_partial: np.ndarray
    k2_partial: np.ndarray
    closed_form: np.ndarray | None


@dataclass
class ACReport:
    """Absolute-continuity evidence for a truncation ladder on [a, b].

    variations[i] is the grid total variation of partial sum N_list[i];
    tv_stability is |V_last - V_prev| / V_prev (0 when V_prev vanishes and
    V_last does too); max_jump is the largest step between adjacent grid
    values of the finest partial sum.
    """

    segment: tuple[float, float]
    N_list: tuple[int, ...]
    variations: tuple[float, ...]
    tv_stability: float
    max_jump: float


def case_tag(bc: BoundaryParams) -> str:
    """Classify the boundary pair for the series, or raise CaseError."""
    if not bc.dirichlet_left and not bc.dirichlet_right:
        return CASE_INTERIOR
    if bc.dirichlet_left and bc.dirichlet_right:
        return CASE_DIRICHLET_DIRICHLET
    raise CaseError(
        f"series is defined for both conditions non-Dirichlet or both Dirichlet; "
        f"got alpha = {bc.alpha}, beta = {bc.beta}")


def _shared_gauss(panels: int, breakpoints) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(0.0, PI, panels + 1)
    interior = [b for b in breakpoints if 0.0 < b < PI]
    if interior:
        edges = np.unique(np.concatenate([edges, np.asarray(interior, dtype=float)]))
    a, b = edges[:-1], edges[1:]
    c = 0.5 * (a + b)
    d = (b - a) * _GAUSS_OFFSET
    nodes = np.concatenate([c - d, c + d])
    weights = np.concatenate([0.5 * (b - a), 0.5 * (b - a)])
    return nodes, weights


def series_coefficients(q: Potential, bc: BoundaryParams, N: int,
                        tol: float = DEFAULT_SERIES_TOL,
                        cumulative: CumulativeIntegrals | None = None):
    """Per-term data for indices 2..N.

    Returns (nus, k_coefs, k1_coefs, k2_coefs) where the term of each series
    at index n is coef * cos(nu x).  The integration-by-parts identity
    k_coef = k1_coef + k2_coef holds per term up to quadrature tolerance.

    Both oscillatory integrals are taken on one shared Gauss grid sized for
    the largest frequency (128 panels per period), with an embedded
    half-density grid giving a per-coefficient error estimate; coefficients
    the shared grid cannot certify fall back to adaptive quadrature.
    """
    case_tag(bc)
    if not (2 <= N <= TRUNCATION_CAP):
        raise ValueError(f"truncation must lie in [2, {TRUNCATION_CAP}], got {N}")
    ci = cumulative if cumulative is not None else sigma_functions(q)
    sigma_pi = ci.sigma(PI)

    nodes_f, w_f = _shared_gauss(128 * max(N, 8), q.breakpoints)
    nodes_c, w_c = _shared_gauss(64 * max(N, 8), q.breakpoints)
    u_f = w_f * (PI - nodes_f) * q(nodes_f)
    u_c = w_c * (PI - nodes_c) * q(nodes_c)
    s_f = w_f * ci.sigma(nodes_f)
    s_c = w_c * ci.sigma(nodes_c)

    ns = np.arange(2, N + 1)
    nus = np.empty(ns.size)
    k_coefs = np.empty(ns.size)
    k1_coefs = np.empty(ns.size)
    k2_coefs = np.empty(ns.size)
    for i, n in enumerate(ns):
        d = solve_delta(int(n), bc)
        nu = n + d.value
        sin_f = np.sin(2.0 * nu * nodes_f)
        cos_f = np.cos(2.0 * nu * nodes_f)
        ae = -0.5 * float(u_f @ sin_f)
        inner = float(s_f @ cos_f)
        ae_est = abs(ae + 0.5 * float(u_c @ np.sin(2.0 * nu * nodes_c))) / 15.0
        inner_est = abs(inner - float(s_c @ np.cos(2.0 * nu * nodes_c))) / 15.0
        if ae_est > tol:
            ae = -0.5 * integrate(lambda t: (PI - t) * q(t) * np.sin(2.0 * nu * t),
                                  0.0, PI, tol, freq=2.0 * nu,
                                  breakpoints=q.breakpoints)
        if inner_est > tol:
            inner = integrate(lambda t: ci.sigma(t) * np.cos(2.0 * nu * t),
                              0.0, PI, tol, freq=2.0 * nu,
                              breakpoints=q.breakpoints)
        c_n = sin_two_pi(d.value) / (2.0 * nu)
        nus[i] = nu
        k_coefs[i] = ae / nu
        k1_coefs[i] = -sigma_pi * c_n
        # the half from substituting t -> t/2 in the sigma_tilde integral
        # over [0, 2 pi]: (1/2) int sigma_tilde cos(nu t) = int sigma cos(2 nu s)
        k2_coefs[i] = inner
    return nus, k_coefs, k1_coefs, k2_coefs


def _default_grid(grid):
    if grid is None:
        return np.linspace(0.0, 2.0 * PI, DEFAULT_GRID_POINTS)
    return np.asarray(grid, dtype=float)


def _truncation_ladder(N: int, truncations):
    if truncations is None:
        ladder = sorted({max(2, N // 4), max(2, N // 2), N})
    else:
        ladder = sorted(set(int(t) for t in truncations))
        if any(t < 2 or t > N for t in ladder):
            raise ValueError(f"truncations must lie in [2, {N}]")
    return tuple(ladder)


def _partial_rows(nus, coefs, grid, ladder):
    """Partial sums at the requested truncations, summed in ascending n."""
    rows = np.empty((len(ladder), grid.size))
    acc = np.zeros(grid.size)
    pos = 0
    for i, n_stop in enumerate(ladder):
        count = n_stop - 1  # indices 2..n_stop
        while pos < count:
            acc += coefs[pos] * np.cos(nus[pos] * grid)
            pos += 1
        rows[i] = acc
    return rows


def k_partial_sum(q: Potential, bc: BoundaryParams, N: int, grid=None,
                  truncations=None, tol: float = DEFAULT_SERIES_TOL) -> KSeriesResult:
    """Partial sums of k, its split pieces, and the closed-form oracle.

    The default truncation ladder is {N/4, N/2, N}.
    """
    tag = case_tag(bc)
    grid = _default_grid(grid)
    ladder = _truncation_ladder(N, truncations)
    ci = sigma_functions(q)
    nus, k_coefs, k1_coefs, k2_coefs = series_coefficients(q, bc, N, tol, cumulative=ci)
    result = KSeriesResult(
        case_tag=tag,
        grid=grid,
        N_list=ladder,
        k_partial=_partial_rows(nus, k_coefs, grid, ladder),
        k1_partial=_partial_rows(nus, k1_coefs, grid, ladder),
        k2_partial=_partial_rows(nus, k2_coefs, grid, ladder),
        closed_form=(k2_closed_form_dd(q, grid, tol, cumulative=ci)
                     if tag == CASE_DIRICHLET_DIRICHLET else None),
    )
    return result


def k1_partial_sum(q: Potential, bc: BoundaryParams, N: int, grid=None,
                   tol: float = DEFAULT_SERIES_TOL) -> np.ndarray:
    """Partial sum through N of the boundary-term piece k1."""
    grid = _default_grid(grid)
    nus, _, k1_coefs, _ = series_coefficients(q, bc, N, tol)
    return _partial_rows(nus, k1_coefs, grid, (N,))[0]


def k2_partial_sum(q: Potential, bc: BoundaryParams, N: int, grid=None,
                   tol: float = DEFAULT_SERIES_TOL) -> np.ndarray:
    """Partial sum through N of the Fourier-coefficient piece k2."""
    grid = _default_grid(grid)
    nus, _, _, k2_coefs = series_coefficients(q, bc, N, tol)
    return _partial_rows(nus, k2_coefs, grid, (N,))[0]


def k2_closed_form_dd(q: Potential, grid=None, tol: float = DEFAULT_SERIES_TOL,
                      cumulative: CumulativeIntegrals | None = None) -> np.ndarray:
    """Closed form of k2 in the Dirichlet-Dirichlet case.

    pi/2 times the even part of the Fourier series of sigma_tilde,
    (sigma_tilde(x) + sigma_tilde(2 pi - x)) / 2, with the mean and the
    first two cosine harmonics removed (the series starts at frequency 3).
    """
    grid = _default_grid(grid)
    ci = cumulative if cumulative is not None else sigma_functions(q)
    tilde_breaks = tuple(2.0 * b for b in q.breakpoints)
    coeffs = []
    for m in range(3):
        val = integrate(lambda t: ci.sigma_tilde(t) * np.cos(m * t), 0.0, 2.0 * PI,
                        tol, freq=float(m), breakpoints=tilde_breaks) / PI
        coeffs.append(val)
    even = (ci.sigma_tilde(grid) + ci.sigma_tilde(2.0 * PI - grid)) / 2.0
    return (PI / 2.0) * (even - coeffs[0] / 2.0 - coeffs[1] * np.cos(grid)
                         - coeffs[2] * np.cos(2.0 * grid))


def ac_diagnostic(grid, partials, N_list, a: float, b: float) -> ACReport:
    """Total-variation evidence of absolute continuity on [a, b].

    partials has one row per truncation in N_list (a KSeriesResult row
    block, or any stack of grid functions on the same grid).
    """
    if not (0.0 < a < b < 2.0 * PI):
        raise ValueError(f"segment must satisfy 0 < a < b < 2 pi, got [{a}, {b}]")
    grid = np.asarray(grid, dtype=float)
    partials = np.atleast_2d(np.asarray(partials, dtype=float))
    mask = (grid >= a) & (grid <= b)
    if int(np.sum(mask)) < 3:
        raise ValueError("segment contains too few grid points")
    variations = tuple(float(np.sum(np.abs(np.diff(row[mask])))) for row in partials)
    if len(variations) >= 2 and variations[-2] > 0.0:
        stability = abs(variations[-1] - variations[-2]) / variations[-2]
    else:
        stability = 0.0 if variations[-1] == 0.0 else math.inf
    max_jump = float(np.max(np.abs(np.diff(partials[-1][mask]))))
    return ACReport(segment=(float(a), float(b)), N_list=tuple(int(n) for n in N_list),
                    variations=variations, tv_stability=float(stability),
                    max_jump=max_jump)
