"""Eigenvalue location by shooting on the characteristic function.

The characteristic function Phi(mu) is the boundary defect at x = pi of the
left-normalized solution,

    Phi(mu) = phi(pi, mu) cos(beta) + phi'(pi, mu) sin(beta),

whose zeros are the eigenvalues mu_0 < mu_1 < ... of the problem.  Indices
n >= 2 are bracketed around the asymptotic frequency
n + delta_n + [q] / (2 (n + delta_n)).  The two lowest indices, and any
index whose asymptotic bracket misbehaves, are isolated by bisection on the
oscillation index: the count of interior zeros of the shooting solution
plus its terminal phase fragment equals the number of eigenvalues below mu,
so a handful of renormalized traces pins each index exactly even when the
lower spectral bound is very deep.  Roots are then refined by bisection
followed by guarded secant steps, vectorized over whole index ranges, and
every returned eigenpair is certified by the interior zero count of its
eigenfunction (the n-th eigenfunction has exactly n of them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .delta import DeltaValue, delta_for_index
from .errors import BracketError, OscillationMismatchError, UnsupportedRegimeError
from .odesolve import (
    DEFAULT_GRID_SIZE,
    Mesh,
    SolutionTrace,
    _step_coeffs_scalar,
    _trace,
    build_mesh,
    endpoint_values,
    y_values_batch,
)
from .potential import PI, BoundaryParams, Potential, mean_q

DEFAULT_ROOT_TOL = 1e-10
BISECT_WIDTH = 1e-6
BRACKET_HALF_WIDTHS = (0.4, 0.45, 0.49)
MAX_INDEX = 300


@dataclass
class Eigenpair:
    """One certified eigenvalue with its index evidence.

    lam is sqrt(|mu|); mu_negative records the hyperbolic case mu < 0.
    bracket is the interval the root was isolated in, char_residual the
    characteristic-function magnitude at the returned mu, zeros the counted
    interior zeros of the eigenfunction (equal to n).
    """

    n: int
    mu: float
    lam: float
    mu_negative: bool
    delta: DeltaValue
    bracket: tuple[float, float]
    char_residual: float
    zeros: int


@dataclass
class Spectrum:
    """Contiguous eigenpairs of one boundary problem, indexed from 0."""

    q: Potential
    bc: BoundaryParams
    pairs: list[Eigenpair]

    def __post_init__(self):
        for i, p in enumerate(self.pairs):
            if p.n != i:
                raise ValueError(f"eigenpair indices must be contiguous from 0, got {p.n} at {i}")
        mus = [p.mu for p in self.pairs]
        if any(b <= a for a, b in zip(mus[:-1], mus[1:])):
            raise ValueError("eigenvalues must be strictly increasing")

    @property
    def mus(self) -> np.ndarray:
        return np.array([p.mu for p in self.pairs])

    def pair(self, n: int) -> Eigenpair:
        return self.pairs[n]


class _CharEngine:
    """Prepared mesh and boundary data for batched Phi evaluations."""

    def __init__(self, q: Potential, bc: BoundaryParams, grid_size: int):
        self.q = q
        self.bc = bc
        self.mesh: Mesh = build_mesh(q, grid_size)
        self.y0 = bc.sin_alpha
        self.yp0 = -bc.cos_alpha

    def phi_batch(self, mus, guard: bool = True) -> np.ndarray:
        y, yp = endpoint_values(self.mesh, np.asarray(mus, dtype=float),
                                self.y0, self.yp0, forward=True, guard=guard)
        return y * self.bc.cos_beta + yp * self.bc.sin_beta


def char_function(q: Potential, bc: BoundaryParams, mu: float,
                  grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """Boundary defect at x = pi of the left-normalized solution."""
    engine = _CharEngine(q, bc, grid_size)
    return float(engine.phi_batch([mu])[0])


def char_function_right(q: Potential, bc: BoundaryParams, mu: float,
                        grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """The same zeros computed from the right-normalized solution.

    Constancy of the Wronskian of phi and psi gives
        Phi(mu) = -[psi(0) cos(alpha) + psi'(0) sin(alpha)],
    so this equals char_function up to solver tolerance.
    """
    mesh = build_mesh(q, grid_size)
    y, yp = endpoint_values(mesh, [mu], bc.sin_beta, -bc.cos_beta, forward=False)
    return float(-(y[0] * bc.cos_alpha + yp[0] * bc.sin_alpha))


def count_interior_zeros(trace: SolutionTrace) -> int:
    """Sign changes of the trace strictly inside (0, pi)."""
    interior = trace.y[1:-1]
    s = interior[interior != 0.0]
    if s.size < 2:
        return 0
    return int(np.sum(s[:-1] * s[1:] < 0.0))


def eigenfunction(pair: Eigenpair, q: Potential, bc: BoundaryParams,
                  grid_size: int = DEFAULT_GRID_SIZE) -> SolutionTrace:
    """Trace of the left-normalized eigenfunction at the pair's eigenvalue."""
    mesh = build_mesh(q, grid_size)
    return _trace(mesh, pair.mu, bc.sin_alpha, -bc.cos_alpha, forward=True)


def eigenfunction_right(pair: Eigenpair, q: Potential, bc: BoundaryParams,
                        grid_size: int = DEFAULT_GRID_SIZE) -> SolutionTrace:
    """Trace of the right-normalized eigenfunction at the pair's eigenvalue."""
    mesh = build_mesh(q, grid_size)
    return _trace(mesh, pair.mu, bc.sin_beta, -bc.cos_beta, forward=False)


# ---------------------------------------------------------------------------
# bracketing
# ---------------------------------------------------------------------------


def _scan_floor(q: Potential) -> float:
    n1 = q.norm1()
    return -n1 * (1.0 + n1) - 1.0


def _oscillation_index(engine: _CharEngine, mu: float) -> int:
    """Number of eigenvalues strictly below mu.

    Counts interior zeros of the shooting solution while renormalizing the
    state (zeros and the terminal direction are scale-invariant), then adds
    one if the terminal phase fragment has passed the right boundary angle.
    """
    mesh = engine.mesh
    y, yp = engine.y0, engine.yp0
    zeros = 0
    prev_sign = 1.0 if y > 0 else (-1.0 if y < 0 else 0.0)
    for i in range(len(mesh.h)):
        w = mu - mesh.qmid[i]
        C, S = _step_coeffs_scalar(w, mesh.h[i])
        y, yp = C * y + S * yp, -w * S * y + C * yp
        scale = max(abs(y), abs(yp))
        if scale > 1e100:
            y /= scale
            yp /= scale
        if y != 0.0:
            s = 1.0 if y > 0 else -1.0
            if prev_sign != 0.0 and s != prev_sign:
                zeros += 1
            prev_sign = s
    angle = math.atan2(y, yp)
    if angle <= 0.0:
        angle += PI
    return zeros + (1 if angle > PI - engine.bc.beta else 0)


def _bracket_by_counting(engine: _CharEngine, n: int, hint_hi: float) -> tuple[float, float]:
    """Interval holding exactly the n-th eigenvalue, found by index bisection."""
    floor = _scan_floor(engine.q)
    if _oscillation_index(engine, floor) != 0:
        raise BracketError(
            f"lower spectral bound {floor:.3f} is not below the whole spectrum")
    hi = max(hint_hi, floor + 1.0)
    for _ in range(64):
        if _oscillation_index(engine, hi) >= n + 1:
            break
        hi = (sqrt(max(hi, 0.0)) + 1.5) ** 2
    else:
        raise BracketError(f"could not find {n + 1} eigenvalues below mu = {hi:.3f}")
    a, na = floor, 0
    b, nb = hi, _oscillation_index(engine, hi)
    while not (na == n and nb == n + 1):
        if b - a <= 1e-8:
            raise BracketError(
                f"eigenvalues cluster below resolution near mu = {a:.9f}")
        mid = 0.5 * (a + b)
        nm = _oscillation_index(engine, mid)
        if nm <= n:
            a, na = mid, nm
        else:
            b, nb = mid, nm
    return (a, b)


def _asymptotic_center(n: int, delta_value: float, meanq: float) -> float:
    nu = n + delta_value
    return nu + meanq / (2.0 * nu)


def _low_hint(engine: _CharEngine, meanq: float) -> float:
    d2 = delta_for_index(2, engine.bc)
    return max((_asymptotic_center(2, d2.value, meanq) - BRACKET_HALF_WIDTHS[0]) ** 2, 1.0)


def bracket_eigenvalue(q: Potential, bc: BoundaryParams, n: int,
                       grid_size: int = DEFAULT_GRID_SIZE) -> tuple[float, float]:
    """A sign-change interval of Phi around the n-th eigenvalue.

    Indices n >= 2 use the asymptotic frequency with a widening ladder;
    n in {0, 1} are isolated by oscillation-index bisection upward from the
    lower spectral bound.
    """
    engine = _CharEngine(q, bc, grid_size)
    meanq = mean_q(q)
    if n < 2:
        return _bracket_by_counting(engine, n, _low_hint(engine, meanq))
    d = delta_for_index(n, bc)
    return _asymptotic_bracket(engine, n, d.value, meanq)


def _asymptotic_bracket(engine: _CharEngine, n: int, delta_value: float,
                        meanq: float) -> tuple[float, float]:
    lam_c = _asymptotic_center(n, delta_value, meanq)
    if lam_c < 0.5:
        raise BracketError(
            f"asymptotic frequency {lam_c:.3f} too small for index {n}; "
            "potential outside the asymptotic regime")
    for w in BRACKET_HALF_WIDTHS:
        lo = max(lam_c - w, 1e-3) ** 2
        hi = (lam_c + w) ** 2
        vals = engine.phi_batch([lo, hi])
        if vals[0] == 0.0 or vals[1] == 0.0 or vals[0] * vals[1] < 0.0:
            return (lo, hi)
    raise BracketError(
        f"no sign change around index {n} within the widening limit "
        f"(lambda center {lam_c:.6f})")


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------


def _refine_batch(engine: _CharEngine, lo: np.ndarray, hi: np.ndarray, tol: float):
    """Bisection to a narrow window, then guarded secant, per column.

    Returns (mu, residual, bracket_lo, bracket_hi).
    """
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    flo = engine.phi_batch(lo)
    fhi = engine.phi_batch(hi)
    collapse = flo == 0.0
    hi = np.where(collapse, lo, hi)
    fhi = np.where(collapse, 0.0, fhi)
    collapse = fhi == 0.0
    lo = np.where(collapse, hi, lo)
    flo = np.where(collapse, 0.0, flo)

    for _ in range(80):
        if np.max(hi - lo) <= BISECT_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        fm = engine.phi_batch(mid)
        zero = fm == 0.0
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
        fhi = np.where(same, fm, fhi)
        lo = np.where(zero, mid, lo)
        hi = np.where(zero, mid, hi)
        flo = np.where(zero, 0.0, flo)
        fhi = np.where(zero, 0.0, fhi)

    x0, f0 = lo.copy(), flo.copy()
    x1, f1 = hi.copy(), fhi.copy()
    for _ in range(60):
        done = (hi - lo) <= tol
        if np.all(done):
            break
        denom = f1 - f0
        safe = denom != 0.0
        step = np.where(safe, f1 * (x1 - x0) / np.where(safe, denom, 1.0), 0.0)
        x2 = x1 - step
        bad = ~np.isfinite(x2) | (x2 <= lo) | (x2 >= hi)
        x2 = np.where(bad, 0.5 * (lo + hi), x2)
        x2 = np.where(done, x1, x2)
        f2 = engine.phi_batch(x2)
        zero = (f2 == 0.0) & ~done
        same = (np.sign(f2) == np.sign(flo)) & ~done
        lo = np.where(same, x2, lo)
        flo = np.where(same, f2, flo)
        hi = np.where(~same & ~done, x2, hi)
        fhi = np.where(~same & ~done, f2, fhi)
        lo = np.where(zero, x2, lo)
        hi = np.where(zero, x2, hi)
        flo = np.where(zero, 0.0, flo)
        fhi = np.where(zero, 0.0, fhi)
        x0, f0 = x1, f1
        x1, f1 = x2, f2

    pick_lo = np.abs(flo) <= np.abs(fhi)
    mu = np.where(pick_lo, lo, hi)
    residual = np.where(pick_lo, np.abs(flo), np.abs(fhi))
    return mu, residual, lo, hi


# ---------------------------------------------------------------------------
# assembled searches
# ---------------------------------------------------------------------------


def _recovery_bracket(engine: _CharEngine, n: int, meanq: float) -> tuple[float, float]:
    """Index-exact bracket used when the asymptotic one misses or miscounts."""
    lam_hi = n + 2.5 + sqrt(abs(meanq) + 1.0)
    return _bracket_by_counting(engine, n, lam_hi * lam_hi)


def _certify(engine: _CharEngine, mu: float, n: int) -> int:
    tr = _trace(engine.mesh, float(mu), engine.y0, engine.yp0, forward=True)
    return count_interior_zeros(tr)


def _build_pair(n: int, mu: float, residual: float, bracket: tuple[float, float],
                delta: DeltaValue, zeros: int) -> Eigenpair:
    mu = float(mu)
    return Eigenpair(
        n=n, mu=mu, lam=sqrt(abs(mu)), mu_negative=mu < 0.0, delta=delta,
        bracket=(float(bracket[0]), float(bracket[1])),
        char_residual=float(residual), zeros=zeros,
    )


def find_eigenvalue(q: Potential, bc: BoundaryParams, n: int,
                    tol: float = DEFAULT_ROOT_TOL,
                    grid_size: int = DEFAULT_GRID_SIZE) -> Eigenpair:
    """Locate and certify the n-th eigenvalue.

    The root is isolated by bracketing, refined to a mu window of width tol,
    and certified by the interior zero count of its eigenfunction; a
    miscount triggers one full rescan of the mu axis before giving up.
    """
    if not (0 <= n <= MAX_INDEX):
        raise ValueError(f"index must lie in [0, {MAX_INDEX}], got {n}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    engine = _CharEngine(q, bc, grid_size)
    meanq = mean_q(q)
    delta = delta_for_index(n, bc)

    if n < 2:
        bracket = _bracket_by_counting(engine, n, _low_hint(engine, meanq))
    else:
        try:
            bracket = _asymptotic_bracket(engine, n, delta.value, meanq)
        except BracketError:
            bracket = _recovery_bracket(engine, n, meanq)

    mu_arr, res_arr, lo, hi = _refine_batch(
        engine, np.array([bracket[0]]), np.array([bracket[1]]), tol)
    mu, residual = float(mu_arr[0]), float(res_arr[0])
    zeros = _certify(engine, mu, n)
    if zeros != n:
        bracket = _recovery_bracket(engine, n, meanq)
        mu_arr, res_arr, lo, hi = _refine_batch(
            engine, np.array([bracket[0]]), np.array([bracket[1]]), tol)
        mu, residual = float(mu_arr[0]), float(res_arr[0])
        zeros = _certify(engine, mu, n)
        if zeros != n:
            raise OscillationMismatchError(
                f"eigenfunction at mu = {mu:.9f} has {zeros} interior zeros, expected {n}")
    if n >= 2 and mu <= 0.0:
        raise UnsupportedRegimeError(
            f"mu_{n} = {mu:.6f} <= 0; asymptotic indexing assumes positive "
            "eigenvalues from index 2 on")
    return _build_pair(n, mu, residual, (float(lo[0]), float(hi[0])), delta, zeros)


def find_spectrum(q: Potential, bc: BoundaryParams, n_max: int,
                  tol: float = DEFAULT_ROOT_TOL,
                  grid_size: int = DEFAULT_GRID_SIZE) -> Spectrum:
    """All certified eigenpairs for indices 0 through n_max.

    Brackets, refinement sweeps, and oscillation certificates all run as
    batches over the index range.
    """
    if not (0 <= n_max <= MAX_INDEX):
        raise ValueError(f"n_max must lie in [0, {MAX_INDEX}], got {n_max}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    engine = _CharEngine(q, bc, grid_size)
    meanq = mean_q(q)
    deltas = [delta_for_index(n, bc) for n in range(n_max + 1)]

    brackets: list[tuple[float, float]] = []
    hint = _low_hint(engine, meanq)
    for n in range(min(2, n_max + 1)):
        brackets.append(_bracket_by_counting(engine, n, hint))

    for n in range(2, n_max + 1):
        try:
            brackets.append(_asymptotic_bracket(engine, n, deltas[n].value, meanq))
        except BracketError:
            brackets.append(_recovery_bracket(engine, n, meanq))

    lo = np.array([b[0] for b in brackets])
    hi = np.array([b[1] for b in brackets])
    mus, residuals, lo_f, hi_f = _refine_batch(engine, lo, hi, tol)

    traces = y_values_batch(engine.mesh, mus, engine.y0, engine.yp0)
    zero_counts = _batch_zero_counts(traces)

    pairs: list[Eigenpair] = []
    for n in range(n_max + 1):
        mu, residual, zeros = float(mus[n]), float(residuals[n]), int(zero_counts[n])
        bracket = (float(lo_f[n]), float(hi_f[n]))
        if zeros != n:
            rb = _recovery_bracket(engine, n, meanq)
            mu_a, res_a, lo_a, hi_a = _refine_batch(
                engine, np.array([rb[0]]), np.array([rb[1]]), tol)
            mu, residual = float(mu_a[0]), float(res_a[0])
            bracket = (float(lo_a[0]), float(hi_a[0]))
            zeros = _certify(engine, mu, n)
            if zeros != n:
                raise OscillationMismatchError(
                    f"eigenfunction at index {n} has {zeros} interior zeros")
        pairs.append(_build_pair(n, mu, residual, bracket, deltas[n], zeros))

    if n_max >= 2 and pairs[2].mu <= 0.0:
        raise UnsupportedRegimeError(
            f"mu_2 = {pairs[2].mu:.6f} <= 0; potential outside the supported regime")
    return Spectrum(q=q, bc=bc, pairs=pairs)


def _batch_zero_counts(traces: np.ndarray) -> np.ndarray:
    """Interior sign changes per column of a (nodes, mus) value array."""
    counts = np.empty(traces.shape[1], dtype=int)
    for j in range(traces.shape[1]):
        col = traces[1:-1, j]
        s = col[col != 0.0]
        counts[j] = int(np.sum(s[:-1] * s[1:] < 0.0)) if s.size >= 2 else 0
    return counts
