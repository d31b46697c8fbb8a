"""Initial-value solver for -y'' + q y = mu y and the series oracle.

The stepping scheme freezes the coefficient w = mu - q at each mesh
interval's midpoint and applies the exact constant-coefficient propagator
(trigonometric for w > 0, hyperbolic for w < 0, linear drift at w = 0).
The propagator is exact in mu, so phase accuracy does not degrade for
highly oscillatory solutions; the only discretization error comes from the
midpoint freezing of q, and that vanishes for potentials that are constant
on mesh intervals (zero, constant, and step potentials with the jump on a
mesh node).  Each step also has a closed form for the integral of y^2
across the interval, which spectral norm computations accumulate for free.

Batches of spectral parameters propagate together: the transfer matrices of
all intervals are built as one array and contracted by pairwise products,
which is how characteristic-function scans and bisection sweeps stay cheap.

The independent oracle is the successive-approximation series for the
solution vanishing at the origin, built from iterated Volterra integrals
with an explicit tail bound, so solver and series can certify each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError
from .potential import PI, Potential, _snapped_sincos, integrate

DEFAULT_GRID_SIZE = 4096
BLOWUP_BOUND = 1e12

_SERIES_Z = 1e-4
_CHUNK = 256


@dataclass
class SolutionTrace:
    """Solution values and derivatives on an increasing grid in [0, pi]."""

    grid: np.ndarray
    y: np.ndarray
    yprime: np.ndarray
    mu: float


@dataclass
class FundamentalSystem:
    """The four solutions normalized at the endpoints.

    y1(0) = 1, y1'(0) = 0;  y2(0) = 0, y2'(0) = 1;
    y3(pi) = 1, y3'(pi) = 0;  y4(pi) = 0, y4'(pi) = 1.
    """

    y1: SolutionTrace
    y2: SolutionTrace
    y3: SolutionTrace
    y4: SolutionTrace


@dataclass
class PicardResult:
    """Partial sum of the series solution plus its truncation certificate.

    tail_bound dominates the sum of all omitted terms at x = pi.
    """

    trace: SolutionTrace
    tail_bound: float
    terms: int


@dataclass
class Mesh:
    """Propagation mesh: nodes, interval widths, midpoint potential values."""

    nodes: np.ndarray
    h: np.ndarray
    qmid: np.ndarray


def build_mesh(q: Potential, grid_size: int = DEFAULT_GRID_SIZE) -> Mesh:
    """Uniform mesh on [0, pi] with the potential's breakpoints inserted."""
    if grid_size < 64:
        raise ValueError(f"grid_size must be >= 64, got {grid_size}")
    nodes = np.linspace(0.0, PI, grid_size + 1)
    bps = [b for b in q.breakpoints if 0.0 < b < PI]
    if bps:
        extra = [b for b in bps if np.min(np.abs(nodes - b)) > 1e-12]
        if extra:
            nodes = np.unique(np.concatenate([nodes, np.asarray(extra)]))
    h = np.diff(nodes)
    qmid = np.asarray(q((nodes[:-1] + nodes[1:]) / 2.0), dtype=float)
    return Mesh(nodes=nodes, h=h, qmid=qmid)


def _step_coeffs(w, h):
    """Propagator entries C, S for one interval of width h and coefficient w.

    C and S solve u'' = -w u with (C, C') = (1, 0) and (S, S') = (0, 1) at
    the interval start, evaluated at the end.  Series branch keeps the
    formulas smooth through w = 0.
    """
    z = w * h * h
    small = np.abs(z) < _SERIES_Z
    zsafe_p = np.where(z >= _SERIES_Z, z, 1.0)
    zsafe_m = np.where(z <= -_SERIES_Z, -z, 1.0)
    th_p = np.sqrt(zsafe_p)
    th_m = np.sqrt(zsafe_m)
    C = np.where(
        small,
        1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0,
        np.where(z > 0, np.cos(th_p), np.cosh(th_m)),
    )
    S = np.where(
        small,
        h * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0),
        np.where(z > 0, h * np.sin(th_p) / th_p, h * np.sinh(th_m) / th_m),
    )
    return C, S


def _norm_weights(w, h, C, S):
    """Quadratic-form weights for the exact integral of y^2 over one step.

    With left values (y, y') the step contributes
        ICC y^2 + 2 ICS y y' + ISS y'^2.
    The identities ICC = h/2 + CS/2 and ICS = S^2/2 hold in every branch;
    ISS needs a series fallback near w = 0.
    """
    z = w * h * h
    ICC = h / 2.0 + C * S / 2.0
    ICS = S * S / 2.0
    small = np.abs(z) < _SERIES_Z
    wsafe = np.where(small, 1.0, w)
    closed = (h / 2.0 - C * S / 2.0) / wsafe
    series = h * h * h * (1.0 / 3.0 - 2.0 * z / 15.0 + 4.0 * z * z / 315.0)
    ISS = np.where(small, series, closed)
    return ICC, ICS, ISS


def _step_coeffs_scalar(w: float, h: float) -> tuple[float, float]:
    z = w * h * h
    if abs(z) < _SERIES_Z:
        C = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0
        S = h * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0)
    elif z > 0.0:
        th = math.sqrt(z)
        C = math.cos(th)
        S = h * math.sin(th) / th
    else:
        th = math.sqrt(-z)
        C = math.cosh(th)
        S = h * math.sinh(th) / th
    return C, S


def _transfer_reduce(T: np.ndarray) -> np.ndarray:
    """Contract per-interval transfer matrices; T[0] is applied first."""
    while T.shape[0] > 1:
        n = T.shape[0]
        paired = np.matmul(T[1 : n - (n % 2) : 2], T[0 : n - (n % 2) : 2])
        if n % 2:
            T = np.concatenate([paired, T[-1:]], axis=0)
        else:
            T = paired
    return T[0]


def _endpoint_chunk(h, qmid, mus, y0, yp0, forward):
    w = mus[None, :] - qmid[:, None]
    hcol = h[:, None]
    C, S = _step_coeffs(w, hcol)
    n_int, m = w.shape
    T = np.empty((n_int, m, 2, 2))
    if forward:
        T[:, :, 0, 0] = C
        T[:, :, 0, 1] = S
        T[:, :, 1, 0] = -w * S
        T[:, :, 1, 1] = C
    else:
        # inverse propagators, applied from the last interval backwards
        T[:, :, 0, 0] = C[::-1]
        T[:, :, 0, 1] = -S[::-1]
        T[:, :, 1, 0] = (w * S)[::-1]
        T[:, :, 1, 1] = C[::-1]
    P = _transfer_reduce(T)
    y = P[:, 0, 0] * y0 + P[:, 0, 1] * yp0
    yp = P[:, 1, 0] * y0 + P[:, 1, 1] * yp0
    return y, yp


def endpoint_values(mesh: Mesh, mus, y0: float, yp0: float, *, forward: bool = True,
                    guard: bool = True):
    """Propagate (y0, yp0) across the whole mesh for a batch of mu values.

    Returns (y, y') at x = pi when forward, at x = 0 otherwise.  With guard
    set, raises BlowUpError if any final value escapes the overflow bound;
    scans that only need signs of deeply hyperbolic values run unguarded.
    """
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    ys = np.empty_like(mus)
    yps = np.empty_like(mus)
    for lo in range(0, mus.size, _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, mus.size))
        ys[sl], yps[sl] = _endpoint_chunk(mesh.h, mesh.qmid, mus[sl], y0, yp0, forward)
    if guard and (
        not np.all(np.isfinite(ys)) or not np.all(np.isfinite(yps))
        or np.max(np.abs(ys)) > BLOWUP_BOUND or np.max(np.abs(yps)) > BLOWUP_BOUND
    ):
        raise BlowUpError(
            "solution exceeded the overflow guard; spectral parameter far outside "
            "the admissible range"
        )
    return ys, yps


def propagate_with_norm(mesh: Mesh, mus, y0: float, yp0: float, *, forward: bool = True):
    """Endpoint values plus the exact accumulated integral of y^2 over [0, pi].

    Vectorized over a batch of mu values.
    """
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    y = np.full(mus.shape, float(y0))
    yp = np.full(mus.shape, float(yp0))
    acc = np.zeros(mus.shape)
    idx = range(len(mesh.h)) if forward else range(len(mesh.h) - 1, -1, -1)
    for i in idx:
        w = mus - mesh.qmid[i]
        hi = mesh.h[i]
        C, S = _step_coeffs(w, hi)
        if forward:
            ICC, ICS, ISS = _norm_weights(w, hi, C, S)
            acc += ICC * y * y + 2.0 * ICS * y * yp + ISS * yp * yp
            y, yp = C * y + S * yp, -w * S * y + C * yp
        else:
            y, yp = C * y - S * yp, w * S * y + C * yp
            ICC, ICS, ISS = _norm_weights(w, hi, C, S)
            acc += ICC * y * y + 2.0 * ICS * y * yp + ISS * yp * yp
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_BOUND:
        raise BlowUpError("solution exceeded the overflow guard in norm propagation")
    return y, yp, acc


def _trace(mesh: Mesh, mu: float, y0: float, yp0: float, forward: bool) -> SolutionTrace:
    n = len(mesh.h)
    h = mesh.h
    qmid = mesh.qmid
    ys = np.empty(n + 1)
    yps = np.empty(n + 1)
    if forward:
        ys[0], yps[0] = y0, yp0
        y, yp = float(y0), float(yp0)
        for i in range(n):
            w = mu - qmid[i]
            C, S = _step_coeffs_scalar(w, h[i])
            y, yp = C * y + S * yp, -w * S * y + C * yp
            if abs(y) > BLOWUP_BOUND or abs(yp) > BLOWUP_BOUND:
                raise BlowUpError(
                    f"solution blew up at x = {mesh.nodes[i + 1]:.6f} for mu = {mu}"
                )
            ys[i + 1], yps[i + 1] = y, yp
    else:
        ys[n], yps[n] = y0, yp0
        y, yp = float(y0), float(yp0)
        for i in range(n - 1, -1, -1):
            w = mu - qmid[i]
            C, S = _step_coeffs_scalar(w, h[i])
            y, yp = C * y - S * yp, w * S * y + C * yp
            if abs(y) > BLOWUP_BOUND or abs(yp) > BLOWUP_BOUND:
                raise BlowUpError(
                    f"solution blew up at x = {mesh.nodes[i]:.6f} for mu = {mu}"
                )
            ys[i], yps[i] = y, yp
    return SolutionTrace(grid=mesh.nodes.copy(), y=ys, yprime=yps, mu=float(mu))


def y_values_batch(mesh: Mesh, mus, y0: float, yp0: float) -> np.ndarray:
    """Forward solution values at every node for a batch of mu, shape (nodes, mus).

    Used for oscillation counting across a whole spectrum in one sweep.
    """
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    y = np.full(mus.shape, float(y0))
    yp = np.full(mus.shape, float(yp0))
    out = np.empty((len(mesh.h) + 1, mus.size))
    out[0] = y
    for i in range(len(mesh.h)):
        w = mus - mesh.qmid[i]
        C, S = _step_coeffs(w, mesh.h[i])
        y, yp = C * y + S * yp, -w * S * y + C * yp
        out[i + 1] = y
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > BLOWUP_BOUND:
        raise BlowUpError("solution exceeded the overflow guard in batched trace")
    return out


def solve_ivp(q: Potential, mu: float, at_left: bool, y0: float, yp0: float,
              grid_size: int = DEFAULT_GRID_SIZE) -> SolutionTrace:
    """Solve -y'' + q y = mu y with data (y0, yp0) at x = 0 or x = pi.

    Integration runs left to right when at_left, right to left otherwise;
    the returned trace always lists the grid in increasing order.  mu may be
    negative (hyperbolic regime); no square root of mu is ever taken.
    """
    mesh = build_mesh(q, grid_size)
    return _trace(mesh, float(mu), float(y0), float(yp0), forward=at_left)


def phi(q: Potential, mu: float, alpha: float, grid_size: int = DEFAULT_GRID_SIZE) -> SolutionTrace:
    """Left-normalized solution: phi(0) = sin(alpha), phi'(0) = -cos(alpha)."""
    if not (0.0 < alpha <= PI):
        raise ValueError(f"alpha must lie in (0, pi], got {alpha}")
    s, c = _snapped_sincos(alpha)
    return solve_ivp(q, mu, True, s, -c, grid_size)


def psi(q: Potential, mu: float, beta: float, grid_size: int = DEFAULT_GRID_SIZE) -> SolutionTrace:
    """Right-normalized solution: psi(pi) = sin(beta), psi'(pi) = -cos(beta)."""
    if not (0.0 <= beta < PI):
        raise ValueError(f"beta must lie in [0, pi), got {beta}")
    s, c = _snapped_sincos(beta)
    return solve_ivp(q, mu, False, s, -c, grid_size)


def fundamental_system(q: Potential, mu: float,
                       grid_size: int = DEFAULT_GRID_SIZE) -> FundamentalSystem:
    """The four endpoint-normalized solutions at a common spectral parameter."""
    return FundamentalSystem(
        y1=solve_ivp(q, mu, True, 1.0, 0.0, grid_size),
        y2=solve_ivp(q, mu, True, 0.0, 1.0, grid_size),
        y3=solve_ivp(q, mu, False, 1.0, 0.0, grid_size),
        y4=solve_ivp(q, mu, False, 0.0, 1.0, grid_size),
    )


# ---------------------------------------------------------------------------
# series oracle
# ---------------------------------------------------------------------------


def _cumulative_simpson(vals: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral of uniformly sampled values, fourth order.

    Even nodes follow the composite Simpson chain; odd nodes add the exact
    integral of the local cubic interpolant, so their O(h^5) corrections do
    not accumulate.
    """
    n = vals.size
    out = np.zeros(n)
    if n < 2:
        return out
    if n == 2:
        out[1] = dx * 0.5 * (vals[0] + vals[1])
        return out
    if n == 3:
        out[2] = dx / 3.0 * (vals[0] + 4.0 * vals[1] + vals[2])
        out[1] = dx / 12.0 * (5.0 * vals[0] + 8.0 * vals[1] - vals[2])
        return out

    # composite Simpson over node pairs
    n_pair = (n - 1) // 2
    pair = dx / 3.0 * (vals[0 : 2 * n_pair - 1 : 2] + 4.0 * vals[1 : 2 * n_pair : 2]
                       + vals[2 : 2 * n_pair + 1 : 2])
    out[2 : 2 * n_pair + 1 : 2] = np.cumsum(pair)

    # odd nodes: cubic through the four nearest samples
    odd = np.arange(1, n, 2)
    fwd = odd[odd + 2 < n]
    out[fwd] = out[fwd - 1] + dx / 24.0 * (
        9.0 * vals[fwd - 1] + 19.0 * vals[fwd] - 5.0 * vals[fwd + 1] + vals[fwd + 2]
    )
    bwd = odd[odd + 2 >= n]
    out[bwd] = out[bwd - 1] + dx / 24.0 * (
        vals[bwd - 3] - 5.0 * vals[bwd - 2] + 19.0 * vals[bwd - 1] + 9.0 * vals[bwd]
    )
    return out


def _picard_grid(q: Potential, grid_size: int):
    """Per-segment uniform grids split at genuine jumps of q.

    Returns (nodes, segments) where each segment is (start index, q values
    covering that segment's nodes).  q is evaluated one ulp inside the
    segment at shared edges so both sides of a jump see their own limit.
    """
    jumps = sorted(j for j in q.jump_points if 0.0 < j < PI)
    cuts = [0.0] + jumps + [PI]
    parts = []
    segments = []
    start = 0
    for i, (a, b) in enumerate(zip(cuts[:-1], cuts[1:])):
        m = max(8, int(round(grid_size * (b - a) / PI)))
        seg = np.linspace(a, b, m + 1)
        pts = seg.copy()
        if a > 0.0:
            pts[0] = np.nextafter(a, PI)
        if b < PI:
            pts[-1] = np.nextafter(b, 0.0)
        qseg = np.asarray(q(pts), dtype=float)
        segments.append((start, qseg))
        parts.append(seg if i == 0 else seg[1:])
        start += m
    nodes = np.concatenate(parts)
    return nodes, segments


def _cumint_segmented(nodes: np.ndarray, segments, factor: np.ndarray) -> np.ndarray:
    """Cumulative integral over the whole grid of q(t) * factor(t).

    segments carries (start index, side-correct q values) per smooth piece;
    each piece integrates with the uniform fourth-order rule and chains its
    offset across shared nodes.
    """
    out = np.empty(nodes.size)
    offset = 0.0
    for start, qseg in segments:
        stop = start + qseg.size
        dx = nodes[start + 1] - nodes[start]
        vals = qseg * factor[start:stop]
        cum = _cumulative_simpson(vals, dx)
        out[start:stop] = offset + cum
        offset = out[stop - 1]
    return out


def picard_y2(q: Potential, lam: float, K: int,
              grid_size: int = 2 * DEFAULT_GRID_SIZE) -> PicardResult:
    """Partial sum of the series for the solution with y(0) = 0, y'(0) = 1.

    The zeroth term is sin(lam x) / lam; each further term is the Volterra
    integral of the previous one against sin(lam (x - t)) q(t) / lam,
    evaluated through its sin/cos split so only cumulative integrals are
    needed.  Requires lam >= 1.  The certificate bounds the omitted tail by
    sum over k > K of sigma0(pi)^k / (lam^(k+1) k!).
    """
    if lam < 1.0:
        raise ValueError(f"series construction requires lam >= 1, got {lam}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")

    nodes, segments = _picard_grid(q, grid_size)
    sin_l = np.sin(lam * nodes)
    cos_l = np.cos(lam * nodes)

    s_prev = sin_l / lam
    total = s_prev.copy()
    total_prime = cos_l.copy()
    for _ in range(K):
        ck = _cumint_segmented(nodes, segments, cos_l * s_prev)
        dk = _cumint_segmented(nodes, segments, sin_l * s_prev)
        s_k = (sin_l * ck - cos_l * dk) / lam
        total += s_k
        total_prime += cos_l * ck + sin_l * dk
        s_prev = s_k

    sigma0_pi = q.norm1()
    tail = 0.0
    term = sigma0_pi ** (K + 1) / (lam ** (K + 2) * math.factorial(K + 1))
    k = K + 1
    while term > 0.0 and k < K + 200:
        tail += term
        term *= sigma0_pi / (lam * (k + 1))
        if term < tail * 1e-18:
            tail += term
            break
        k += 1

    trace = SolutionTrace(grid=nodes, y=total, yprime=total_prime, mu=lam * lam)
    return PicardResult(trace=trace, tail_bound=float(tail), terms=K)


# ---------------------------------------------------------------------------
# leading asymptotic kernels
# ---------------------------------------------------------------------------


def kernel_A(q: Potential, lam: float, x: float, tol: float = 1e-10) -> float:
    """Leading oscillatory kernel of the cosine-normalized solution.

    A(x, lam) = sin(lam x) * int_0^x q + int_0^x q(t) sin(lam (x - 2t)) dt.
    2 lam (y1 - cos(lam x)) - A is O(1/lam) uniformly on [0, pi].
    """
    if lam < 1.0:
        raise ValueError(f"kernel is defined for lam >= 1, got {lam}")
    bps = q.breakpoints
    i1 = integrate(q, 0.0, x, tol, breakpoints=bps)
    i2 = integrate(lambda t: q(t) * np.sin(lam * (x - 2.0 * t)), 0.0, x, tol,
                   freq=2.0 * lam, breakpoints=bps)
    return math.sin(lam * x) * i1 + i2


def kernel_B(q: Potential, lam: float, x: float, tol: float = 1e-10) -> float:
    """Leading oscillatory kernel of the sine-normalized solution.

    B(x, lam) = cos(lam x) * int_0^x q - int_0^x q(t) cos(lam (x - 2t)) dt.
    """
    if lam < 1.0:
        raise ValueError(f"kernel is defined for lam >= 1, got {lam}")
    bps = q.breakpoints
    i1 = integrate(q, 0.0, x, tol, breakpoints=bps)
    i2 = integrate(lambda t: q(t) * np.cos(lam * (x - 2.0 * t)), 0.0, x, tol,
                   freq=2.0 * lam, breakpoints=bps)
    return math.cos(lam * x) * i1 - i2
