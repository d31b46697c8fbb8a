"""Norming constants, the oscillatory correction integral, and model values.

The norming constants are the squared L2 norms of the endpoint-normalized
eigenfunctions,

    a_n = int_0^pi phi_n^2,    b_n = int_0^pi psi_n^2.

Their large-n behaviour is governed by the correction integral

    ae_n = -(1/2) int_0^pi (pi - t) q(t) sin(2 (n + delta_n) t) dt,

entering through the model value

    model_a = (pi/2) [1 + 2 ae_n / (pi nu)] sin^2(alpha)
            + (pi / (2 nu^2)) [1 + 2 ae_n / (pi nu)] cos^2(alpha),

with nu = n + delta_n; the defect a_n - model_a decays like 1/n^2.  Both
bracket denominators use delta_n itself.  b_n satisfies the mirrored model
with beta in place of alpha and the same ae_n.

Remainder extraction divides the measured defect by the active bracket
weight.  When sin(alpha) and cos(alpha) are both nonzero the two bracket
remainders cannot be separated from a_n alone; extraction then reports the
sine-bracket normalization and flags the value as combined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delta import DeltaValue
from .odesolve import DEFAULT_GRID_SIZE, build_mesh, propagate_with_norm
from .potential import PI, BoundaryParams, Potential, integrate
from .spectrum import Eigenpair, Spectrum

DEFAULT_AE_TOL = 1e-10


def _delta_value(delta) -> float:
    return float(delta.value) if isinstance(delta, DeltaValue) else float(delta)


@dataclass
class NormingRecord:
    """Measured and modelled norming data for one index.

    r_n / rtilde_n are the remainders extracted from a_n, p_n / ptilde_n
    their mirrors extracted from b_n.  extraction_a and extraction_b say
    which bracket the value was normalized against: "sin", "cos", or
    "combined" when the brackets are not separately identifiable.
    """

    n: int
    a_n: float
    b_n: float
    ae_n: float
    model_a: float
    model_b: float
    r_n: float
    rtilde_n: float
    p_n: float
    ptilde_n: float
    extraction_a: str
    extraction_b: str


def norming_a(q: Potential, bc: BoundaryParams, pair: Eigenpair,
              grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """Squared L2 norm of the left-normalized eigenfunction."""
    mesh = build_mesh(q, grid_size)
    _, _, acc = propagate_with_norm(mesh, [pair.mu], bc.sin_alpha, -bc.cos_alpha,
                                    forward=True)
    return float(acc[0])


def norming_b(q: Potential, bc: BoundaryParams, pair: Eigenpair,
              grid_size: int = DEFAULT_GRID_SIZE) -> float:
    """Squared L2 norm of the right-normalized eigenfunction."""
    mesh = build_mesh(q, grid_size)
    _, _, acc = propagate_with_norm(mesh, [pair.mu], bc.sin_beta, -bc.cos_beta,
                                    forward=False)
    return float(acc[0])


def norming_a_batch(q: Potential, bc: BoundaryParams, mus,
                    grid_size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    mesh = build_mesh(q, grid_size)
    _, _, acc = propagate_with_norm(mesh, mus, bc.sin_alpha, -bc.cos_alpha, forward=True)
    return acc


def norming_b_batch(q: Potential, bc: BoundaryParams, mus,
                    grid_size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    mesh = build_mesh(q, grid_size)
    _, _, acc = propagate_with_norm(mesh, mus, bc.sin_beta, -bc.cos_beta, forward=False)
    return acc


def ae_n(q: Potential, delta, n: int, tol: float = DEFAULT_AE_TOL) -> float:
    """Correction integral at the asymptotic frequency 2 (n + delta_n)."""
    if n < 2:
        raise ValueError(f"correction integral is defined for n >= 2, got {n}")
    nu = n + _delta_value(delta)
    val = integrate(lambda t: (PI - t) * q(t) * np.sin(2.0 * nu * t), 0.0, PI, tol,
                    freq=2.0 * nu, breakpoints=q.breakpoints)
    return -0.5 * val


def ae_tilde_n(q: Potential, lam: float, tol: float = DEFAULT_AE_TOL) -> float:
    """Correction integral at the true eigenfrequency 2 lambda_n."""
    val = integrate(lambda t: (PI - t) * q(t) * np.sin(2.0 * lam * t), 0.0, PI, tol,
                    freq=2.0 * lam, breakpoints=q.breakpoints)
    return -0.5 * val


def _model(sin_v: float, cos_v: float, delta, ae: float, n: int) -> float:
    nu = n + _delta_value(delta)
    corr = 1.0 + 2.0 * ae / (PI * nu)
    return (PI / 2.0) * corr * sin_v * sin_v + (PI / (2.0 * nu * nu)) * corr * cos_v * cos_v


def model_a(bc: BoundaryParams, delta, ae: float, n: int) -> float:
    """Model value of a_n with both remainders set to zero."""
    if n < 2:
        raise ValueError(f"model is defined for n >= 2, got {n}")
    return _model(bc.sin_alpha, bc.cos_alpha, delta, ae, n)


def model_b(bc: BoundaryParams, delta, ae: float, n: int) -> float:
    """Model value of b_n with both remainders set to zero."""
    if n < 2:
        raise ValueError(f"model is defined for n >= 2, got {n}")
    return _model(bc.sin_beta, bc.cos_beta, delta, ae, n)


def _extract(defect: float, sin_v: float, cos_v: float, nu: float):
    if sin_v != 0.0 and cos_v == 0.0:
        return defect / ((PI / 2.0) * sin_v * sin_v), math.nan, "sin"
    if sin_v == 0.0:
        return math.nan, defect / (PI / (2.0 * nu * nu)), "cos"
    return defect / ((PI / 2.0) * sin_v * sin_v), math.nan, "combined"


def extract_remainders(a_value: float, ae: float, delta, bc: BoundaryParams, n: int):
    """Remainders (r_n, rtilde_n, mode) implied by a measured a_n.

    The measured defect D = a_n - model_a is divided by the sine-bracket
    weight (pi/2) sin^2(alpha) whenever sin(alpha) is nonzero, or by the
    cosine-bracket weight pi / (2 nu^2) in the Dirichlet case.  mode is
    "combined" when both brackets are active and the split is not
    identifiable; plugging the reported remainder back into its bracket
    reproduces a_n exactly either way.
    """
    if n < 2:
        raise ValueError(f"extraction is defined for n >= 2, got {n}")
    nu = n + _delta_value(delta)
    defect = a_value - model_a(bc, delta, ae, n)
    return _extract(defect, bc.sin_alpha, bc.cos_alpha, nu)


def norming_record(q: Potential, bc: BoundaryParams, pair: Eigenpair,
                   grid_size: int = DEFAULT_GRID_SIZE,
                   tol: float = DEFAULT_AE_TOL) -> NormingRecord:
    """Assemble the full measured-versus-model record for one eigenpair."""
    return norming_records(q, bc, [pair], grid_size=grid_size, tol=tol)[0]


def norming_records(q: Potential, bc: BoundaryParams, pairs,
                    grid_size: int = DEFAULT_GRID_SIZE,
                    tol: float = DEFAULT_AE_TOL) -> list[NormingRecord]:
    """Batched records for eigenpairs (or a whole Spectrum).

    Indices below 2 get the measured norms with the model fields set to
    NaN, since the correction integral and model are asymptotic objects.
    """
    if isinstance(pairs, Spectrum):
        pairs = pairs.pairs
    pairs = list(pairs)
    mus = np.array([p.mu for p in pairs])
    a_vals = norming_a_batch(q, bc, mus, grid_size)
    b_vals = norming_b_batch(q, bc, mus, grid_size)

    records = []
    for p, a_v, b_v in zip(pairs, a_vals, b_vals):
        if p.n < 2:
            records.append(NormingRecord(
                n=p.n, a_n=float(a_v), b_n=float(b_v), ae_n=math.nan,
                model_a=math.nan, model_b=math.nan,
                r_n=math.nan, rtilde_n=math.nan, p_n=math.nan, ptilde_n=math.nan,
                extraction_a="none", extraction_b="none"))
            continue
        ae = ae_n(q, p.delta, p.n, tol)
        ma = model_a(bc, p.delta, ae, p.n)
        mb = model_b(bc, p.delta, ae, p.n)
        nu = p.n + p.delta.value
        r, rt, mode_a = _extract(float(a_v) - ma, bc.sin_alpha, bc.cos_alpha, nu)
        pv, pt, mode_b = _extract(float(b_v) - mb, bc.sin_beta, bc.cos_beta, nu)
        records.append(NormingRecord(
            n=p.n, a_n=float(a_v), b_n=float(b_v), ae_n=ae, model_a=ma, model_b=mb,
            r_n=r, rtilde_n=rt, p_n=pv, ptilde_n=pt,
            extraction_a=mode_a, extraction_b=mode_b))
    return records
