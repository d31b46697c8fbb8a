"""Potentials on [0, pi], boundary parameters, and the shared quadrature engine.

A potential is a real, integrable function q on [0, pi].  Two representations
are supported: a small family of named analytic potentials (zero, constant,
step, trigonometric test polynomials) and piecewise-linear interpolants of
sampled data.  Potentials carrying integrable singularities must be supplied
pre-sampled on a locally refined grid.

The quadrature engine is an adaptive composite rule built on two-point
Gauss panels.  Gauss nodes are strictly interior to each panel, so integrands
that jump at known breakpoints (a step potential, say) are integrated exactly
once the breakpoints are used as panel edges; no one-sided limits are needed.
Oscillatory integrands are seeded with at least eight panels per period of
the supplied frequency hint before refinement starts.

Everything here is immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureError

PI = math.pi

DEFAULT_QUAD_TOL = 1e-10

_GAUSS_OFFSET = 0.5 / math.sqrt(3.0)
_NAMED_POTENTIALS = ("zero", "constant", "step", "smooth-test")
_DOMAIN_SLACK = 1e-12


def _gauss2(f, a, b):
    """Two-point Gauss estimate of the integral of f over [a, b], vectorized."""
    c = 0.5 * (a + b)
    d = (b - a) * _GAUSS_OFFSET
    return 0.5 * (b - a) * (f(c - d) + f(c + d))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    u: float,
    v: float,
    tol: float = DEFAULT_QUAD_TOL,
    *,
    freq: float = 0.0,
    breakpoints: Sequence[float] = (),
    min_panels: int = 8,
    max_refine: int = 28,
) -> float:
    """Integrate f over [u, v] to an absolute error target of tol.

    f must accept numpy arrays.  ``freq`` is the angular frequency of the
    fastest oscillation of the integrand (the w in sin(w t)); the initial
    panel count is chosen so each period gets at least eight panels.
    ``breakpoints`` are abscissae where f is allowed to jump or kink; they
    are forced to be panel edges.

    Raises QuadratureError when panels fail to converge within the
    refinement budget, carrying the last estimate and its error bound.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if u > v:
        raise ValueError(f"integration bounds out of order: [{u}, {v}]")
    if u == v:
        return 0.0

    width = v - u
    periods = freq * width / (2.0 * PI)
    n0 = max(int(min_panels), 8 * int(math.ceil(periods)) if periods > 0 else 0)
    n0 = min(max(n0, 1), 1 << 14)
    edges = np.linspace(u, v, n0 + 1)
    interior = [b for b in breakpoints if u < b < v]
    if interior:
        edges = np.unique(np.concatenate([edges, np.asarray(interior, dtype=float)]))

    a = edges[:-1].copy()
    b = edges[1:].copy()
    coarse = _gauss2(f, a, b)

    total = 0.0
    accepted_err = 0.0
    open_estimate = float(np.sum(coarse))
    open_err = math.inf
    for _ in range(max_refine):
        mid = 0.5 * (a + b)
        left = _gauss2(f, a, mid)
        right = _gauss2(f, mid, b)
        fine = left + right
        lmid = 0.5 * (a + mid)
        rmid = 0.5 * (mid + b)
        finer = (_gauss2(f, a, lmid) + _gauss2(f, lmid, mid)
                 + _gauss2(f, mid, rmid) + _gauss2(f, rmid, b))
        # a discontinuity can make one Richardson gap vanish by accident;
        # demanding two consecutive levels agree closes that hole
        err = np.maximum(np.abs(fine - coarse), np.abs(finer - fine)) / 15.0
        budget = tol * (b - a) / width
        done = err <= budget
        if np.any(done):
            total += float(np.sum(finer[done] + (finer[done] - fine[done]) / 15.0))
            accepted_err += float(np.sum(err[done]))
        keep = ~done
        if not np.any(keep):
            return total
        a = np.concatenate([a[keep], mid[keep]])
        b = np.concatenate([mid[keep], b[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
        open_estimate = float(np.sum(fine[keep]))
        open_err = float(np.sum(err[keep]))

    raise QuadratureError(
        f"quadrature did not converge on [{u}, {v}] after {max_refine} refinements "
        f"({a.size} panels open)",
        estimate=total + open_estimate,
        error_bound=accepted_err + open_err,
    )


def _snapped_sincos(angle: float) -> tuple[float, float]:
    """(sin, cos) of a boundary angle with exact values at multiples of pi/2.

    sin(pi) evaluates to ~1.2e-16 in floating point; the boundary-condition
    case analysis (Dirichlet versus not) must see an exact zero there.
    """
    s = math.sin(angle)
    c = math.cos(angle)
    if abs(s) < 5e-16:
        s = 0.0
        c = 1.0 if c > 0 else -1.0
    elif abs(c) < 5e-16:
        c = 0.0
        s = 1.0 if s > 0 else -1.0
    return s, c


@dataclass(frozen=True)
class BoundaryParams:
    """Separated boundary-condition angles: alpha in (0, pi], beta in [0, pi).

    The condition at x=0 is y(0) cos(alpha) + y'(0) sin(alpha) = 0 and at
    x=pi it is y(pi) cos(beta) + y'(pi) sin(beta) = 0.  alpha = pi is the
    Dirichlet condition on the left, beta = 0 the Dirichlet condition on
    the right.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= PI):
            raise ValueError(f"alpha must lie in (0, pi], got {self.alpha}")
        if not (0.0 <= self.beta < PI):
            raise ValueError(f"beta must lie in [0, pi), got {self.beta}")

    @property
    def sin_alpha(self) -> float:
        return _snapped_sincos(self.alpha)[0]

    @property
    def cos_alpha(self) -> float:
        return _snapped_sincos(self.alpha)[1]

    @property
    def sin_beta(self) -> float:
        return _snapped_sincos(self.beta)[0]

    @property
    def cos_beta(self) -> float:
        return _snapped_sincos(self.beta)[1]

    @property
    def dirichlet_left(self) -> bool:
        return self.sin_alpha == 0.0

    @property
    def dirichlet_right(self) -> bool:
        return self.sin_beta == 0.0


@dataclass
class Potential:
    """A real integrable potential on [0, pi].

    kind is "named" or "grid".  Named potentials are
      zero:               q = 0
      constant(c):        q = c
      step(c, x0):        q = c on [0, x0], 0 on (x0, pi]
      smooth-test(c_1..): q = sum_j c_j cos(j x)
    Grid potentials interpolate samples piecewise-linearly; abscissae must
    be strictly increasing with xs[0] = 0 and xs[-1] = pi encoded to full
    double precision.  ``offset`` adds a constant to either kind, so that
    spectral-shift experiments keep the exact structure of the base
    potential.

    Evaluation outside [0, pi] raises ValueError.  Instances are immutable
    by convention; do not mutate fields after construction.
    """

    kind: str
    name: str | None = None
    params: tuple[float, ...] = ()
    xs: np.ndarray | None = None
    qs: np.ndarray | None = None
    offset: float = 0.0
    _norm1: float | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "named":
            self._validate_named()
        elif self.kind == "grid":
            self._validate_grid()
        else:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")

    def _validate_named(self):
        if self.name not in _NAMED_POTENTIALS:
            raise ValueError(f"unknown named potential {self.name!r}")
        p = tuple(float(x) for x in self.params)
        if any(not math.isfinite(x) for x in p):
            raise ValueError("potential parameters must be finite")
        if self.name == "zero" and p:
            raise ValueError("zero potential takes no parameters")
        if self.name == "constant" and len(p) != 1:
            raise ValueError("constant potential takes exactly one parameter")
        if self.name == "step":
            if len(p) != 2:
                raise ValueError("step potential takes parameters (height, x0)")
            if not (0.0 < p[1] < PI):
                raise ValueError(f"step location must lie in (0, pi), got {p[1]}")
        if self.name == "smooth-test" and len(p) < 1:
            raise ValueError("smooth-test potential needs at least one coefficient")
        object.__setattr__(self, "params", p)

    def _validate_grid(self):
        if self.xs is None or self.qs is None:
            raise ValueError("grid potential needs xs and qs")
        xs = np.asarray(self.xs, dtype=float)
        qs = np.asarray(self.qs, dtype=float)
        if xs.ndim != 1 or xs.shape != qs.shape or xs.size < 2:
            raise ValueError("xs and qs must be matching 1-d arrays with >= 2 samples")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("grid abscissae must be strictly increasing")
        if xs[0] != 0.0:
            raise ValueError(f"grid must start at 0, got {xs[0]!r}")
        if xs[-1] != PI:
            raise ValueError(
                f"grid must end at pi to full double precision, got {xs[-1]!r}"
            )
        if not np.all(np.isfinite(qs)):
            raise ValueError("grid samples must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "qs", qs)

    # ---- constructors ----

    @classmethod
    def zero(cls) -> "Potential":
        return cls(kind="named", name="zero")

    @classmethod
    def constant(cls, c: float) -> "Potential":
        return cls(kind="named", name="constant", params=(float(c),))

    @classmethod
    def step(cls, c: float, x0: float) -> "Potential":
        return cls(kind="named", name="step", params=(float(c), float(x0)))

    @classmethod
    def smooth_test(cls, coefficients: Sequence[float]) -> "Potential":
        return cls(kind="named", name="smooth-test", params=tuple(float(c) for c in coefficients))

    @classmethod
    def from_grid(cls, xs: Sequence[float], qs: Sequence[float]) -> "Potential":
        return cls(kind="grid", xs=np.asarray(xs, dtype=float), qs=np.asarray(qs, dtype=float))

    @classmethod
    def from_json(cls, spec: str | dict) -> "Potential":
        obj = json.loads(spec) if isinstance(spec, str) else spec
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("potential spec must be an object with a 'kind' field")
        offset = float(obj.get("offset", 0.0))
        if obj["kind"] == "named":
            return cls(kind="named", name=obj.get("name"), params=tuple(obj.get("params", ())),
                       offset=offset)
        if obj["kind"] == "grid":
            return cls(kind="grid", xs=np.asarray(obj["xs"], dtype=float),
                       qs=np.asarray(obj["qs"], dtype=float), offset=offset)
        raise ValueError(f"unknown potential kind {obj['kind']!r}")

    def to_json(self) -> dict:
        if self.kind == "named":
            out: dict = {"kind": "named", "name": self.name, "params": list(self.params)}
        else:
            out = {"kind": "grid", "xs": self.xs.tolist(), "qs": self.qs.tolist()}
        if self.offset != 0.0:
            out["offset"] = self.offset
        return out

    # ---- evaluation ----

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < -_DOMAIN_SLACK) or np.any(arr > PI + _DOMAIN_SLACK):
            bad = arr[(arr < -_DOMAIN_SLACK) | (arr > PI + _DOMAIN_SLACK)]
            raise ValueError(f"potential evaluated outside [0, pi]: {bad[:3]!r}")
        arr = np.clip(arr, 0.0, PI)
        if self.kind == "grid":
            vals = np.interp(arr, self.xs, self.qs)
        elif self.name == "zero":
            vals = np.zeros_like(arr)
        elif self.name == "constant":
            vals = np.full_like(arr, self.params[0])
        elif self.name == "step":
            c, x0 = self.params
            vals = np.where(arr <= x0, c, 0.0)
        else:  # smooth-test
            vals = np.zeros_like(arr)
            for j, c in enumerate(self.params, start=1):
                vals = vals + c * np.cos(j * arr)
        vals = vals + self.offset
        if np.isscalar(x) or arr.ndim == 0:
            return float(vals)
        return vals

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Abscissae where q jumps or kinks (quadrature panel edges)."""
        if self.kind == "grid":
            return tuple(self.xs[1:-1])
        if self.name == "step":
            return (self.params[1],)
        return ()

    @property
    def jump_points(self) -> tuple[float, ...]:
        """Abscissae where q is genuinely discontinuous."""
        if self.kind == "named" and self.name == "step":
            return (self.params[1],)
        return ()

    def norm1(self, tol: float = DEFAULT_QUAD_TOL) -> float:
        """L1 norm of q over [0, pi], cached after the first call."""
        if self._norm1 is None:
            value = integrate(lambda t: np.abs(self(t)), 0.0, PI, tol,
                              breakpoints=self.breakpoints)
            object.__setattr__(self, "_norm1", value)
        return self._norm1

    def shifted(self, c: float) -> "Potential":
        """The potential q + c, sharing the base representation exactly."""
        return Potential(kind=self.kind, name=self.name, params=self.params,
                         xs=self.xs, qs=self.qs, offset=self.offset + float(c))


@dataclass
class CumulativeIntegrals:
    """Cumulative integrals of a potential, evaluable anywhere on their domains.

    sigma0(x) = integral of |q| over [0, x]
    sigma(x)  = integral of (pi - t) q(t) over [0, x]
    sigma_tilde(x) = sigma(x / 2), defined for x in [0, 2 pi]
    mean_q    = (1 / pi) integral of q over [0, pi]

    Built on a node table with two-point Gauss panels, so piecewise-linear
    potentials (and steps, whose jumps are table nodes) are integrated
    exactly up to rounding.
    """

    q: Potential
    nodes: np.ndarray
    cum_weighted: np.ndarray
    cum_abs: np.ndarray
    cum_plain: np.ndarray
    mean_q: float

    def _partial(self, g: Callable[[np.ndarray], np.ndarray], cum: np.ndarray, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < -_DOMAIN_SLACK) or np.any(arr > PI + _DOMAIN_SLACK):
            raise ValueError("cumulative integral evaluated outside [0, pi]")
        arr = np.clip(arr, 0.0, PI)
        i = np.clip(np.searchsorted(self.nodes, arr, side="right") - 1,
                    0, self.nodes.size - 2)
        a = self.nodes[i]
        vals = cum[i] + _gauss2(g, a, arr)
        if np.isscalar(x) or arr.ndim == 0:
            return float(vals)
        return vals

    def sigma0(self, x):
        return self._partial(lambda t: np.abs(self.q(t)), self.cum_abs, x)

    def sigma(self, x):
        return self._partial(lambda t: (PI - t) * self.q(t), self.cum_weighted, x)

    def sigma_tilde(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < -_DOMAIN_SLACK) or np.any(arr > 2.0 * PI + 2.0 * _DOMAIN_SLACK):
            raise ValueError("sigma_tilde evaluated outside [0, 2 pi]")
        return self.sigma(np.clip(arr, 0.0, 2.0 * PI) / 2.0)


def sigma_functions(q: Potential, table_points: int = 2048) -> CumulativeIntegrals:
    """Build the cumulative integrals of q on a shared node table."""
    nodes = np.linspace(0.0, PI, table_points + 1)
    bps = [b for b in q.breakpoints if 0.0 < b < PI]
    if bps:
        nodes = np.unique(np.concatenate([nodes, np.asarray(bps, dtype=float)]))

    a = nodes[:-1]
    b = nodes[1:]

    def table(g):
        vals = _gauss2(g, a, b)
        return np.concatenate([[0.0], np.cumsum(vals)])

    cum_weighted = table(lambda t: (PI - t) * q(t))
    cum_abs = table(lambda t: np.abs(q(t)))
    cum_plain = table(lambda t: q(t))
    return CumulativeIntegrals(
        q=q,
        nodes=nodes,
        cum_weighted=cum_weighted,
        cum_abs=cum_abs,
        cum_plain=cum_plain,
        mean_q=float(cum_plain[-1] / PI),
    )


def mean_q(q: Potential, tol: float = DEFAULT_QUAD_TOL) -> float:
    """Mean value of the potential, (1 / pi) times its integral over [0, pi]."""
    return integrate(q, 0.0, PI, tol, breakpoints=q.breakpoints) / PI
