"""Decay-rate diagnostics for asymptotic remainder sequences."""

from __future__ import annotations

import numpy as np


def fit_loglog_slope(ns, values, floor: float = 0.0) -> float:
    """Least-squares slope of log|values| against log(ns).

    Entries with |value| <= floor are skipped so tolerance-level noise does
    not pollute the fit; at least three usable points are required.
    """
    ns = np.asarray(ns, dtype=float)
    vals = np.abs(np.asarray(values, dtype=float))
    mask = vals > floor
    if int(np.sum(mask)) < 3:
        raise ValueError("need at least three points above the noise floor to fit a slope")
    slope, _ = np.polyfit(np.log(ns[mask]), np.log(vals[mask]), 1)
    return float(slope)


def window_max_ratio(ns, values, lo: int, mid: int, hi: int) -> tuple[float, float, float]:
    """max over n in [mid, hi] relative to max over n in [lo, mid], inclusive.

    Returns (ratio, first window max, second window max).
    """
    ns = np.asarray(ns)
    vals = np.abs(np.asarray(values, dtype=float))
    first = vals[(ns >= lo) & (ns <= mid)]
    second = vals[(ns >= mid) & (ns <= hi)]
    if first.size == 0 or second.size == 0:
        raise ValueError(f"empty window in [{lo}, {mid}] or [{mid}, {hi}]")
    m1 = float(np.max(first))
    m2 = float(np.max(second))
    return (m2 / m1 if m1 > 0 else np.inf), m1, m2


def is_strictly_decreasing(seq) -> bool:
    vals = np.asarray(seq, dtype=float)
    return bool(np.all(np.diff(vals) < 0))
