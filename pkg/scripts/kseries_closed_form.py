"""Convergence ladder of the series piece k2 against its closed form.

In the Dirichlet-Dirichlet case the series runs over integer frequencies
and equals pi/2 times the even Fourier part of sigma_tilde with its first
three harmonics removed.  Prints sup-norm errors over a compact interior
segment for a doubling truncation ladder, plus the total-variation report.
"""

import argparse
import math

import numpy as np

from slspectra import BoundaryParams, Potential, ac_diagnostic, k_partial_sum

PI = math.pi


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=200, help="largest truncation")
    parser.add_argument("--height", type=float, default=1.0,
                        help="constant potential height")
    args = parser.parse_args()

    q = Potential.constant(args.height)
    bc = BoundaryParams(PI, 0.0)
    ladder = tuple(sorted({max(2, args.N // 8), max(2, args.N // 4),
                           max(2, args.N // 2), args.N}))
    res = k_partial_sum(q, bc, args.N, truncations=ladder)
    mask = (res.grid >= 1.0) & (res.grid <= 2 * PI - 1.0)
    sup_closed = float(np.max(np.abs(res.closed_form[mask])))

    print(f"q = constant({args.height}), boundary case {res.case_tag}")
    print(f"sup |closed form| on [1, 2 pi - 1]: {sup_closed:.6f}")
    print(f"{'N':>6} {'sup error':>12} {'relative':>12}")
    for i, n in enumerate(res.N_list):
        err = float(np.max(np.abs(res.k2_partial[i][mask] - res.closed_form[mask])))
        print(f"{n:>6} {err:>12.3e} {err / sup_closed:>12.3e}")

    report = ac_diagnostic(res.grid, res.k_partial, res.N_list, 1.0, 2 * PI - 1.0)
    print(f"total variation per truncation: "
          f"{', '.join(f'{v:.5f}' for v in report.variations)}")
    print(f"variation stability: {report.tv_stability:.5f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
