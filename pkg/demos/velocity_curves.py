"""Effective speed curves for three media, with closed-form cross-checks.

Three behaviors of the homogenized velocity r(q):
  * static_sin  — time-independent medium: r(q) equals the harmonic mean of
                  g times q (here sqrt(2) q), verified against quadrature;
  * pinning     — traveling slowdown: a plateau where r(q) = 1;
  * two_wave    — two interacting waves: staircase-like pinning at several
                  levels inside the admissible band [m q, M q].

Run:  python3 demos/velocity_curves.py
"""

import math

import numpy as np

from hele_homog.homog1d import harmonic_mean_oracle, velocity_curve
from hele_homog.medium import builtin_medium, estimate_bounds


def main() -> None:
    T = 100.0

    g_static = builtin_medium("static_sin")
    curve = velocity_curve(g_static, 0.25, 2.0, samples=8, T=T)
    print("static_sin:", g_static.source)
    print(f"{'q':>6}  {'r_hat':>9}  {'harmonic mean':>13}  {'difference':>10}")
    for q, r in zip(curve.q, curve.r_hat):
        oracle = harmonic_mean_oracle(g_static, float(q))
        print(f"{q:6.2f}  {r:9.4f}  {oracle:13.4f}  {abs(r - oracle):10.2e}")
    print(f"(closed form: sqrt(2) q; sqrt(2) = {math.sqrt(2):.6f})")
    print()

    for name in ("pinning", "two_wave"):
        g = builtin_medium(name)
        bounds = estimate_bounds(g)
        curve = velocity_curve(g, 0.1, 2.0, samples=60, T=T)
        inside = np.all(curve.r_hat >= bounds.m * curve.q - 1 / T) and \
            np.all(curve.r_hat <= bounds.M * curve.q + 1 / T)
        monotone = np.all(np.diff(curve.r_hat) >= -2 / T)
        flat_pairs = int(np.sum(np.abs(np.diff(curve.r_hat)) <= 2 / T))
        print(f"{name}: m = {bounds.m:.2f}, M = {bounds.M:.2f}")
        print(f"  all samples inside [m q - 1/T, M q + 1/T]: {inside}")
        print(f"  nondecreasing within 2/T:                  {monotone}")
        print(f"  consecutive pairs that are locked flat:    "
              f"{flat_pairs} of {curve.q.size - 1}")
        print()


if __name__ == "__main__":
    main()
