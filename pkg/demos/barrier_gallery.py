"""Radial barriers and nonlinear time rescalings, end to end.

Four exhibits:
  * an expanding radial barrier whose free-boundary law holds to rounding;
  * a contracting hole radius solved from its defining equation, with the
    closing criterion and nondegeneracy/expansion bounds it feeds;
  * a perturbed contracting field checked pointwise as a supersolution
    against a sampled medium;
  * the fast/slow time rescalings built on the Lambert W function, with
    their finite blow-up horizon.

Run:  python3 demos/barrier_gallery.py
"""

import numpy as np

from hele_homog import barriers, timescale
from hele_homog.medium import parse_medium


def main() -> None:
    b = barriers.expanding_barrier(n=3, m=1.0, K=1.0, A=0.5)
    print("expanding barrier (n = 3, m = 1, K = 1, A = 0.5):")
    for t in (0.1, 0.5, 1.0, 2.0):
        print(f"  t = {t:4.1f}: rho = {b.rho(t):8.4f}, "
              f"law residual = {abs(barriers.check_expanding_fbc(b, t)):.2e}")
    print()

    print("contracting hole radius (n = 2, M = 1, mu = 1, K(t) = -0.3 t):")
    for t in (0.05, 0.2, 0.5, 0.8):
        rho = barriers.contracting_radius(
            n=2, M=1.0, mu=1.0, Kfun=lambda s: -0.3 * s, t=t)
        print(f"  t = {t:4.2f}: rho = {rho:.6f}")
    print(f"  nondegeneracy bound (n=2, M=1, mu=1, dt=1): "
          f"{barriers.nondegeneracy_bound(2, 1.0, 1.0, 1.0):.4f}")
    print(f"  expansion radius    (n=2, K=1, M=1, dt=1): "
          f"{barriers.expansion_radius(2, 1.0, 1.0, 1.0):.4f}")
    print()

    field = barriers.PerturbedContractingField(
        n=2, M=1.2, mu=1.0, chi0=1.0, kappa=0.01)
    g = parse_medium("1", dim=2)
    t = -0.1
    rho = field.rho(t)
    rng = np.random.default_rng(7)
    dirs = rng.normal(size=(48, 2))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = rng.uniform(rho * 1.05, 0.999, size=48)
    samples = [(r * d, t) for r, d in zip(radii, dirs)]
    samples += [(rho * d, t) for d in dirs[:12]]
    report = barriers.check_superbarrier(field, g, samples, c=1e-6)
    print(f"perturbed contracting field at t = {t} (hole radius {rho:.4f}):")
    print(f"  supersolution check passed: {report.passed}")
    for name, margin in report.margins.items():
        print(f"    {name:24s} margin {margin:+.4f}")
    print()

    s = timescale.SuperScaling(alpha=1.2, gamma=1.0, lam=0.2)
    print(f"fast rescaling (alpha = 1.2, gamma = 1, lambda = 0.2): "
          f"blow-up at t_max = {s.t_max:.6f}")
    for t in (0.0, 0.25, 0.45, 0.51):
        print(f"  f_super({t:4.2f}) = {timescale.f_super(t, s):8.4f}   "
              f"slope {timescale.f_super_deriv(t, s):8.4f}")
    print("  (the slope diverges as t approaches the horizon)")


if __name__ == "__main__":
    main()
