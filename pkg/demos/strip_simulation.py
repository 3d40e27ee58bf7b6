"""2D strip simulation: an oscillatory medium slows the advancing front.

A wet region grows into a periodic strip under inlet pressure psi0; the
front advances at speed g(x/eps, t/eps) |Du|.  Three acts:
  1. constant medium — the mean depth follows sqrt(h0^2 + 2 psi0 t) exactly;
  2. pinning medium at small eps — the measured front speed matches the 1D
     homogenized speed at the front's gradient;
  3. shrinking eps — space-time fronts converge (Hausdorff distances drop).

Run:  python3 demos/strip_simulation.py   (about 10 seconds)
"""

import math

from hele_homog.homog1d import effective_velocity
from hele_homog.hs2d import SimConfig, StripDomain, convergence_study, simulate
from hele_homog.medium import builtin_medium, parse_medium


def main() -> None:
    g1 = parse_medium("1", dim=2)
    cfg = SimConfig(domain=StripDomain(Lx=4.0, Ly=1.0, nx=32, ny=16),
                    medium=g1, eps=0.5, psi0=1.0, T=1.5, h0=1.0)
    hist = simulate(cfg)
    h = hist.final_front.heights.mean()
    print("act 1 — constant medium, flat front:")
    print(f"  depth after T = 1.5:  simulated {h:.5f} vs "
          f"closed form {math.sqrt(1 + 2 * 1.5):.5f}")
    print(f"  pressure stayed inside [0, psi0]: "
          f"[{hist.u_min.min():.3f}, {hist.u_max.max():.3f}]")
    print()

    g2 = builtin_medium("pinning2d")
    cfg2 = SimConfig(domain=StripDomain(Lx=1.6, Ly=0.25, nx=128, ny=8),
                     medium=g2, eps=0.02, psi0=0.7, T=0.5, h0=0.72)
    hist2 = simulate(cfg2)
    speed_2d = hist2.front_speed(0.125, 0.5)
    q_mid = 0.7 / (0.72 + 0.6 * 0.5)
    speed_1d = effective_velocity(builtin_medium("pinning"), q_mid, T=200.0).r_hat
    print("act 2 — pinning medium at eps = 0.02:")
    print(f"  2D front speed (least squares): {speed_2d:.4f}")
    print(f"  1D homogenized speed at the front's gradient: {speed_1d:.4f}")
    print(f"  relative difference: {abs(speed_2d - speed_1d) / speed_1d:.2%}")
    print()

    cfg3 = SimConfig(domain=StripDomain(Lx=1.6, Ly=0.25, nx=128, ny=20),
                     medium=g2, eps=0.2, psi0=0.7, T=0.65, h0=0.72)
    report = convergence_study(cfg3, [0.2, 0.1, 0.05])
    print("act 3 — eps refinement (space-time Hausdorff distances):")
    for pair in report.pairs:
        print(f"  fronts(eps={pair.eps_a}) vs fronts(eps={pair.eps_b}): "
              f"{pair.spacetime_distance:.5f}")
    print(f"  decreasing: {report.distances_decreasing()}")
    print("Smaller eps changes the front less and less — the visible sign")
    print("of convergence to the homogenized evolution.")


if __name__ == "__main__":
    main()
