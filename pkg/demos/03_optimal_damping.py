"""Closed-form optimal damping for additive smoothers.

For each smoother the high-frequency symbol product t(theta) = M~ A~ lies in
an exact interval [t_min, t_max]; equioscillation gives

    omega* = 2 / (t_min + t_max),   mu* = (t_max - t_min) / (t_min + t_max).

The demo prints the closed forms next to smoothing factors sampled on a
dense frequency grid, then scans mu(omega) to show the minimum is where the
formula says it is.
"""

import numpy as np

from vankamg import (
    SmootherKind,
    SmootherSpec,
    exact_optimum,
    optimal_omega,
    smoothing_factor,
)
from vankamg.lfa import SUPPORTED_PAIRS

print(f"{'smoother':10s} {'dim':>3s} {'omega*':>10s} {'mu*':>10s}"
      f" {'sampled mu':>12s} {'dev':>9s}")
for kind, dim in sorted(SUPPORTED_PAIRS, key=lambda p: (p[0].value, p[1])):
    omega, mu = exact_optimum(kind, dim)
    sampled = smoothing_factor(SmootherSpec(kind, dim, float(omega)))
    print(f"{kind.value:10s} {dim:3d} {str(omega):>10s} {str(mu):>10s}"
          f" {sampled:12.8f} {abs(sampled - float(mu)):9.1e}")

print("\n== dual route: sampled optimiser agrees with the closed form ==")
opt = optimal_omega(SmootherKind.VANKA_ELEMENT, 2)
omega, mu = exact_optimum(SmootherKind.VANKA_ELEMENT, 2)
print(f"  vanka-e 2D exact:   omega = {omega} = {float(omega):.6f},"
      f" mu = {mu} = {float(mu):.6f}")
print(f"  vanka-e 2D sampled: omega = {opt.omega:.6f}, mu = {opt.mu:.6f}")
print(f"  product range from samples: [{opt.t_min:.6f}, {opt.t_max:.6f}]"
      f"  (exact [3/4, 4/3])")

print("\n== mu(omega) scan, vanka-e 2D ==")
for w in np.arange(0.80, 1.125, 0.025):
    mu_w = smoothing_factor(SmootherSpec(SmootherKind.VANKA_ELEMENT, 2, w))
    bar = "#" * int(round(60 * mu_w))
    marker = "  <- omega*" if abs(w - float(omega)) < 0.0125 else ""
    print(f"  omega = {w:5.3f}  mu = {mu_w:.4f}  {bar}{marker}")
