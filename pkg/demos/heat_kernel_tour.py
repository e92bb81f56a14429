"""Walk through the model heat kernel and the three ways of getting nu(mu).

Run: python3 demos/heat_kernel_tour.py
"""
from math import factorial

import numpy as np

from heisenspec.mehler import HeatQuery, heat_kernel_fs, heat_kernel_origin
from heisenspec.plancherel import ModelOperatorSpec, heat_value_at_origin, plancherel_constant
from heisenspec.weyl import nu

print("Heat kernel of -1/2 sum X_j^2 - i mu X_0 at the origin, t = 1")
for n in (1, 2):
    print(f"  n={n}: k_0(0, 0, 1) = {heat_kernel_origin(n, 0.0):.12g}")
print("  (1/8 for n = 1 and 1/(24 pi) for n = 2)\n")

print("Away from the origin the kernel is complex once mu != 0:")
for mu in (0.0, 0.3, 0.3 + 0.2j):
    k = heat_kernel_fs(HeatQuery(1, mu, 0.5, [0.1, 0.2], 1.0))
    print(f"  mu={mu!s:>10}: k = {k:.10g}")

print("\nParabolic scaling k(s^2 x0, s x', s^2 t) = s^-(2n+2) k(x0, x', t), n = 1:")
base = heat_kernel_fs(HeatQuery(1, 0.4, 0.7, [0.3, -0.5], 1.0))
for s in (0.5, 2.0, 3.0):
    k = heat_kernel_fs(HeatQuery(1, 0.4, s * s * 0.7, s * np.array([0.3, -0.5]), s * s))
    print(f"  s={s}: ratio {s ** 4 * k / base:.15f}")

print("\nnu(mu) three ways (direct quadrature, Mehler at the origin, Plancherel sum):")
print(f"  Plancherel constants calibrated at mu = 0: "
      + ", ".join(f"C_{n} pi^{n + 1} = {plancherel_constant(n) * np.pi ** (n + 1):.12f}" for n in (1, 2, 3)))
for n in (1, 2, 3):
    for mu in (0.0, 0.5, n - 0.25):
        a = nu(n, mu)
        b = heat_kernel_origin(n, mu) / factorial(n + 1)
        c = heat_value_at_origin(ModelOperatorSpec(n, (mu,))).value / factorial(n + 1)
        print(f"  n={n} mu={mu:<5}: {a:.12e}  {b:.12e}  {c:.12e}")
