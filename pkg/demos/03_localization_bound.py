"""
Localization bound
==================

Because the Pi operator is linear in momentum, its dispersion times the
position dispersion is at least 1/4.  Tighter packets in position space
therefore lose more purity.  We scan packet widths and check both sides.
"""

# %%
import numpy as np

from wignerbloch import (
    E2,
    WavepacketSpec,
    four_velocity,
    lambda_param,
    normalize,
    pi_dispersion,
    position_dispersion,
    purity_sq_bound,
    purity_sq_formula,
)

lam = lambda_param(four_velocity(3.0, E2))

# %%
print(f"{'sigma':>8} {'(dPi)^2 (dx)^2':>16} {'purity':>14} {'bound':>14}")
for sigma in (0.002, 0.005, 0.01, 0.02, 0.04):
    spec = WavepacketSpec(1.0, np.array([1.0, 0.5, 2.0]) * sigma)
    a = normalize(spec)
    pi_sq, x_sq = pi_dispersion(a, E2), position_dispersion(a)
    print(f"{sigma:8.3f} {pi_sq * x_sq:16.6f} {purity_sq_formula(pi_sq, lam, 1.0):14.10f} {purity_sq_bound(lam, 1.0, x_sq):14.10f}")
