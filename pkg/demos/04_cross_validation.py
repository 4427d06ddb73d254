"""
Quadrature against Monte Carlo
==============================

Every integral can be done two ways: a tensor Gauss-Hermite rule matched to
the packet envelope, or Monte Carlo draws from that envelope.  Agreement
between the two is the main guard against integration mistakes.
"""

# %%
import numpy as np

from wignerbloch import E1, IntegratorConfig, WavepacketSpec, cross_validate, four_velocity, normalize, purity_sq_exact
from wignerbloch.bloch import rotated_spin

spec = WavepacketSpec.isotropic(1.0, 0.01)
a = normalize(spec)
u = four_velocity(1.0, E1)

quad = IntegratorConfig(order_per_axis=16)
mc = IntegratorConfig(method="monte_carlo", samples=10**6, seed=0)

# %%
q, m = purity_sq_exact(a, u, quad), purity_sq_exact(a, u, mc)
print(f"|mu|^2 quadrature  {q.value:.12f} +- {q.error_estimate:.1e}")
print(f"|mu|^2 Monte Carlo {m.value:.12f} +- {m.error_estimate:.1e}")

# %%
# A deliberately coarse rule on a wide packet is caught by its own
# refinement estimate even when the Monte Carlo error bar would cover it.
wide = WavepacketSpec.isotropic(1.0, 0.3)
cv = cross_validate(lambda p: rotated_spin(p, u, 1.0), wide, IntegratorConfig(order_per_axis=4), mc, normalized=True)
print(f"difference {cv.difference:.2e}, combined error {cv.combined_error:.2e}, converged {cv.converged}, agree {cv.agree}")
