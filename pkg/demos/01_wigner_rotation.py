"""
Wigner rotation of a single momentum component
==============================================

A boosted observer sees the spin of each momentum component rotated about
p x n.  Here we compare the exact rotation angle with its small-momentum
expansion and watch the error fall off like (|p|/m)^3.
"""

# %%
import numpy as np

from wignerbloch import E1, four_velocity, lambda_param, wigner_angle_exact, wigner_angle_expanded

m = 1.0
u = four_velocity(1.0, E1)
lam = lambda_param(u)
print(f"u0 = {u.u0:.6f}, lambda = {lam:.6f} (tanh(1/2) = {np.tanh(0.5):.6f})")

# %%
# One momentum transverse to the boost.
w = wigner_angle_exact([0, 0.1, 0], u, m)
approx = wigner_angle_expanded([0, 0.1, 0], E1, lam, m)
print(f"exact:    sin = {w.sin_omega:.8f}  cos = {w.cos_omega:.8f}  axis = {w.axis}")
print(f"expanded: sin = {approx.sin_omega:.8f}  cos = {approx.cos_omega:.8f}")

# %%
# Error of the expansion on momentum shells of shrinking radius.
rng = np.random.default_rng(1)
d = rng.standard_normal((5000, 3))
d /= np.linalg.norm(d, axis=1, keepdims=True)
for s in (0.2, 0.1, 0.05, 0.025):
    err = np.abs(wigner_angle_exact(d * s, u, m).sin_omega - wigner_angle_expanded(d * s, E1, lam, m).sin_omega).max()
    print(f"|p|/m = {s:<6}  max sin error = {err:.3e}")

# %%
# Momenta along the boost are never rotated.
p = np.outer(np.linspace(-1, 1, 5), E1)
print(wigner_angle_exact(p, u, m).sin_omega)
