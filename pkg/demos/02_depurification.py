"""
Depurification of a polarized packet under boosts
=================================================

A spin-up Gaussian packet is pure in its rest frame.  A boosted observer
averages over momentum-dependent Wigner rotations and sees a shorter Bloch
vector.  The loss of purity is set by the dispersion of (p x n) projected
off the polarization axis.
"""

# %%
import numpy as np

from wignerbloch import E1, E3, WavepacketSpec, four_velocity, normalize, pi_dispersion, report

spec = WavepacketSpec.isotropic(mass=1.0, sigma=0.01)
packet = normalize(spec)

# %%
print(f"{'beta':>6} {'lambda':>10} {'1-|mu|^2 exact':>16} {'from dispersion':>16}")
for beta in (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 20.0):
    r = report(packet, four_velocity(beta, E1))
    print(f"{beta:6.2f} {r.lam:10.6f} {r.deficit:16.6e} {1 - r.purity_sq_formula:16.6e}")

# %%
# Boosting along the polarization axis doubles the dispersion for an
# isotropic packet, and with it the purity loss.
for n in (E1, E3):
    print(n, pi_dispersion(packet, n) / spec.sigma[0] ** 2)

# %%
# A drifting packet picks up a first-order tilt of the Bloch vector.
drift = normalize(WavepacketSpec.isotropic(1.0, 0.01, center=(0, 0, 0.05)))
r = report(drift, four_velocity(0.5, E1))
print("mu exact :", r.mu_exact.mu)
print("mu series:", r.mu_approx.mu)

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    betas = np.linspace(0, 6, 40)
    deficits = [report(packet, four_velocity(b, E1)).deficit for b in betas]
    plt.plot(betas, deficits, label="exact")
    plt.plot(betas, np.tanh(betas / 2) ** 2 * pi_dispersion(packet, E1), "--", label="lambda^2 (dPi)^2 / m^2")
    plt.xlabel("rapidity")
    plt.ylabel("1 - |mu|^2")
    plt.legend()
    plt.savefig("depurification.png", dpi=120)
