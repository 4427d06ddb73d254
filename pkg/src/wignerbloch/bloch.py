"""Bloch vector of a spin-up wavepacket as seen by a boosted observer.

The rest-frame state is fully polarized along ``e3``.  Each momentum
component rotates that spin by its own Wigner rotation, and the observer's
Bloch vector is the relativistic-measure average of the rotated vectors:

    mu = < cos W e3 + sin W (e3 x e) + (1 - cos W) e (e . e3) >

Results are expressed in the rest-frame basis; no realignment is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrator import IntegralResult, IntegratorConfig
from .kinematics import E3, FourVelocity, as_vector, lambda_param, wigner_angle_exact
from .wavepacket import Amplitude, MomentReport, expectation, moments

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class BlochVector:
    """A spin-1/2 Bloch vector.

    ``kind="approx"`` marks a truncated series, which is exempt from the
    ``|mu| <= 1`` check because it is only accurate to second order.
    """

    mu: np.ndarray
    error_estimate: float = 0.0
    kind: str = "exact"

    def __post_init__(self):
        mu = as_vector(self.mu, "Bloch vector")
        if self.kind == "exact" and np.linalg.norm(mu) > 1 + 1e-9:
            raise ValueError(f"|mu| = {np.linalg.norm(mu)!r} exceeds 1")
        object.__setattr__(self, "mu", mu)

    @property
    def purity_sq(self) -> float:
        return float(self.mu @ self.mu)


def rotated_spin(p, u: FourVelocity, m: float) -> np.ndarray:
    """Rest-frame ``e3`` after the Wigner rotation of each momentum in ``p``."""
    w = wigner_angle_exact(np.atleast_2d(p), u, m)
    sin_om = w.sin_omega[:, None]
    cos_om = w.cos_omega[:, None]
    e = w.axis
    # degenerate rows have e = 0, sin = 0, cos = 1 and reduce to e3 exactly
    return cos_om * E3 + sin_om * np.cross(E3, e) + (1.0 - cos_om) * e * e[:, 2:3]


def _exact(a: Amplitude, u: FourVelocity, cfg) -> IntegralResult:
    return expectation(a, lambda p: rotated_spin(p, u, a.spec.mass), cfg)


def bloch_exact(a: Amplitude, u: FourVelocity, cfg: IntegratorConfig | None = None) -> BlochVector:
    r = _exact(a, u, cfg)
    return BlochVector(r.value, r.error_estimate)


def purity_sq_exact(a: Amplitude, u: FourVelocity, cfg: IntegratorConfig | None = None) -> IntegralResult:
    """``|mu|^2`` of the exact Bloch vector with a propagated error estimate.

    The error comes from a second pass integrating ``mu_hat . v(p)`` on the
    same nodes or draws: its value is ``|mu|`` and its error is the error of
    ``|mu|`` to first order, so ``|mu|^2`` carries twice that relative error.
    """
    first = _exact(a, u, cfg)
    mu = np.asarray(first.value)
    length = float(np.linalg.norm(mu))
    if length == 0.0:
        return IntegralResult(0.0, first.error_estimate, first.evaluations, first.method)
    mu_hat = mu / length
    proj = expectation(a, lambda p: rotated_spin(p, u, a.spec.mass) @ mu_hat, cfg)
    return IntegralResult(
        float(mu @ mu),
        2.0 * length * proj.error_estimate,
        first.evaluations + proj.evaluations,
        first.method,
    )


def bloch_approx(a: Amplitude, u: FourVelocity, cfg: IntegratorConfig | None = None) -> BlochVector:
    """Second-order small-momentum Bloch vector built from packet moments.

    ``(1 - k^2 <|q|^2>/2) e3 + k e3 x (<p> x n) + k^2/2 <q (q.e3) + (e3 x q)(p.n)>``
    with ``q = p x n`` and ``k = lambda/m``.  Moments use the same integrator
    as :func:`bloch_exact` so the two differ only by the truncation.
    """
    m = a.spec.mass
    n = u.direction
    k = lambda_param(u) / m

    def terms(p):
        q = np.cross(p, n)
        quad = q * q[:, 2:3] + np.cross(E3, q) * (p @ n)[:, None]
        return np.column_stack([np.einsum("ij,ij->i", q, q), p, quad])

    r = expectation(a, terms, cfg)
    q_sq, mean_p, quad = r.value[0], r.value[1:4], r.value[4:7]
    mu = (1.0 - 0.5 * k * k * q_sq) * E3 + k * np.cross(E3, np.cross(mean_p, n)) + 0.5 * k * k * quad
    return BlochVector(mu, r.error_estimate, kind="approx")


def purity_sq_formula(pi_disp_sq: float, lam: float, m: float) -> float:
    """``1 - (lam/m)^2 (Delta Pi)^2``.  Deliberately not clamped at zero."""
    return 1.0 - (lam / m) ** 2 * pi_disp_sq


def purity_sq_small_velocity(v, pi_disp_sq: float, m: float) -> float:
    """Small-velocity form ``1 - |v|^2 (Delta Pi)^2 / (4 m^2)``."""
    v = np.asarray(v, dtype=float)
    speed_sq = float(v @ v) if v.ndim else float(v) ** 2
    if speed_sq >= 1.0:
        raise ValueError(f"observer speed must be < 1, got {math.sqrt(speed_sq)}")
    return 1.0 - speed_sq / (4.0 * m * m) * pi_disp_sq


def purity_sq_bound(lam: float, m: float, x_disp_sq: float) -> float:
    """Upper bound ``1 - lam^2 / (4 m^2 (Delta x)^2)`` on the purity."""
    if not x_disp_sq > 0:
        raise ValueError(f"position dispersion must be positive, got {x_disp_sq}")
    return 1.0 - lam**2 / (4.0 * m * m * x_disp_sq)


def density_matrix(mu) -> np.ndarray:
    """``(I + mu . sigma) / 2``."""
    if isinstance(mu, BlochVector):
        mu = mu.mu
    mu = BlochVector(mu).mu
    return 0.5 * (np.eye(2, dtype=complex) + np.einsum("i,ijk->jk", mu, PAULI))


def bloch_from_density(rho) -> np.ndarray:
    return np.real(np.einsum("jk,ikj->i", np.asarray(rho), PAULI))


@dataclass(frozen=True)
class BlochReport:
    mu_exact: BlochVector
    mu_approx: BlochVector
    purity_sq_exact: float
    purity_sq_formula: float
    purity_sq_bound: float
    lam: float
    moments: MomentReport
    regime_warning: bool
    purity_sq_error: float = 0.0

    @property
    def deficit(self) -> float:
        return 1.0 - self.purity_sq_exact


def report(a: Amplitude, u: FourVelocity, cfg: IntegratorConfig | None = None) -> BlochReport:
    m = a.spec.mass
    lam = lambda_param(u)
    mu_exact = bloch_exact(a, u, cfg)
    purity = purity_sq_exact(a, u, cfg)
    mom = moments(a, u.direction, cfg)
    formula = purity_sq_formula(mom.pi_disp_sq, lam, m)
    bound = purity_sq_bound(lam, m, mom.x_disp_sq)
    return BlochReport(
        mu_exact=mu_exact,
        mu_approx=bloch_approx(a, u, cfg),
        purity_sq_exact=mu_exact.purity_sq,
        purity_sq_formula=formula,
        purity_sq_bound=bound,
        lam=lam,
        moments=mom,
        regime_warning=not a.spec.nr_valid,
        purity_sq_error=purity.error_estimate,
    )
