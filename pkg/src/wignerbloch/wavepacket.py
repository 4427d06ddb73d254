"""Gaussian momentum-space wavepackets and their moments.

The spin-up amplitude is

    a(p) = K exp(-sum_i (p_i - c_i)^2 / (4 s_i^2)) exp(-i p.x0)

with ``K`` fixed so that ``int d^3p / (2 p0) |a|^2 = 1``.  Every expectation
value ``<f>`` below is taken with that relativistic measure.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .integrator import ConvergenceError, IntegralResult, IntegratorConfig, integrate
from .kinematics import E3, as_vector, unit

log = logging.getLogger(__name__)

NR_THRESHOLD = 0.2


@dataclass(frozen=True)
class WavepacketSpec:
    mass: float
    sigma: np.ndarray
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    offset: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_vector(self.sigma, "sigma"))
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        object.__setattr__(self, "offset", as_vector(self.offset, "offset"))
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not np.all(self.sigma > 0):
            raise ValueError(f"widths must be positive, got {self.sigma}")

    @classmethod
    def isotropic(cls, mass: float, sigma: float, center=(0.0, 0.0, 0.0), offset=(0.0, 0.0, 0.0)):
        return cls(float(mass), np.full(3, float(sigma)), np.asarray(center, float), np.asarray(offset, float))

    @property
    def support_ratio(self) -> float:
        """``(|center| + 3 max sigma) / m``, the size of the effective support."""
        return float((np.linalg.norm(self.center) + 3.0 * self.sigma.max()) / self.mass)

    @property
    def nr_valid(self) -> bool:
        return self.support_ratio < NR_THRESHOLD


@dataclass(frozen=True)
class Amplitude:
    spec: WavepacketSpec
    norm_constant: float
    norm_error: float = 0.0

    def __call__(self, p) -> np.ndarray:
        p = as_vector(p, "momentum")
        s = self.spec
        envelope = np.exp(-np.sum((p - s.center) ** 2 / (4.0 * s.sigma**2), axis=-1))
        return self.norm_constant * envelope * np.exp(-1j * (p @ s.offset))

    def rescaled(self, factor: float) -> Amplitude:
        return replace(self, norm_constant=self.norm_constant * factor)


def norm(a: Amplitude, cfg: IntegratorConfig | None = None) -> IntegralResult:
    """``int d^3p / (2 p0) |a|^2``."""
    return integrate(_ones, a.spec, cfg, scale=a.norm_constant**2)


def _ones(p):
    return np.ones(len(p))


def normalize(spec: WavepacketSpec, cfg: IntegratorConfig | None = None, *, strict: bool = True) -> Amplitude:
    """Fix the normalization constant of ``spec`` under the relativistic measure.

    Raises :class:`ConvergenceError` when a quadrature misses its tolerance;
    with ``strict=False`` it only logs a warning and records the error.
    """
    cfg = cfg or IntegratorConfig()
    raw = integrate(_ones, spec, cfg)
    if cfg.method == "tensor_gauss" and not raw.within_tolerance(cfg):
        msg = (
            f"normalization integral not converged at order {cfg.order_per_axis}: "
            f"estimate {raw.error_estimate:.3g} for value {raw.value:.6g}"
        )
        if strict:
            raise ConvergenceError(msg, raw.error_estimate)
        log.warning(msg)
    return Amplitude(spec, 1.0 / math.sqrt(raw.value), 0.5 * raw.error_estimate / raw.value)


def expectation(a: Amplitude, f, cfg: IntegratorConfig | None = None) -> IntegralResult:
    """Relativistic-measure expectation value ``<f>`` of a vectorized ``f``.

    Evaluated as a ratio against the normalization integral on the same nodes
    (or draws), which equals ``K^2 int d^3p/(2p0) |a|^2 f`` once ``a`` has
    been normalized with the same configuration.
    """
    return integrate(f, a.spec, cfg, normalized=True)


def pi_operator(p, n) -> np.ndarray:
    """``p x n`` with its component along the polarization axis removed."""
    c = np.cross(as_vector(p, "momentum"), unit(n))
    return c - np.multiply.outer(c @ E3, E3)


def pi_dispersion(a: Amplitude, n, cfg: IntegratorConfig | None = None) -> float:
    """``sum_i (<Pi_i^2> - <Pi_i>^2)`` for the operator of :func:`pi_operator`."""
    n = unit(n)
    pi = lambda p: pi_operator(p, n)[:, :2]
    first = expectation(a, pi, cfg).value
    second = expectation(a, lambda p: np.sum(pi(p) ** 2, axis=1), cfg).value
    return max(float(second - first @ first), 0.0)


def position_dispersion(a: Amplitude, cfg: IntegratorConfig | None = None) -> float:
    """``sum_i (Delta x_i)^2`` for ``psi = a / sqrt(2 p0)`` with ``x_i = i d/dp_i``.

    With ``psi = |psi| exp(-i p.x0)`` the dispersion is ``int |grad |psi||^2``,
    which is an expectation under the relativistic measure:

        (Delta x)^2 = < sum_i ((p_i - c_i)/(2 s_i^2) + p_i/(2 p0^2))^2 >

    The offset ``x0`` only shifts ``<x>`` and drops out.  The leading value is
    ``sum_i 1/(4 s_i^2)``; the ``p_i/(2 p0^2)`` piece is the measure correction.
    """
    s = a.spec

    def grad_sq(p):
        p0_sq = s.mass**2 + np.einsum("ij,ij->i", p, p)
        g = (p - s.center) / (2.0 * s.sigma**2) + p / (2.0 * p0_sq[:, None])
        return np.sum(g * g, axis=1)

    return float(expectation(a, grad_sq, cfg).value)


@dataclass(frozen=True)
class MomentReport:
    mean_p: np.ndarray
    cov_p: np.ndarray
    pi_disp_sq: float
    x_disp_sq: float


def moments(a: Amplitude, n, cfg: IntegratorConfig | None = None) -> MomentReport:
    mean = expectation(a, lambda p: p, cfg).value
    second = expectation(a, lambda p: (p[:, :, None] * p[:, None, :]).reshape(len(p), 9), cfg).value
    cov = second.reshape(3, 3) - np.outer(mean, mean)
    cov = 0.5 * (cov + cov.T)
    return MomentReport(mean, cov, pi_dispersion(a, n, cfg), position_dispersion(a, cfg))
