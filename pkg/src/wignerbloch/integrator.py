"""Momentum-space integration against a Gaussian wavepacket envelope.

Two independent routes compute

    I[f] = scale * int d^3p / (2 p0) f(p) exp(-sum_i (p_i - c_i)^2 / (2 s_i^2))

- ``tensor_gauss``: tensor-product Gauss-Hermite rule (probabilists' weight)
  mapped per axis by ``p_i = c_i + s_i z_i``.  The relativistic factor
  ``1/(2 p0)`` is folded into the integrand.  The error estimate is the change
  between orders ``k`` and ``k + 4``.
- ``monte_carlo``: samples drawn from the envelope itself, so the importance
  weight is just ``1/(2 p0)``.  The error estimate is the standard error.

Integrands are vectorized: ``f`` receives momenta of shape ``(N, 3)`` and
returns ``(N,)`` or ``(N, k)``.  Sums run over a fixed node order with
numpy's pairwise summation, so results never depend on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np

Integrand = Callable[[np.ndarray], np.ndarray]


class IntegrationError(ArithmeticError):
    """The integrand produced a non-finite value."""


class ConvergenceError(ArithmeticError):
    """A deterministic rule failed to reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(message)
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class IntegratorConfig:
    method: Literal["tensor_gauss", "monte_carlo"] = "tensor_gauss"
    order_per_axis: int = 16
    samples: int = 1_000_000
    seed: int = 0
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12

    def __post_init__(self):
        if self.method not in ("tensor_gauss", "monte_carlo"):
            raise ValueError(f"unknown integration method {self.method!r}")
        if self.order_per_axis < 4 or self.order_per_axis % 2:
            raise ValueError(f"order_per_axis must be even and >= 4, got {self.order_per_axis}")
        if self.samples < 1000:
            raise ValueError(f"samples must be >= 1000, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class IntegralResult:
    value: float | np.ndarray
    error_estimate: float
    evaluations: int
    method: str = "tensor_gauss"

    def within_tolerance(self, cfg: IntegratorConfig) -> bool:
        scale = float(np.max(np.abs(self.value)))
        return self.error_estimate <= max(cfg.rel_tol * scale, cfg.abs_tol)


@lru_cache(maxsize=32)
def _hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """3D nodes/weights for the standard normal density (weights sum to 1)."""
    z, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / math.sqrt(2.0 * math.pi)
    nodes = np.stack(np.meshgrid(z, z, z, indexing="ij"), axis=-1).reshape(-1, 3)
    weights = np.einsum("i,j,k->ijk", w, w, w).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _envelope_volume(sigma: np.ndarray) -> float:
    """int d^3p exp(-sum (p_i - c_i)^2 / (2 s_i^2))."""
    return (2.0 * math.pi) ** 1.5 * float(np.prod(sigma))


def _measure(p: np.ndarray, mass: float) -> np.ndarray:
    return 0.5 / np.sqrt(mass * mass + np.einsum("ij,ij->i", p, p))


def _evaluate(f: Integrand, p: np.ndarray) -> np.ndarray:
    values = np.asarray(f(p), dtype=float)
    if values.shape[:1] != (len(p),):
        raise ValueError(f"integrand returned shape {values.shape} for {len(p)} nodes")
    finite = np.isfinite(values.reshape(len(p), -1)).all(axis=1)
    if not finite.all():
        i = int(np.argmin(finite))
        raise IntegrationError(f"integrand is not finite at node {i}, p = {p[i].tolist()}")
    return values


def _weighted_sum(w: np.ndarray, values: np.ndarray) -> np.ndarray:
    if values.ndim == 1:
        return np.sum(w * values)
    return np.sum(w[:, None] * values, axis=0)


def _gauss(f, spec, order, scale, normalized):
    nodes, weights = _hermite_rule(order)
    p = spec.center + spec.sigma * nodes
    w = weights * _measure(p, spec.mass)
    total = _weighted_sum(w, _evaluate(f, p))
    if normalized:
        return total / np.sum(w)
    return scale * _envelope_volume(spec.sigma) * total


def _draws(spec, cfg: IntegratorConfig) -> np.ndarray:
    # Philox is counter based: shard k of a parallel run can jump() to its block.
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    return spec.center + spec.sigma * rng.standard_normal((cfg.samples, 3))


def _monte_carlo(f, spec, cfg, scale, normalized):
    p = _draws(spec, cfg)
    w = _measure(p, spec.mass)
    values = _evaluate(f, p)
    n = len(p)
    wv = w[:, None] * values.reshape(n, -1)
    mean_w = np.mean(w)
    if normalized:
        ratio = np.mean(wv, axis=0) / mean_w
        # delta-method standard error of the ratio estimator
        se = np.std(wv - w[:, None] * ratio, axis=0) / (mean_w * math.sqrt(n))
        value = ratio
    else:
        c = scale * _envelope_volume(spec.sigma)
        value = c * np.mean(wv, axis=0)
        se = c * np.std(wv, axis=0) / math.sqrt(n)
    if values.ndim == 1:
        value = value[0]
    return value, float(np.max(se))


def integrate(
    f: Integrand,
    spec,
    cfg: IntegratorConfig | None = None,
    *,
    scale: float = 1.0,
    normalized: bool = False,
) -> IntegralResult:
    """Integrate ``f`` against the packet envelope with the relativistic measure.

    Parameters
    ----------
    f : callable
        Vectorized integrand, ``(N, 3) -> (N,)`` or ``(N, k)``.
    spec : WavepacketSpec
        Supplies mass, center and widths of the envelope.
    cfg : IntegratorConfig, optional
        Method and accuracy settings; defaults to order-16 Gauss-Hermite.
    scale : float
        Constant multiplying the envelope, e.g. the squared normalization.
    normalized : bool
        Return ``I[f] / I[1]`` instead, the expectation under the normalized
        density.  For Monte Carlo this is the self-normalized estimator and
        the error is its delta-method standard error.
    """
    cfg = cfg or IntegratorConfig()
    if cfg.method == "tensor_gauss":
        k = cfg.order_per_axis
        value = _gauss(f, spec, k, scale, normalized)
        refined = _gauss(f, spec, k + 4, scale, normalized)
        err = float(np.max(np.abs(np.asarray(refined) - np.asarray(value))))
        return IntegralResult(value, err, k**3 + (k + 4) ** 3, cfg.method)
    value, err = _monte_carlo(f, spec, cfg, scale, normalized)
    return IntegralResult(value, err, cfg.samples, cfg.method)


@dataclass(frozen=True)
class CrossValidation:
    first: IntegralResult
    second: IntegralResult
    difference: float
    combined_error: float
    converged: bool

    @property
    def agree(self) -> bool:
        """Both routes consistent: the difference is inside five combined
        error estimates and every deterministic route met its tolerance."""
        return self.converged and self.difference <= 5.0 * self.combined_error


def cross_validate(
    f: Integrand,
    spec,
    cfg_a: IntegratorConfig,
    cfg_b: IntegratorConfig,
    *,
    scale: float = 1.0,
    normalized: bool = False,
) -> CrossValidation:
    """Evaluate ``f`` with two different methods and compare.

    A quadrature whose own refinement estimate misses its tolerance counts as
    a disagreement even if the Monte Carlo error bar happens to cover it.
    """
    if cfg_a.method == cfg_b.method:
        raise ValueError("cross validation needs two different methods")
    a = integrate(f, spec, cfg_a, scale=scale, normalized=normalized)
    b = integrate(f, spec, cfg_b, scale=scale, normalized=normalized)
    diff = float(np.max(np.abs(np.asarray(a.value) - np.asarray(b.value))))
    combined = math.hypot(a.error_estimate, b.error_estimate)
    converged = all(
        r.within_tolerance(c) for r, c in ((a, cfg_a), (b, cfg_b)) if c.method == "tensor_gauss"
    )
    return CrossValidation(a, b, diff, combined, converged)
