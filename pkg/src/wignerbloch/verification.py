"""Property battery run by ``wignerbloch verify``.

Each check returns a :class:`Check` with a status (``pass``, ``fail`` or
``skip``), a measured margin and a short detail string.  Margins are signed
so that a positive value means the property holds with that much room.
Checks that only make sense for packets inside the small-momentum regime
are skipped, with the reason, when the packet is outside it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import bloch
from .integrator import IntegratorConfig, cross_validate, integrate
from .kinematics import four_velocity, lambda_param, wigner_angle_exact
from .wavepacket import WavepacketSpec, moments, normalize, pi_dispersion, position_dispersion

log = logging.getLogger(__name__)

BETA_GRID = (0.0, 0.5, 1.0, 2.0, 4.0, 20.0)
SIGMA_LADDER = (0.02, 0.01, 0.005)


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    margin: float
    detail: str

    @property
    def failed(self) -> bool:
        return self.status == "fail"


@dataclass(frozen=True)
class Scenario:
    spec: WavepacketSpec
    axis: np.ndarray
    beta: float
    cfg: IntegratorConfig

    @property
    def quadrature(self) -> IntegratorConfig:
        return replace(self.cfg, method="tensor_gauss")

    @property
    def monte_carlo(self) -> IntegratorConfig:
        return replace(self.cfg, method="monte_carlo")


def _result(name, margin, detail) -> Check:
    return Check(name, "pass" if margin >= 0 else "fail", float(margin), detail)


def _skip(name, reason) -> Check:
    return Check(name, "skip", float("nan"), reason)


def _amplitude(s: Scenario, spec=None):
    return normalize(spec or s.spec, s.quadrature, strict=False)


def _centered(spec: WavepacketSpec, scale: float) -> WavepacketSpec:
    """Same shape as ``spec``, centered, widest axis equal to ``scale * m``."""
    sigma = spec.sigma / spec.sigma.max() * scale * spec.mass
    return WavepacketSpec(spec.mass, sigma)


def rest_frame_identity(s: Scenario) -> Check:
    mu = bloch.bloch_exact(_amplitude(s), four_velocity(0.0, s.axis), s.quadrature).mu
    err = float(np.max(np.abs(mu - [0, 0, 1])))
    return _result("rest_frame_identity", 1e-12 - err, f"max |mu - e3| = {err:.3g}")


def physicality(s: Scenario) -> Check:
    a = _amplitude(s)
    worst = max(np.linalg.norm(bloch.bloch_exact(a, four_velocity(b, s.axis), s.quadrature).mu) for b in BETA_GRID)
    return _result("physicality", 1 + 1e-9 - worst, f"max |mu| over beta grid = {float(worst)!r}")


def wigner_unit_circle(s: Scenario) -> Check:
    rng = np.random.Generator(np.random.Philox(s.cfg.seed))
    worst = 0.0
    for _ in range(100):
        m = rng.uniform(0.1, 10.0)
        u = four_velocity(rng.uniform(0, 5), rng.standard_normal(3))
        direction = rng.standard_normal((100, 3))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        p = direction * (rng.uniform(0, 10, 100) * m)[:, None]
        worst = max(worst, float(np.max(wigner_angle_exact(p, u, m).unit_circle_error())))
    return _result("wigner_unit_circle", 1e-12 - worst, f"max |sin^2 + cos^2 - 1| over 1e4 = {worst:.3g}")


def wigner_parallel_identity(s: Scenario) -> Check:
    u = four_velocity(2.0, s.axis)
    p = np.outer(np.linspace(-3, 3, 13), u.direction)
    w = wigner_angle_exact(p, u, s.spec.mass)
    err = float(np.max(np.abs(w.sin_omega)) + np.max(np.abs(w.cos_omega - 1)))
    return Check("wigner_parallel_identity", "pass" if err == 0 else "fail", 0.0 - err, "p parallel to u gives identity")


def depurification_law(s: Scenario) -> Check:
    if not s.spec.nr_valid:
        return _skip("depurification_law", "packet outside the small-momentum regime")
    beta = s.beta or 1.0
    a = _amplitude(s)
    u = four_velocity(beta, s.axis)
    deficit = 1 - bloch.purity_sq_exact(a, u, s.quadrature).value
    predicted = (lambda_param(u) / s.spec.mass) ** 2 * pi_dispersion(a, s.axis, s.quadrature)
    delta = deficit / predicted - 1
    return _result("depurification_law", 0.05 - abs(delta), f"relative deviation {delta:.3g} at beta={beta}")


def depurification_convergence(s: Scenario) -> Check:
    if not s.spec.nr_valid:
        return _skip("depurification_convergence", "packet outside the small-momentum regime")
    beta = s.beta or 1.0
    u = four_velocity(beta, s.axis)
    deltas = []
    for scale in SIGMA_LADDER:
        a = _amplitude(s, _centered(s.spec, scale))
        deficit = 1 - bloch.purity_sq_exact(a, u, s.quadrature).value
        predicted = (lambda_param(u) / s.spec.mass) ** 2 * pi_dispersion(a, s.axis, s.quadrature)
        deltas.append(abs(deficit / predicted - 1))
    margin = min(deltas[0] - deltas[1], deltas[1] - deltas[2])
    return _result("depurification_convergence", margin, "|delta| at sigma/m 0.02, 0.01, 0.005: " + ", ".join(f"{d:.3g}" for d in deltas))


def truncation_order(s: Scenario) -> Check:
    if not s.spec.nr_valid:
        return _skip("truncation_order", "packet outside the small-momentum regime")
    u = four_velocity(s.beta or 1.0, s.axis)
    errs = []
    for scale in SIGMA_LADDER:
        a = _amplitude(s, _centered(s.spec, scale))
        errs.append(np.linalg.norm(bloch.bloch_exact(a, u, s.quadrature).mu - bloch.bloch_approx(a, u, s.quadrature).mu))
    slope = float(np.polyfit(np.log(SIGMA_LADDER), np.log(errs), 1)[0])
    return _result("truncation_order", slope - 2.5, f"fitted exponent {slope:.3f}")


def monotone_in_boost(s: Scenario) -> Check:
    if not s.spec.nr_valid or s.spec.sigma.max() / s.spec.mass > 0.02:
        return _skip("monotone_in_boost", "needs sigma/m <= 0.02 inside the small-momentum regime")
    a = _amplitude(s, WavepacketSpec(s.spec.mass, s.spec.sigma))
    deficits = [1 - bloch.bloch_exact(a, four_velocity(b, s.axis), s.quadrature).purity_sq for b in BETA_GRID]
    margin = float(np.min(np.diff(deficits))) + 1e-10
    return _result("monotone_in_boost", margin, "deficits " + ", ".join(f"{d:.4g}" for d in deficits))


def axis_symmetry(s: Scenario) -> Check:
    spec = s.spec
    if np.any(spec.center != 0) or np.ptp(spec.sigma) != 0:
        return _skip("axis_symmetry", "needs a centered isotropic packet")
    if abs(s.axis[2]) > 1e-12 and np.hypot(s.axis[0], s.axis[1]) > 1e-12:
        # the second-order term tilts mu by (lam sigma)^2 n3 n_perp / 2 otherwise
        return _skip("axis_symmetry", "needs a boost axis along or perpendicular to e3")
    mu = bloch.bloch_exact(_amplitude(s), four_velocity(s.beta or 1.0, s.axis), s.quadrature).mu
    transverse = float(np.hypot(mu[0], mu[1]))
    return _result("axis_symmetry", 1e-9 - transverse, f"transverse |mu| = {transverse:.3g}")


def uncertainty_chain(s: Scenario) -> Check:
    a = _amplitude(s)
    u = four_velocity(s.beta or 1.0, s.axis)
    mom = moments(a, s.axis, s.quadrature)
    lam = lambda_param(u)
    product = mom.pi_disp_sq * mom.x_disp_sq
    gap = bloch.purity_sq_bound(lam, s.spec.mass, mom.x_disp_sq) - bloch.purity_sq_formula(mom.pi_disp_sq, lam, s.spec.mass)
    return _result("uncertainty_chain", min(product - 0.25, gap + 1e-12), f"(dPi)^2 (dx)^2 = {product:.6g}, bound gap {gap:.3g}")


def random_nr_spec(rng: np.random.Generator) -> WavepacketSpec:
    """A random Gaussian packet satisfying the small-momentum flag."""
    m = rng.uniform(0.5, 2.0)
    sigma = rng.uniform(0.002, 0.03, 3) * m
    direction = rng.standard_normal(3)
    center = direction / np.linalg.norm(direction) * rng.uniform(0, 0.05) * m
    return WavepacketSpec(m, sigma, center, rng.uniform(-50, 50, 3))


def uncertainty_random(s: Scenario, count: int = 100) -> Check:
    rng = np.random.Generator(np.random.Philox(s.cfg.seed + 1))
    cfg = replace(s.quadrature, order_per_axis=8)
    worst_product, worst_gap = np.inf, np.inf
    for _ in range(count):
        spec = random_nr_spec(rng)
        n = rng.standard_normal(3)
        lam = rng.uniform(0, 1)
        a = normalize(spec, cfg)
        pi_sq = pi_dispersion(a, n, cfg)
        x_sq = position_dispersion(a, cfg)
        worst_product = min(worst_product, pi_sq * x_sq - 0.25)
        worst_gap = min(worst_gap, bloch.purity_sq_bound(lam, spec.mass, x_sq) - bloch.purity_sq_formula(pi_sq, lam, spec.mass))
    return _result("uncertainty_random", min(worst_product, worst_gap + 1e-12), f"min product excess {worst_product:.3g}, min bound gap {worst_gap:.3g} over {count} packets")


def quadrature_convergence(s: Scenario) -> Check:
    if not s.spec.nr_valid:
        return _skip("quadrature_convergence", "packet outside the small-momentum regime")
    u = four_velocity(s.beta or 1.0, s.axis)
    f = lambda p: bloch.rotated_spin(p, u, s.spec.mass)
    lo = integrate(f, s.spec, replace(s.quadrature, order_per_axis=8), normalized=True).value
    hi = integrate(f, s.spec, replace(s.quadrature, order_per_axis=16), normalized=True).value
    rel = float(np.linalg.norm(hi - lo) / np.linalg.norm(hi))
    return _result("quadrature_convergence", 1e-10 - rel, f"order 8 -> 16 relative change {rel:.3g}")


def cross_validation(s: Scenario) -> Check:
    u = four_velocity(s.beta or 1.0, s.axis)
    cv = cross_validate(lambda p: bloch.rotated_spin(p, u, s.spec.mass), s.spec, s.quadrature, s.monte_carlo, normalized=True)
    detail = (
        f"|delta| = {cv.difference:.3g}, combined error {cv.combined_error:.3g}, "
        f"quadrature converged: {cv.converged}"
    )
    margin = 5 * cv.combined_error - cv.difference if cv.converged else -cv.first.error_estimate
    return Check("cross_validation", "pass" if cv.agree else "fail", float(margin), detail)


def mc_error_scaling(s: Scenario) -> Check:
    f = lambda p: np.sum(np.cross(p, s.axis) ** 2, axis=1)
    errors = [integrate(f, s.spec, replace(s.monte_carlo, samples=n)).error_estimate for n in (10**4, 10**5, 10**6)]
    ratios = [errors[i] / errors[i + 1] / np.sqrt(10) for i in range(2)]
    margin = min(min(r, 1 / r) for r in ratios) - 0.5
    return _result("mc_error_scaling", margin, "SE ratio / sqrt(10): " + ", ".join(f"{r:.3f}" for r in ratios))


def determinism(s: Scenario) -> Check:
    u = four_velocity(s.beta or 1.0, s.axis)
    f = lambda p: bloch.rotated_spin(p, u, s.spec.mass)
    cfg = replace(s.monte_carlo, samples=min(s.cfg.samples, 10**5))
    same = all(
        np.array_equal(integrate(f, s.spec, c).value, integrate(f, s.spec, c).value) for c in (s.quadrature, cfg)
    )
    return Check("determinism", "pass" if same else "fail", 0.0, "repeat integrations bit-identical" if same else "repeat integrations differ")


def density_roundtrip(s: Scenario) -> Check:
    mu = bloch.bloch_exact(_amplitude(s), four_velocity(s.beta or 1.0, s.axis), s.quadrature).mu
    rho = bloch.density_matrix(mu)
    err = float(np.max(np.abs(bloch.bloch_from_density(rho) - mu)))
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    eig = np.linalg.eigvalsh(rho)
    return _result("density_roundtrip", 1e-12 - max(err, herm, abs(np.trace(rho) - 1), -eig.min()), f"Tr(rho sigma) error {err:.3g}")


BATTERY: tuple[Callable[[Scenario], Check], ...] = (
    rest_frame_identity,
    physicality,
    wigner_unit_circle,
    wigner_parallel_identity,
    depurification_law,
    depurification_convergence,
    truncation_order,
    monotone_in_boost,
    axis_symmetry,
    uncertainty_chain,
    uncertainty_random,
    quadrature_convergence,
    cross_validation,
    mc_error_scaling,
    determinism,
    density_roundtrip,
)


def run_battery(s: Scenario) -> list[Check]:
    checks = []
    for check in BATTERY:
        try:
            checks.append(check(s))
        except ArithmeticError as exc:
            # a numerical failure inside one check fails that check only
            checks.append(Check(check.__name__, "fail", float("nan"), f"{type(exc).__name__}: {exc}"))
        log.info("%s: %s", checks[-1].name, checks[-1].status)
    return checks
