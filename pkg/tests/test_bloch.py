import math

import numpy as np
import pytest

from wignerbloch import (
    E1,
    E2,
    E3,
    BlochVector,
    IntegratorConfig,
    WavepacketSpec,
    bloch_approx,
    bloch_exact,
    bloch_from_density,
    density_matrix,
    four_velocity,
    lambda_param,
    normalize,
    pi_dispersion,
    purity_sq_bound,
    purity_sq_exact,
    purity_sq_formula,
    purity_sq_small_velocity,
    report,
)

LAM1 = math.tanh(0.5)


class TestBlochExact:
    def test_rest_frame(self, iso, quad):
        mu = bloch_exact(iso, four_velocity(0.0, E1), quad).mu
        np.testing.assert_allclose(mu, [0, 0, 1], atol=1e-12)

    def test_isotropic_against_cubature(self, iso, quad):
        # scipy nquad over the scaled box [-7, 7]^3 (tests/oracles.py --slow)
        mu = bloch_exact(iso, four_velocity(1.0, E1), quad).mu
        assert mu[2] == pytest.approx(0.999989326178429, abs=2e-12)
        # leading-order window 1 - lam^2 sigma^2 / (2 m^2)
        assert 1 - mu[2] == pytest.approx(LAM1**2 * 1e-4 / 2, rel=1e-3)

    def test_drift_transverse_component(self, quad):
        a = normalize(WavepacketSpec.isotropic(1.0, 0.01, (0, 0, 0.05)), quad)
        u = four_velocity(0.5, E1)
        mu = bloch_exact(a, u, quad).mu
        # independent numpy Monte Carlo, 1e7 draws (tests/oracles.py)
        ref = np.array([-1.22357658e-02, -9.78396857e-10, 9.99922152e-01])
        se = np.array([7.72958518e-07, 4.82709132e-09, 9.54883615e-09])
        assert np.all(np.abs(mu - ref) < 4 * se)
        # first-order term lam/m e3 x (<p> x n) with <p> ~ (0, 0, 0.05)
        first_order = lambda_param(u) * np.cross(E3, np.cross([0, 0, 0.05], E1))
        assert mu[0] == pytest.approx(first_order[0], rel=2e-3)

    def test_physical_length(self, quad, rng):
        for _ in range(10):
            spec = WavepacketSpec(1.0, rng.uniform(0.01, 0.3, 3), rng.uniform(-0.3, 0.3, 3))
            a = normalize(spec, quad, strict=False)
            for beta in (0.5, 3.0, 20.0):
                u = four_velocity(beta, rng.standard_normal(3))
                assert np.linalg.norm(bloch_exact(a, u, quad).mu) <= 1 + 1e-9

    @pytest.mark.parametrize("n", [E1, E2, E3, np.array([3.0, -4.0, 0.0]) / 5])
    def test_centered_isotropic_stays_on_axis(self, iso, quad, n):
        mu = bloch_exact(iso, four_velocity(1.0, n), quad).mu
        assert math.hypot(mu[0], mu[1]) < 1e-9

    def test_oblique_axis_tilts(self, iso, quad):
        # <q (q.e3)> = sigma^2 (e3 - n n3) leaves -(lam sigma)^2 n3 n_perp / 2
        n = np.array([1.0, 2.0, 3.0]) / math.sqrt(14)
        mu = bloch_exact(iso, four_velocity(1.0, n), quad).mu
        expected = -0.5 * LAM1**2 * 1e-4 * n[2] * n[:2]
        np.testing.assert_allclose(mu[:2], expected, rtol=1e-3)

    def test_depurification_monotone_in_boost(self, iso, quad):
        deficits = [1 - bloch_exact(iso, four_velocity(b, E1), quad).purity_sq for b in (0, 0.5, 1, 2, 4, 20)]
        assert np.all(np.diff(deficits) >= -1e-10)


class TestBlochApprox:
    def test_rest_frame(self, iso, quad):
        np.testing.assert_array_equal(bloch_approx(iso, four_velocity(0.0, E2), quad).mu, [0, 0, 1])

    def test_boost_along_polarization(self, iso, quad):
        mu = bloch_approx(iso, four_velocity(1.0, E3), quad).mu
        assert mu[2] == pytest.approx(1 - LAM1**2 * 1e-4, abs=1e-8)

    def test_transverse_boost(self, iso, quad):
        mu = bloch_approx(iso, four_velocity(1.0, E1), quad).mu
        assert mu[2] == pytest.approx(1 - LAM1**2 * 1e-4 / 2, abs=1e-8)

    def test_truncation_order(self, quad):
        u = four_velocity(1.0, np.array([1.0, 2.0, 2.0]))
        sizes = (0.02, 0.01, 0.005)
        errs = []
        for s in sizes:
            a = normalize(WavepacketSpec(1.0, np.array([1.0, 0.7, 0.5]) * s), quad)
            errs.append(np.linalg.norm(bloch_exact(a, u, quad).mu - bloch_approx(a, u, quad).mu))
        assert np.polyfit(np.log(sizes), np.log(errs), 1)[0] >= 2.5

    def test_marked_as_series(self, iso, quad):
        assert bloch_approx(iso, four_velocity(1.0, E1), quad).kind == "approx"


class TestPurityFormulas:
    def test_formula(self):
        assert purity_sq_formula(3e-4, 0.0, 1.0) == 1.0
        assert purity_sq_formula(3e-4, 1.0, 2.0) == pytest.approx(1 - 3e-4 / 4)

    def test_formula_not_clamped(self):
        assert purity_sq_formula(4.0, 0.9, 1.0) < 0

    def test_formula_worked_example(self, iso, quad):
        lam = lambda_param(four_velocity(1.0, E1))
        value = purity_sq_formula(pi_dispersion(iso, E3, quad), lam, 1.0)
        assert 1 - value == pytest.approx(4.272e-5, rel=1e-3)

    def test_small_velocity(self):
        assert purity_sq_small_velocity([0, 0, 0], 1e-4, 1.0) == 1.0
        assert purity_sq_small_velocity([0.1, 0, 0], 1e-4, 1.0) == pytest.approx(1 - 2.5e-7, abs=1e-16)
        with pytest.raises(ValueError):
            purity_sq_small_velocity([0.6, 0.8, 0], 1e-4, 1.0)

    def test_small_velocity_matches_formula(self):
        beta = 0.01
        v = math.tanh(beta)
        lam = lambda_param(four_velocity(beta, E1))
        a = 1 - purity_sq_small_velocity([v, 0, 0], 1e-4, 1.0)
        b = 1 - purity_sq_formula(1e-4, lam, 1.0)
        assert a == pytest.approx(b, rel=1e-4)

    def test_bound(self):
        assert purity_sq_bound(0.0, 1.0, 10.0) == 1.0
        assert purity_sq_bound(1.0, 1.0, 1e8) == pytest.approx(1.0, abs=1e-8)
        with pytest.raises(ValueError):
            purity_sq_bound(0.5, 1.0, 0.0)

    def test_bound_isotropic(self):
        sigma, lam = 0.01, LAM1
        bound = purity_sq_bound(lam, 1.0, 3 / (4 * sigma**2))
        assert bound == pytest.approx(1 - lam**2 * sigma**2 / 3)
        for pi_sq in (sigma**2, 2 * sigma**2):
            assert purity_sq_formula(pi_sq, lam, 1.0) < bound


class TestDensityMatrix:
    @pytest.mark.parametrize(
        "mu, diag",
        [((0, 0, 1), (1, 0)), ((0, 0, 0), (0.5, 0.5)), ((0, 0, 0.8), (0.9, 0.1))],
    )
    def test_diagonal_cases(self, mu, diag):
        np.testing.assert_allclose(density_matrix(mu), np.diag(diag), atol=1e-15)

    def test_round_trip(self, rng):
        for _ in range(20):
            mu = rng.standard_normal(3)
            mu *= rng.uniform(0, 1) / np.linalg.norm(mu)
            rho = density_matrix(mu)
            np.testing.assert_allclose(rho, rho.conj().T)
            assert np.trace(rho).real == pytest.approx(1.0)
            np.testing.assert_allclose(np.linalg.eigvalsh(rho), [(1 - np.linalg.norm(mu)) / 2, (1 + np.linalg.norm(mu)) / 2], atol=1e-14)
            np.testing.assert_allclose(bloch_from_density(rho), mu, atol=1e-15)

    def test_unphysical(self):
        with pytest.raises(ValueError):
            density_matrix([0, 0, 1.01])
        with pytest.raises(ValueError):
            BlochVector([0.8, 0.8, 0.0])


class TestPurityExact:
    def test_quadrature_matches_vector(self, iso, quad):
        u = four_velocity(1.0, E1)
        assert purity_sq_exact(iso, u, quad).value == pytest.approx(bloch_exact(iso, u, quad).purity_sq, abs=1e-15)

    def test_mc_error_bar(self, iso, quad, mc):
        u = four_velocity(1.0, E1)
        q = purity_sq_exact(iso, u, quad).value
        m = purity_sq_exact(iso, u, mc)
        assert 0 < m.error_estimate < 1e-7
        assert abs(q - m.value) < 4 * m.error_estimate


class TestReport:
    def test_rest_frame(self, iso, quad):
        r = report(iso, four_velocity(0.0, E1), quad)
        for value in (r.purity_sq_exact, r.purity_sq_formula, r.purity_sq_bound):
            assert value == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(r.mu_exact.mu, E3, atol=1e-12)
        np.testing.assert_allclose(r.mu_approx.mu, E3, atol=1e-12)

    def test_transverse_boost(self, iso, quad):
        r = report(iso, four_velocity(1.0, E1), quad)
        predicted = LAM1**2 * 1e-4
        assert abs(r.deficit - predicted) / predicted < 0.02
        assert r.purity_sq_exact == pytest.approx(r.mu_exact.purity_sq, abs=1e-12)
        assert r.purity_sq_formula <= r.purity_sq_bound + 1e-12
        assert not r.regime_warning

    def test_ultrarelativistic(self, iso, quad):
        r = report(iso, four_velocity(20.0, E3), quad)
        assert abs(r.deficit - 2e-4) / 2e-4 < 0.02

    def test_regime_warning(self, quad):
        a = normalize(WavepacketSpec.isotropic(1.0, 0.1), quad)
        assert report(a, four_velocity(1.0, E1), quad).regime_warning
