import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad, quad
from scipy.special import eval_laguerre

from wigner_oscillator.ensemble import (
    NoiseSpec,
    expect_angle_function,
    free_particle_kernel_moments,
    kernel_moments,
    longtime_phi_squared,
    longtime_phi_squared_series,
    longtime_radial_expectation,
    phase_density,
    s_matrices,
    survival_ground,
    transition_probability,
)
from wigner_oscillator.errors import ConvergenceError
from wigner_oscillator.phase_operator import PI_SQ_OVER_3, phi_squared_diagonals
from wigner_oscillator.weyl import OscillatorSpec, thermal_weyl_transform

ONE = NoiseSpec.from_n_param(1.0)
n_values = st.floats(0.0, 20.0)
times = st.floats(0.0, 200.0)


def gaussian_angle_marginal(cov, phi):
    """Angular marginal of a centred 2-D Gaussian, as a density on [-pi, pi)."""
    inv = np.linalg.inv(cov)
    c, s = math.cos(phi), math.sin(phi)
    return 1.0 / (2 * math.pi * math.sqrt(np.linalg.det(cov)) * (inv[0, 0] * c * c + 2 * inv[0, 1] * c * s + inv[1, 1] * s * s))


class TestNoiseSpec:
    def test_n_param_physical(self):
        osc = OscillatorSpec(mass=2.0, omega=3.0, hbar=0.5)
        noise = NoiseSpec(1.8, osc)
        assert noise.n_param == pytest.approx(1.8 / (2.0 * 9.0 * 0.5))
        assert NoiseSpec.from_n_param(noise.n_param, osc).mu == pytest.approx(1.8)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            NoiseSpec(-1.0)


class TestKernel:
    def test_zero_time(self):
        k = kernel_moments(ONE, 0.0)
        assert k.rotation_angle == 0.0
        assert np.all(k.covariance == 0.0)

    def test_full_period(self):
        np.testing.assert_allclose(kernel_moments(ONE, 2 * math.pi).covariance, math.pi * np.eye(2), atol=1e-14)

    @given(times)
    def test_no_noise(self, wt):
        assert np.all(kernel_moments(NoiseSpec(0.0), wt).covariance == 0.0)

    @settings(max_examples=200)
    @given(n_values, times)
    def test_trig_integrals_and_determinant(self, n, wt):
        s = s_matrices(n, wt)
        assert s.s11 + s.s22 == pytest.approx(wt, abs=1e-12)
        four_det = (1 + n * wt) ** 2 - n * n * math.sin(wt) ** 2
        assert 4 * s.det_a == pytest.approx(four_det, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("wt", [0.3, 2.0, 7.5])
    def test_trig_integrals_by_quadrature(self, wt):
        s = s_matrices(1.0, wt)
        assert s.s11 == pytest.approx(quad(lambda t: math.cos(t) ** 2, 0, wt)[0], abs=1e-12)
        assert s.s22 == pytest.approx(quad(lambda t: math.sin(t) ** 2, 0, wt)[0], abs=1e-12)
        assert s.s12 == pytest.approx(quad(lambda t: math.sin(2 * t), 0, wt)[0], abs=1e-12)

    @given(n_values, times)
    def test_covariance_positive_semidefinite(self, n, wt):
        cov = kernel_moments(NoiseSpec.from_n_param(n), wt).covariance
        assert np.all(np.linalg.eigvalsh(cov) >= -1e-9 * max(1.0, n * wt))
        assert cov[0, 1] == cov[1, 0]

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            kernel_moments(ONE, -1.0)


class TestSurvival:
    def test_zero_time(self):
        assert survival_ground(ONE, 0.0) == 1.0

    def test_half_period(self):
        assert survival_ground(ONE, math.pi) == pytest.approx(1 / (1 + math.pi / 2), rel=1e-15)
        assert survival_ground(ONE, math.pi) == pytest.approx(0.38898, abs=1e-5)

    def test_long_time_asymptote(self):
        assert survival_ground(ONE, 1e3) * 1e3 / 2 == pytest.approx(1.0, rel=3e-3)
        assert survival_ground(ONE, 1e6) * 1e6 / 2 == pytest.approx(1.0, rel=3e-6)

    @given(st.floats(0.0, 20.0), st.floats(0.0, 200.0))
    def test_range(self, n, wt):
        s = survival_ground(NoiseSpec.from_n_param(n), wt)
        assert 0 < s <= 1
        if n * wt > 1e-6:
            assert s < 1

    def test_monotone_at_half_periods(self):
        wt = math.pi * np.arange(0, 40)
        s = survival_ground(ONE, wt)
        assert np.all(np.diff(s) <= 0)

    def test_matches_gaussian_overlap(self):
        # ground overlap after smearing by covariance C is 1/sqrt(det(I + C))
        for wt in (0.4, 2.5, 11.0):
            cov = kernel_moments(ONE, wt).covariance
            assert survival_ground(ONE, wt) == pytest.approx(1 / math.sqrt(np.linalg.det(np.eye(2) + cov)), rel=1e-13)


class TestPhaseDensity:
    def test_zero_time_uniform(self):
        np.testing.assert_array_equal(phase_density(ONE, 0.0, np.linspace(-math.pi, 3, 7)), 1.0)

    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_uniform_when_sine_vanishes(self, k):
        phi = np.linspace(-math.pi, 3, 11)
        np.testing.assert_allclose(phase_density(ONE, k * math.pi, phi), 1.0, rtol=0, atol=2e-15)

    @pytest.mark.parametrize("n,wt", [(1.0, 1.0), (0.3, 4.0), (5.0, 0.7), (1.0, 17.0)])
    def test_matches_gaussian_marginal(self, n, wt):
        noise = NoiseSpec.from_n_param(n)
        cov = 0.5 * np.eye(2) + kernel_moments(noise, wt).covariance
        for phi in np.linspace(-math.pi, 3.0, 9):
            assert phase_density(noise, wt, phi) / (2 * math.pi) == pytest.approx(gaussian_angle_marginal(cov, phi), rel=1e-12)

    def test_normalised_on_grid(self):
        for n in np.linspace(0.0, 5.0, 6):
            for wt in np.linspace(0.0, 30.0, 6):
                noise = NoiseSpec.from_n_param(n)
                total = quad(lambda p: phase_density(noise, wt, p) / (2 * math.pi), -math.pi, math.pi, epsabs=1e-13, limit=200)[0]
                assert total == pytest.approx(1.0, abs=1e-10)

    @given(n_values, times)
    def test_positive(self, n, wt):
        phi = np.linspace(-math.pi, math.pi, 64, endpoint=False)
        assert np.all(phase_density(NoiseSpec.from_n_param(n), wt, phi) > 0)


class TestAngleExpectation:
    def test_unity(self):
        assert expect_angle_function(ONE, 3.3, lambda p: 1.0) == pytest.approx(1.0, abs=1e-10)

    def test_mean_at_zero_time(self):
        assert expect_angle_function(ONE, 0.0, lambda p: p) == pytest.approx(0.0, abs=1e-12)
        assert expect_angle_function(ONE, 0.0, lambda p: p * p) == pytest.approx(PI_SQ_OVER_3, abs=1e-10)

    def test_randomises(self):
        noise = NoiseSpec.from_n_param(1.0)
        assert abs(expect_angle_function(noise, 1e3, lambda p: p)) < 0.01
        assert abs(expect_angle_function(noise, 1e4, lambda p: p)) < 0.01

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_tolerance_error(self):
        with pytest.raises(ConvergenceError):
            expect_angle_function(ONE, 2.0, lambda p: 1.0 if p > 0.123456789 else 0.0, tol=1e-300)


class TestLongTime:
    def test_identity(self):
        assert longtime_radial_expectation(ONE, 1e3, lambda r: np.ones_like(r)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("k", [1e2, 1e3, 1e5])
    def test_energy_growth(self, k):
        assert longtime_radial_expectation(ONE, k, lambda r: r * r) == pytest.approx(k, rel=1e-12)

    @pytest.mark.parametrize("beta", [0.01, 0.1, 1.0, 5.0])
    @pytest.mark.parametrize("k", [1e2, 1e3, 1e4])
    def test_thermal(self, beta, k):
        spec = OscillatorSpec()
        got = longtime_radial_expectation(ONE, k, lambda r: thermal_weyl_transform(beta, spec, r))
        b = beta / 2
        assert got == pytest.approx(1 / (math.cosh(b) + k * math.sinh(b)), rel=1e-9)

    def test_zero_noise_returns_origin_value(self):
        assert longtime_radial_expectation(NoiseSpec(0.0), 5.0, lambda r: 3.0 + r) == 3.0

    @pytest.mark.parametrize("k", [1e3, 1e4])
    def test_phi_squared_matches_series(self, k):
        # the Laguerre-Laplace transform of the radial series, summed term by term
        value = longtime_phi_squared(ONE, k, dim=128)
        series = longtime_phi_squared_series(k, phi_squared_diagonals(128))
        assert abs(value - series) < 1e-4
        assert abs(value - PI_SQ_OVER_3) < 0.01 * PI_SQ_OVER_3

    def test_phi_squared_approaches_uniform(self):
        near = abs(longtime_phi_squared(ONE, 1e4, dim=128) - PI_SQ_OVER_3)
        far = abs(longtime_phi_squared(ONE, 1e3, dim=128) - PI_SQ_OVER_3)
        assert near < far

    def test_phi_squared_rejects_small_dim(self):
        with pytest.raises(ValueError):
            longtime_phi_squared(ONE, 1e3, dim=32)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_oscillatory_integrand_flagged(self):
        with pytest.raises(ConvergenceError):
            longtime_radial_expectation(ONE, 1e3, lambda r: np.cos(400.0 * r), r_head=12.0)


class TestFreeParticle:
    def test_zero_time(self):
        m = free_particle_kernel_moments(NoiseSpec(2.0), OscillatorSpec(), 0.0)
        assert np.all(m.covariance == 0)

    def test_example(self):
        m = free_particle_kernel_moments(NoiseSpec(2.0), OscillatorSpec(mass=1.0), 1.0)
        np.testing.assert_allclose(m.covariance, [[2.0, 1.0], [1.0, 2.0 / 3.0]], rtol=1e-15)

    def test_moment_integrals(self):
        # q(t) = q0 + p0 t/m + (1/m) int_0^t (t - s) dW(s): Ito isometry integrals
        mu, mass, t = 0.7, 1.9, 2.3
        m = free_particle_kernel_moments(NoiseSpec(mu), OscillatorSpec(mass=mass), t, p0=0.4, q0=-1.0)
        assert m.covariance[0, 1] == pytest.approx(mu * quad(lambda s: (t - s) / mass, 0, t)[0])
        assert m.covariance[1, 1] == pytest.approx(mu * quad(lambda s: ((t - s) / mass) ** 2, 0, t)[0])
        np.testing.assert_allclose(m.mean, [0.4, -1.0 + 0.4 * t / mass])


def transition_by_2d_fourier(m, n, noise, wt):
    cov = kernel_moments(noise, wt).covariance

    def f(psi, k):
        c, s = math.cos(psi), math.sin(psi)
        quad_form = cov[0, 0] * c * c + 2 * cov[0, 1] * c * s + cov[1, 1] * s * s
        h = 0.5 * k * k
        return k * math.exp(-h) * eval_laguerre(m, h) * eval_laguerre(n, h) * math.exp(-0.5 * k * k * quad_form) / (2 * math.pi)

    return dblquad(f, 0, 20, -math.pi, math.pi, epsabs=1e-12)[0]


class TestTransition:
    @pytest.mark.parametrize("wt", [1.0, math.pi, 5.0])
    def test_ground_to_ground_is_survival(self, wt):
        assert transition_probability(0, 0, ONE, wt) == pytest.approx(survival_ground(ONE, wt), abs=1e-6)

    def test_completeness(self):
        total = sum(transition_probability(0, n, ONE, 2.0) for n in range(41))
        assert total == pytest.approx(1.0, abs=1e-4)

    def test_completeness_from_excited(self):
        total = sum(transition_probability(3, n, NoiseSpec.from_n_param(0.2), 1.5) for n in range(60))
        assert total == pytest.approx(1.0, abs=1e-4)

    @given(st.integers(0, 6), st.floats(0.0, 20.0))
    @settings(max_examples=20, deadline=None)
    def test_no_noise_is_stationary(self, n, wt):
        assert transition_probability(n, n, NoiseSpec(0.0), wt) == pytest.approx(1.0, abs=1e-9)
        assert transition_probability(n, n + 1, NoiseSpec(0.0), wt) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("m,n,nn,wt", [(0, 0, 1.0, 0.7), (1, 2, 0.5, 3.0), (3, 3, 2.0, 1.2), (0, 4, 1.0, 2.0)])
    def test_angular_reduction(self, m, n, nn, wt):
        noise = NoiseSpec.from_n_param(nn)
        assert transition_probability(m, n, noise, wt) == pytest.approx(transition_by_2d_fourier(m, n, noise, wt), abs=1e-9)

    def test_symmetric_and_bounded(self):
        noise = NoiseSpec.from_n_param(0.7)
        p = np.array([[transition_probability(m, n, noise, 2.2) for n in range(11)] for m in range(11)])
        assert np.max(np.abs(p - p.T)) < 1e-6
        assert np.all(p > -1e-10) and np.all(p < 1 + 1e-10)

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            transition_probability(-1, 0, ONE, 1.0)
