import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oamsat.lg_modes import LGMode, effective_radius, eigenstate_amplitude
from oamsat.numerics import gauss_legendre
from oamsat.realization import (
    AoMode,
    ApertureSpec,
    TurbulenceRealization,
    perturbed_field,
    phase_correlation,
    phase_structure,
    sample_realization,
    shape_matrix,
)
from oamsat.turbulence import AtmosphereModel, ChannelGeometry, TurbulenceStats, channel_stats

WAIST = 0.15
LAMBDA = 1550e-9
Z_RECEIVER = 497e3

PAPER_STATS = channel_stats(
    ChannelGeometry(H=500e3, h0=3000.0, theta_z=0.0, wavelength=LAMBDA),
    AtmosphereModel(),
    WAIST,
)

# exaggerated fluctuations to stress the geometry handling
STRONG_STATS = TurbulenceStats(
    sigma_R2=1.0,
    sigma_I2=1.0,
    r_F=0.3,
    Omega=PAPER_STATS.Omega,
    theta_mean=PAPER_STATS.theta_mean,
    var_x0=0.09,
    var_theta=0.2,
    cov_theta=-0.1,
)


def vacuum_stats(omega: float = 0.1) -> TurbulenceStats:
    return TurbulenceStats(
        sigma_R2=0.0,
        sigma_I2=0.0,
        r_F=1e6,
        Omega=omega,
        theta_mean=math.log(1.0 / omega**2),
        var_x0=0.0,
        var_theta=0.0,
        cov_theta=0.0,
    )


def mode(l=2) -> LGMode:
    return LGMode(p=0, l=l, w0=WAIST, wavelength=LAMBDA)


def identity_realization(l0: int, z: float = Z_RECEIVER) -> TurbulenceRealization:
    r0l = effective_radius(mode(l0), z)
    return TurbulenceRealization(x0=0.0, y0=0.0, W1=r0l, W2=r0l, phi=0.0)


class TestValidation:
    def test_realization_rejects_bad_values(self):
        with pytest.raises(ValueError):
            TurbulenceRealization(x0=0.0, y0=0.0, W1=0.0, W2=1.0, phi=0.0)
        with pytest.raises(ValueError):
            TurbulenceRealization(x0=0.0, y0=0.0, W1=1.0, W2=1.0, phi=math.pi / 2)
        with pytest.raises(ValueError):
            TurbulenceRealization(x0=0.0, y0=0.0, W1=1.0, W2=1.0, phi=-0.1)

    def test_aperture_rejects_bad_radii(self):
        with pytest.raises(ValueError):
            ApertureSpec(r_a=0.0, r_t=0.3)
        with pytest.raises(ValueError):
            ApertureSpec(r_a=3.7, r_t=-0.1)


class TestSampleRealization:
    def test_degenerate_stats_give_deterministic_output(self):
        stats = vacuum_stats(omega=0.1)
        rng = np.random.default_rng(5)
        real = sample_realization(stats, l0=3, w0=WAIST, rng=rng)
        assert real.x0 == 0.0 and real.y0 == 0.0
        expected = WAIST * math.exp(stats.theta_mean / 2.0) * math.sqrt(4.0)
        assert real.W1 == pytest.approx(expected, rel=1e-15)
        assert real.W2 == pytest.approx(expected, rel=1e-15)
        assert 0.0 <= real.phi < math.pi / 2

    def test_identical_seeds_identical_realizations(self):
        for seed in (0, 99, 2**40):
            a = sample_realization(PAPER_STATS, 2, WAIST, np.random.default_rng(seed))
            b = sample_realization(PAPER_STATS, 2, WAIST, np.random.default_rng(seed))
            assert a == b

    def test_same_seed_shares_draws_across_l0(self):
        a = sample_realization(PAPER_STATS, 0, WAIST, np.random.default_rng(123))
        b = sample_realization(PAPER_STATS, 3, WAIST, np.random.default_rng(123))
        assert a.x0 == b.x0 and a.y0 == b.y0 and a.phi == b.phi
        assert b.W1 / a.W1 == pytest.approx(2.0, rel=1e-14)  # sqrt(4)/sqrt(1)

    def test_sample_moments(self):
        n = 100_000
        rng = np.random.default_rng(2024)
        stats = STRONG_STATS
        l0 = 2
        log_w1 = np.empty(n)
        log_w2 = np.empty(n)
        x0 = np.empty(n)
        for i in range(n):
            real = sample_realization(stats, l0, WAIST, rng)
            log_w1[i] = math.log(real.W1**2 / (WAIST**2 * (abs(l0) + 1)))
            log_w2[i] = math.log(real.W2**2 / (WAIST**2 * (abs(l0) + 1)))
            x0[i] = real.x0
        # mean of the log-width variables
        se_mean = math.sqrt(stats.var_theta / n)
        assert abs(log_w1.mean() - stats.theta_mean) < 4 * se_mean
        assert abs(log_w2.mean() - stats.theta_mean) < 4 * se_mean
        # cross-correlation of the pair
        rho = stats.cov_theta / stats.var_theta
        sample_rho = np.corrcoef(log_w1, log_w2)[0, 1]
        se_rho = (1.0 - rho**2) / math.sqrt(n)
        assert abs(sample_rho - rho) < 4 * se_rho
        # centroid variance
        se_var = stats.var_x0 * math.sqrt(2.0 / n)
        assert abs(x0.var() - stats.var_x0) < 4 * se_var

    def test_phi_stays_in_quadrant(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            real = sample_realization(PAPER_STATS, 1, WAIST, rng)
            assert 0.0 <= real.phi < math.pi / 2


class TestShapeMatrix:
    def test_equal_axes_give_rotation(self):
        l0 = 2
        r0l = effective_radius(mode(l0), Z_RECEIVER)
        real = TurbulenceRealization(x0=0.0, y0=0.0, W1=r0l, W2=r0l, phi=0.7)
        s, det = shape_matrix(real, l0, mode(l0), Z_RECEIVER)
        assert det == pytest.approx(1.0, rel=1e-14)
        np.testing.assert_allclose(s @ s.T, np.eye(2), atol=1e-14)

    def test_zero_rotation_is_diagonal(self):
        l0 = 1
        real = TurbulenceRealization(x0=0.0, y0=0.0, W1=1.5, W2=2.5, phi=0.0)
        s, det = shape_matrix(real, l0, mode(l0), Z_RECEIVER)
        r0l = effective_radius(mode(l0), Z_RECEIVER)
        np.testing.assert_allclose(
            s, [[1.5 / r0l, 0.0], [0.0, 2.5 / r0l]], rtol=1e-14
        )
        assert det == pytest.approx(1.5 * 2.5 / r0l**2, rel=1e-14)

    def test_determinant_equals_singular_value_product(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            real = sample_realization(STRONG_STATS, 3, WAIST, rng)
            s, det = shape_matrix(real, 3, mode(3), Z_RECEIVER)
            singular = np.linalg.svd(s, compute_uv=False)
            assert det == pytest.approx(float(np.prod(singular)), rel=1e-12)
            assert det > 0

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(ValueError):
            shape_matrix(identity_realization(0), 0, mode(0), 0.0)


class TestPerturbedField:
    def test_identity_transform_matches_eigenstate(self):
        l0 = 3
        m = mode(l0)
        real = identity_realization(l0)
        r = np.linspace(0.01, 4.0, 23)
        theta = np.linspace(0.0, 2 * math.pi, 23, endpoint=False)
        got = perturbed_field(m, real, r, theta, Z_RECEIVER)
        want = eigenstate_amplitude(m, r, theta, Z_RECEIVER)
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_pure_displacement_shifts_field(self):
        l0 = 2
        m = mode(l0)
        r0l = effective_radius(m, Z_RECEIVER)
        d = 0.8
        real = TurbulenceRealization(x0=d, y0=0.0, W1=r0l, W2=r0l, phi=0.0)
        shifted = perturbed_field(m, real, d, 0.0, Z_RECEIVER)
        origin = eigenstate_amplitude(m, 0.0, 0.0, Z_RECEIVER)
        assert shifted == pytest.approx(origin, rel=1e-12)

    @pytest.mark.parametrize("stats,n_cases", [(PAPER_STATS, 60), (STRONG_STATS, 40)])
    def test_power_conservation(self, stats, n_cases):
        rng = np.random.default_rng(31)
        n_theta = 256
        theta = 2 * math.pi * np.arange(n_theta) / n_theta
        for _ in range(n_cases):
            l0 = int(rng.integers(-4, 5))
            m = mode(l0)
            real = sample_realization(stats, l0, WAIST, rng)
            s, _ = shape_matrix(real, l0, m, Z_RECEIVER)
            stretch = float(np.linalg.norm(s, 2))
            reach = math.hypot(real.x0, real.y0) + 8.0 * stretch * effective_radius(
                m, Z_RECEIVER
            )
            rule = gauss_legendre(400, 0.0, reach)
            field = perturbed_field(
                m, real, rule.nodes[:, None], theta[None, :], Z_RECEIVER
            )
            power = float(
                np.sum(rule.weights[:, None] * rule.nodes[:, None] * np.abs(field) ** 2)
                * (2 * math.pi / n_theta)
            )
            assert power == pytest.approx(1.0, abs=1e-6)


class TestPhaseStructure:
    def test_zero_separation(self):
        assert phase_structure(0.0, 1.0) == 0.0

    def test_at_coherence_length(self):
        assert phase_structure(2.5, 2.5) == pytest.approx(6.88, rel=1e-15)

    def test_power_law_doubling(self):
        ratio = phase_structure(2.0, 0.7) / phase_structure(1.0, 0.7)
        assert ratio == pytest.approx(2.0 ** (5.0 / 3.0), rel=1e-14)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            phase_structure(-1.0, 1.0)
        with pytest.raises(ValueError):
            phase_structure(1.0, 0.0)


class TestPhaseCorrelation:
    def test_zero_separation_angle(self):
        assert phase_correlation(2.0, 0.0, 0.5, AoMode(False)) == 1.0

    def test_on_axis(self):
        assert phase_correlation(0.0, 1.3, 0.5, AoMode(False)) == 1.0

    def test_antipodal(self):
        r, r_f = 1.7, 0.6
        expected = math.exp(-6.88 * 2 ** (2.0 / 3.0) * (r / r_f) ** (5.0 / 3.0))
        assert phase_correlation(r, math.pi, r_f, AoMode(False)) == pytest.approx(
            expected, rel=1e-14
        )

    def test_ao_forces_unity(self):
        assert phase_correlation(2.0, 1.0, 0.5, AoMode(True)) == 1.0
        values = phase_correlation(np.linspace(0, 3, 5), 1.0, 0.5, AoMode(True))
        np.testing.assert_array_equal(values, np.ones(5))

    @given(
        r=st.floats(min_value=0.0, max_value=10.0),
        dtheta=st.floats(min_value=-10.0, max_value=10.0),
    )
    @settings(max_examples=120, deadline=None)
    def test_even_and_periodic(self, r, dtheta):
        base = phase_correlation(r, dtheta, 0.8, AoMode(False))
        assert phase_correlation(r, -dtheta, 0.8, AoMode(False)) == pytest.approx(
            base, rel=1e-12
        )
        assert phase_correlation(r, dtheta + 2 * math.pi, 0.8, AoMode(False)) == pytest.approx(
            base, rel=1e-12
        )

    @given(
        r1=st.floats(min_value=0.01, max_value=5.0),
        factor=st.floats(min_value=1.01, max_value=10.0),
        dtheta=st.floats(min_value=0.01, max_value=math.pi),
    )
    @settings(max_examples=120, deadline=None)
    def test_strictly_decreasing_in_radius(self, r1, factor, dtheta):
        near = phase_correlation(r1, dtheta, 0.8, AoMode(False))
        far = phase_correlation(r1 * factor, dtheta, 0.8, AoMode(False))
        assert far < near

    @given(
        r=st.floats(min_value=0.0, max_value=6.0),
        dtheta=st.floats(min_value=-7.0, max_value=7.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_consistent_with_composed_structure_function(self, r, dtheta):
        # independent composition: chordal separation into the structure function
        chord = abs(2.0 * r * math.sin(dtheta / 2.0))
        composed = math.exp(-0.5 * phase_structure(chord, 0.8))
        direct = phase_correlation(r, dtheta, 0.8, AoMode(False))
        assert abs(direct - composed) <= 1e-12
