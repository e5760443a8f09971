from dataclasses import replace

import numpy as np
import pytest

from oamsat.detection import DetectionGrid
from oamsat.errors import GridResolutionError, ValidityError
from oamsat.lg_modes import LGMode, effective_radius
from oamsat.realization import AoMode, ApertureSpec
from oamsat.simulation import (
    SimConfig,
    resolve_aperture,
    run,
    sweep_altitude,
    sweep_ground,
    sweep_wavelength,
    toggle_ao,
    worker_count,
)
from oamsat.turbulence import AtmosphereModel, ChannelGeometry

SMOKE_GRID = DetectionGrid(n_radial=48, n_azimuthal=256, l_window=8)

PAPER_GEOM = ChannelGeometry(H=500e3, h0=3000.0, theta_z=0.0, wavelength=1550e-9)


def smoke_config(**overrides) -> SimConfig:
    defaults = dict(
        geometry=PAPER_GEOM,
        atmosphere=AtmosphereModel(),
        l0_set=(0, 1, 2),
        n_realizations=8,
        grid=SMOKE_GRID,
        master_seed=42,
    )
    defaults.update(overrides)
    return SimConfig(**defaults)


class TestSimConfigValidation:
    def test_rejects_l0_outside_hilbert_space(self):
        with pytest.raises(ValidityError):
            smoke_config(l0_set=(0, 5))

    def test_rejects_empty_l0_set(self):
        with pytest.raises(ValidityError):
            smoke_config(l0_set=())

    def test_rejects_zero_realizations(self):
        with pytest.raises(ValidityError):
            smoke_config(n_realizations=0)

    def test_rejects_narrow_l_window(self):
        with pytest.raises(ValidityError):
            smoke_config(grid=DetectionGrid(n_radial=48, n_azimuthal=256, l_window=6))

    def test_rejects_sub_production_grid(self):
        with pytest.raises(ValidityError):
            smoke_config(grid=DetectionGrid(n_radial=16, n_azimuthal=256, l_window=8))
        with pytest.raises(ValidityError):
            smoke_config(grid=DetectionGrid(n_radial=48, n_azimuthal=128, l_window=8))

    def test_rejects_bad_seed(self):
        with pytest.raises(ValidityError):
            smoke_config(master_seed=-1)
        with pytest.raises(ValidityError):
            smoke_config(master_seed=2**64)

    def test_rejects_unknown_aperture_mode(self):
        with pytest.raises(ValidityError):
            smoke_config(aperture="automatic")


class TestApertureResolution:
    def test_auto_aperture_uses_widest_mode(self):
        config = smoke_config()
        aperture = resolve_aperture(config)
        mode = LGMode(0, 4, 0.15, 1550e-9)
        assert aperture.r_t == pytest.approx(effective_radius(mode, 0.0), rel=1e-15)
        assert aperture.r_a == pytest.approx(
            effective_radius(mode, PAPER_GEOM.path_length), rel=1e-15
        )

    def test_explicit_aperture_passes_through(self):
        spec = ApertureSpec(r_a=2.0, r_t=0.3)
        config = smoke_config(aperture=spec)
        assert resolve_aperture(config) is spec

    def test_span_override(self):
        config = smoke_config()
        aperture = resolve_aperture(config, L_max=500e3)
        mode = LGMode(0, 4, 0.15, 1550e-9)
        assert aperture.r_a == pytest.approx(effective_radius(mode, 500e3), rel=1e-15)


class TestRun:
    def test_near_vacuum_single_realization(self):
        # ground station above the turbulent layer, deep far field
        geom = ChannelGeometry(H=500e3, h0=20e3, theta_z=0.0, wavelength=1550e-9)
        config = smoke_config(geometry=geom, n_realizations=1, ao=AoMode(True))
        result = run(config)
        for l0 in config.l0_set:
            assert result.row(l0).probability(l0) >= 0.99
            np.testing.assert_array_equal(result.row(l0).stderr, 0.0)

    def test_rows_cover_configured_set_and_window(self):
        config = smoke_config()
        result = run(config)
        assert set(result.rows) == set(config.l0_set)
        for row in result.rows.values():
            assert row.l_values == tuple(range(-8, 9))
            assert row.n_realizations == config.n_realizations

    def test_deterministic_for_fixed_seed(self):
        config = smoke_config()
        a, b = run(config), run(config)
        for l0 in config.l0_set:
            np.testing.assert_array_equal(a.row(l0).mean, b.row(l0).mean)
            np.testing.assert_array_equal(a.row(l0).stderr, b.row(l0).stderr)

    def test_worker_count_does_not_change_results(self, monkeypatch):
        config = smoke_config()
        monkeypatch.setenv("OAMSAT_WORKERS", "1")
        assert worker_count() == 1
        serial = run(config)
        monkeypatch.setenv("OAMSAT_WORKERS", "3")
        assert worker_count() == 3
        parallel = run(config)
        for l0 in config.l0_set:
            np.testing.assert_array_equal(serial.row(l0).mean, parallel.row(l0).mean)
            np.testing.assert_array_equal(serial.row(l0).stderr, parallel.row(l0).stderr)

    def test_worker_count_rejects_nonpositive(self, monkeypatch):
        monkeypatch.setenv("OAMSAT_WORKERS", "0")
        with pytest.raises(ValidityError):
            worker_count()

    def test_seed_changes_results(self):
        a = run(smoke_config())
        b = run(smoke_config(master_seed=43))
        assert any(
            not np.array_equal(a.row(l0).mean, b.row(l0).mean) for l0 in (0, 1, 2)
        )

    def test_grid_failure_reports_realization_index(self):
        # sea-level coherence length (~8 cm) needs far more than 256 azimuthal
        # samples, so the self-check must trip and name the realization
        geom = ChannelGeometry(H=500e3, h0=0.0, theta_z=0.0, wavelength=1550e-9)
        config = smoke_config(
            geometry=geom, n_realizations=2, l0_set=(2,), verify_grid=True
        )
        with pytest.raises(GridResolutionError, match=r"realization 0"):
            run(config)


class TestSweeps:
    def test_single_point_sweep_equals_run_with_shared_aperture(self):
        config = smoke_config()
        sweep = sweep_altitude(config, [500e3])
        fixed = replace(config, aperture=resolve_aperture(config))
        direct = run(fixed)
        assert sweep.values == (500e3,)
        point = sweep.points[0]
        for l0 in config.l0_set:
            np.testing.assert_array_equal(point.row(l0).mean, direct.row(l0).mean)

    def test_altitude_sweep_shares_aperture_across_points(self):
        sweep = sweep_altitude(smoke_config(), [300e3, 500e3])
        assert sweep.points[0].aperture == sweep.points[1].aperture
        mode = LGMode(0, 4, 0.15, 1550e-9)
        assert sweep.points[0].aperture.r_a == pytest.approx(
            effective_radius(mode, 500e3 - 3000.0), rel=1e-15
        )

    def test_wavelength_sweep_resolves_aperture_per_point(self):
        sweep = sweep_wavelength(smoke_config(), [800e-9, 1550e-9])
        assert sweep.points[0].aperture.r_a < sweep.points[1].aperture.r_a

    def test_ground_sweep_maintains_vertical_geometry(self):
        sweep = sweep_ground(smoke_config(), [0.0, 3000.0])
        for h0, point in zip((0.0, 3000.0), sweep.points):
            geom = point.config.geometry
            assert geom.h0 == h0
            assert geom.H == 500e3
            assert geom.path_length == pytest.approx(500e3 - h0, rel=1e-15)

    def test_sweep_rejects_invalid_values(self):
        with pytest.raises(ValidityError):
            sweep_altitude(smoke_config(), [2000.0])  # below the ground station
        with pytest.raises(ValidityError):
            sweep_ground(smoke_config(), [600e3])  # above the satellite
        with pytest.raises(ValidityError):
            sweep_altitude(smoke_config(), [])

    def test_sweep_points_share_random_numbers(self):
        sweep = sweep_ground(smoke_config(n_realizations=4), [1000.0, 3000.0])
        assert (
            sweep.points[0].config.master_seed == sweep.points[1].config.master_seed
        )


class TestNeighborCrosstalk:
    def test_neighboring_crosstalk_symmetric(self):
        # turbulence spills comparable probability into l0+1 and l0-1
        config = smoke_config(n_realizations=100, l0_set=(0, 1, 4), master_seed=11)
        result = run(config)
        for l0 in config.l0_set:
            row = result.row(l0)
            up, down = row.probability(l0 + 1), row.probability(l0 - 1)
            slack = 2.0 * (row.stderr_of(l0 + 1) + row.stderr_of(l0 - 1))
            assert abs(up - down) <= slack


class TestToggleAo:
    def test_paired_runs_and_ao_dominance(self):
        config = smoke_config(n_realizations=12)
        on, off = toggle_ao(config)
        assert on.config.ao.enabled and not off.config.ao.enabled
        for l0 in config.l0_set:
            # same realization set, AO only removes the phase decoherence
            assert on.row(l0).probability(l0) >= off.row(l0).probability(l0)
