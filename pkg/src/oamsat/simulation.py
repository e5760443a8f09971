"""Monte Carlo driver: seeded ensembles, parameter sweeps, AO pairing.

Realization i always draws from a fresh stream seeded by (master_seed, i),
so results are bit-identical for a fixed seed regardless of worker count,
and sweeps/AO comparisons share their random numbers point by point.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from multiprocessing import get_context

import numpy as np

from .detection import (
    CrosstalkRow,
    DetectionDistribution,
    DetectionGrid,
    PRODUCTION_MIN_AZIMUTHAL,
    PRODUCTION_MIN_RADIAL,
    aggregate_distributions,
    detection_distribution,
)
from .errors import GridResolutionError, ValidityError
from .lg_modes import LGMode, effective_radius
from .realization import AoMode, ApertureSpec, sample_realization
from .turbulence import AtmosphereModel, ChannelGeometry, TurbulenceStats, channel_stats

WORKERS_ENV_VAR = "OAMSAT_WORKERS"

AUTO_APERTURE = "auto"


@dataclass(frozen=True)
class SimConfig:
    """Complete, reproducible description of one Monte Carlo run."""

    geometry: ChannelGeometry
    atmosphere: AtmosphereModel = AtmosphereModel()
    w0: float = 0.15
    l_max: int = 4
    l0_set: tuple[int, ...] = (0, 1, 2, 3, 4)
    n_realizations: int = 2000
    ao: AoMode = AoMode(enabled=False)
    aperture: ApertureSpec | str = AUTO_APERTURE
    grid: DetectionGrid = field(default_factory=DetectionGrid)
    master_seed: int = 20190316
    verify_grid: bool = False

    def __post_init__(self):
        if self.w0 <= 0:
            raise ValidityError(f"beam waist must be positive, got {self.w0}")
        if self.l_max < 0:
            raise ValidityError(f"l_max must be >= 0, got {self.l_max}")
        if not self.l0_set:
            raise ValidityError("l0_set must not be empty")
        bad = [l for l in self.l0_set if abs(l) > self.l_max]
        if bad:
            raise ValidityError(f"l0 values {bad} outside [-{self.l_max}, {self.l_max}]")
        if self.n_realizations < 1:
            raise ValidityError(f"need at least one realization, got {self.n_realizations}")
        if not 0 <= self.master_seed < 2**64:
            raise ValidityError("master seed must be a 64-bit unsigned integer")
        if self.grid.l_window < self.l_max + 4:
            raise ValidityError(
                f"l window half-width {self.grid.l_window} must cover l_max + 4 = "
                f"{self.l_max + 4}"
            )
        if (
            self.grid.n_radial < PRODUCTION_MIN_RADIAL
            or self.grid.n_azimuthal < PRODUCTION_MIN_AZIMUTHAL
        ):
            raise ValidityError(
                f"production grid must be at least {PRODUCTION_MIN_RADIAL} x "
                f"{PRODUCTION_MIN_AZIMUTHAL}, got {self.grid.n_radial} x "
                f"{self.grid.n_azimuthal}"
            )
        if isinstance(self.aperture, str) and self.aperture != AUTO_APERTURE:
            raise ValidityError(f"aperture must be {AUTO_APERTURE!r} or an ApertureSpec")


@dataclass(frozen=True)
class RunResult:
    """Crosstalk rows for each transmitted l0 plus full provenance."""

    rows: dict[int, CrosstalkRow]
    stats: TurbulenceStats
    aperture: ApertureSpec
    config: SimConfig

    def row(self, l0: int) -> CrosstalkRow:
        return self.rows[l0]


@dataclass(frozen=True)
class SweepResult:
    """Per-point results of a one-axis parameter sweep."""

    axis: str
    values: tuple[float, ...]
    points: tuple[RunResult, ...]


def resolve_aperture(config: SimConfig, L_max: float | None = None) -> ApertureSpec:
    """Aperture radii for the run: explicit, or sized from the widest mode.

    Auto mode sets r_t to the effective radius of the l_max mode at the
    transmitter and r_a to its effective radius after the longest propagation
    distance of interest (the run's own path length by default).
    """
    if isinstance(config.aperture, ApertureSpec):
        return config.aperture
    mode = LGMode(p=0, l=config.l_max, w0=config.w0, wavelength=config.geometry.wavelength)
    span = config.geometry.path_length if L_max is None else L_max
    return ApertureSpec(r_a=effective_radius(mode, span), r_t=effective_radius(mode, 0.0))


@dataclass(frozen=True)
class _WorkerPayload:
    stats: TurbulenceStats
    w0: float
    wavelength: float
    l0_set: tuple[int, ...]
    aperture: ApertureSpec
    ao: AoMode
    grid: DetectionGrid
    z: float
    master_seed: int
    verify_grid: bool


_worker_payload: _WorkerPayload | None = None


def _init_worker(payload: _WorkerPayload):
    global _worker_payload
    _worker_payload = payload


def _evaluate_index(payload: _WorkerPayload, index: int) -> dict[int, DetectionDistribution]:
    out: dict[int, DetectionDistribution] = {}
    for l0 in payload.l0_set:
        rng = np.random.default_rng((payload.master_seed, index))
        realization = sample_realization(payload.stats, l0, payload.w0, rng)
        mode = LGMode(p=0, l=l0, w0=payload.w0, wavelength=payload.wavelength)
        try:
            out[l0] = detection_distribution(
                mode,
                realization,
                payload.aperture,
                payload.stats.r_F,
                payload.ao,
                payload.grid,
                payload.z,
                check_resolution=payload.verify_grid,
            )
        except GridResolutionError as exc:
            raise GridResolutionError(f"realization {index}, l0={l0}: {exc}") from exc
    return out


def _evaluate_chunk(indices: list[int]) -> list[dict[int, DetectionDistribution]]:
    assert _worker_payload is not None
    return [_evaluate_index(_worker_payload, i) for i in indices]


def worker_count() -> int:
    """Worker processes for ensemble evaluation; overridable via environment."""
    raw = os.environ.get(WORKERS_ENV_VAR)
    if raw is not None:
        count = int(raw)
        if count < 1:
            raise ValidityError(f"{WORKERS_ENV_VAR} must be >= 1, got {count}")
        return count
    return os.cpu_count() or 1


def run(config: SimConfig) -> RunResult:
    """Evaluate the full ensemble for every l0 in the configured set.

    Channel statistics are computed once; realizations are mapped over worker
    processes and reduced in realization-index order, so the aggregates do not
    depend on scheduling.
    """
    stats = channel_stats(config.geometry, config.atmosphere, config.w0)
    aperture = resolve_aperture(config)
    payload = _WorkerPayload(
        stats=stats,
        w0=config.w0,
        wavelength=config.geometry.wavelength,
        l0_set=config.l0_set,
        aperture=aperture,
        ao=config.ao,
        grid=config.grid,
        z=config.geometry.path_length,
        master_seed=config.master_seed,
        verify_grid=config.verify_grid,
    )
    n = config.n_realizations
    workers = min(worker_count(), n)
    if workers == 1:
        per_index = [_evaluate_index(payload, i) for i in range(n)]
    else:
        chunk_size = max(1, math.ceil(n / (workers * 4)))
        chunks = [list(range(i, min(i + chunk_size, n))) for i in range(0, n, chunk_size)]
        ctx = get_context()
        with ctx.Pool(workers, initializer=_init_worker, initargs=(payload,)) as pool:
            per_index = [res for chunk in pool.map(_evaluate_chunk, chunks) for res in chunk]
    rows = {
        l0: aggregate_distributions(l0, [per_index[i][l0] for i in range(n)])
        for l0 in config.l0_set
    }
    return RunResult(rows=rows, stats=stats, aperture=aperture, config=config)


def _replace_geometry(config: SimConfig, **kwargs) -> SimConfig:
    return replace(config, geometry=replace(config.geometry, **kwargs))


def sweep_altitude(config: SimConfig, H_values: list[float]) -> SweepResult:
    """One run per satellite altitude, sharing seeds and the aperture sized
    for the largest altitude."""
    if not H_values:
        raise ValidityError("altitude sweep needs at least one value")
    geometries = [replace(config.geometry, H=float(h)) for h in H_values]
    if config.aperture == AUTO_APERTURE:
        longest = max(g.path_length for g in geometries)
        aperture = resolve_aperture(config, L_max=longest)
    else:
        aperture = config.aperture
    points = [
        run(replace(config, geometry=g, aperture=aperture)) for g in geometries
    ]
    return SweepResult(axis="altitude", values=tuple(float(h) for h in H_values), points=tuple(points))


def sweep_wavelength(config: SimConfig, lambda_values: list[float]) -> SweepResult:
    """One run per wavelength; auto apertures re-resolve per wavelength since
    the mode size at the receiver depends on it."""
    if not lambda_values:
        raise ValidityError("wavelength sweep needs at least one value")
    points = [
        run(_replace_geometry(config, wavelength=float(lam))) for lam in lambda_values
    ]
    return SweepResult(
        axis="wavelength", values=tuple(float(v) for v in lambda_values), points=tuple(points)
    )


def sweep_ground(config: SimConfig, h0_values: list[float]) -> SweepResult:
    """One run per ground-station altitude at fixed satellite altitude."""
    if not h0_values:
        raise ValidityError("ground sweep needs at least one value")
    points = [run(_replace_geometry(config, h0=float(h))) for h in h0_values]
    return SweepResult(
        axis="ground", values=tuple(float(v) for v in h0_values), points=tuple(points)
    )


def toggle_ao(config: SimConfig) -> tuple[RunResult, RunResult]:
    """Paired AO-on / AO-off runs over the same realization set."""
    on = run(replace(config, ao=AoMode(enabled=True)))
    off = run(replace(config, ao=AoMode(enabled=False)))
    return on, off
