"""Monte Carlo simulator for OAM-state detection over satellite-to-ground
turbulent optical channels."""

__version__ = "0.1.0"

from .detection import (
    CrosstalkRow,
    DetectionDistribution,
    DetectionGrid,
    crosstalk_row,
    detection_distribution,
    detection_distribution_bruteforce,
)
from .errors import (
    ConfigError,
    GridResolutionError,
    NumericalError,
    OamSatError,
    QuadratureConvergenceError,
    TurbulenceFreeChannelError,
    ValidityError,
)
from .lg_modes import (
    LGMode,
    beam_width,
    effective_radius,
    eigenstate_amplitude,
    radial_profile,
    rms_radius,
)
from .realization import (
    AoMode,
    ApertureSpec,
    TurbulenceRealization,
    perturbed_field,
    phase_correlation,
    phase_structure,
    sample_realization,
    shape_matrix,
)
from .simulation import (
    RunResult,
    SimConfig,
    SweepResult,
    resolve_aperture,
    run,
    sweep_altitude,
    sweep_ground,
    sweep_wavelength,
    toggle_ao,
)
from .turbulence import (
    AtmosphereModel,
    ChannelGeometry,
    TurbulenceStats,
    beam_moments,
    channel_stats,
    cn2,
    fried_parameter,
    rytov_variance,
    scintillation_index,
)

__all__ = [
    "__version__",
    "AoMode",
    "ApertureSpec",
    "AtmosphereModel",
    "ChannelGeometry",
    "ConfigError",
    "CrosstalkRow",
    "DetectionDistribution",
    "DetectionGrid",
    "GridResolutionError",
    "LGMode",
    "NumericalError",
    "OamSatError",
    "QuadratureConvergenceError",
    "RunResult",
    "SimConfig",
    "SweepResult",
    "TurbulenceFreeChannelError",
    "TurbulenceRealization",
    "TurbulenceStats",
    "ValidityError",
    "beam_moments",
    "beam_width",
    "channel_stats",
    "cn2",
    "crosstalk_row",
    "detection_distribution",
    "detection_distribution_bruteforce",
    "effective_radius",
    "eigenstate_amplitude",
    "fried_parameter",
    "perturbed_field",
    "phase_correlation",
    "phase_structure",
    "radial_profile",
    "resolve_aperture",
    "rms_radius",
    "run",
    "rytov_variance",
    "sample_realization",
    "scintillation_index",
    "shape_matrix",
    "sweep_altitude",
    "sweep_ground",
    "sweep_wavelength",
    "toggle_ao",
]
