"""Deterministic ensemble statistics of the satellite-to-ground turbulent channel.

Everything here is fixed by the channel geometry and the atmosphere model:
the Hufnagel-Valley structure-parameter profile, the Rytov variance and
downlink scintillation index, the Fried coherence length, and the joint
Gaussian moments of the beam-wandering / beam-deformation parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TurbulenceFreeChannelError, ValidityError
from .numerics import integrate_profile

MAX_ZENITH_ANGLE = math.pi / 4  # weak-turbulence validity bound


@dataclass(frozen=True)
class AtmosphereModel:
    """Hufnagel-Valley profile parameters: ground-level structure constant
    A = Cn^2(0) [m^(-2/3)] and rms wind speed [m/s]."""

    A: float = 9.6e-14
    v_rms: float = 6.0

    def __post_init__(self):
        if self.A <= 0:
            raise ValidityError(f"ground-level Cn^2 must be positive, got {self.A}")
        if self.v_rms < 0:
            raise ValidityError(f"rms wind speed must be >= 0, got {self.v_rms}")


@dataclass(frozen=True)
class ChannelGeometry:
    """Downlink geometry: satellite altitude H [m], ground-station altitude
    h0 [m], zenith angle [rad] (< 45 deg), optical wavelength [m]."""

    H: float
    h0: float
    theta_z: float
    wavelength: float

    def __post_init__(self):
        if self.h0 < 0:
            raise ValidityError(f"ground altitude must be >= 0, got {self.h0}")
        if self.H <= self.h0:
            raise ValidityError(
                f"satellite altitude {self.H} m must exceed ground altitude {self.h0} m"
            )
        if not 0.0 <= self.theta_z < MAX_ZENITH_ANGLE:
            raise ValidityError(
                f"zenith angle {self.theta_z} rad outside [0, pi/4): "
                "the weak-turbulence channel model does not apply"
            )
        if self.wavelength <= 0:
            raise ValidityError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def path_length(self) -> float:
        """Slant propagation distance L = (H - h0) sec(theta_z) [m]."""
        return (self.H - self.h0) / math.cos(self.theta_z)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class TurbulenceStats:
    """Derived channel statistics driving the Monte Carlo sampler."""

    sigma_R2: float  # Rytov variance
    sigma_I2: float  # scintillation index
    r_F: float  # Fried parameter [m]
    Omega: float  # Fresnel ratio k w0^2 / (2 L)
    theta_mean: float  # common mean of the log-width variables
    var_x0: float  # centroid variance per axis [m^2]
    var_theta: float  # variance of each log-width variable
    cov_theta: float  # covariance of the two log-width variables

    def __post_init__(self):
        if self.sigma_R2 < 0 or self.sigma_I2 < 0:
            raise ValidityError("fluctuation variances must be >= 0")
        if self.r_F <= 0 or self.Omega <= 0:
            raise ValidityError("Fried parameter and Fresnel ratio must be positive")
        if self.var_x0 < 0:
            raise ValidityError("centroid variance must be >= 0")
        if self.var_theta < abs(self.cov_theta) - 1e-15:
            raise ValidityError("log-width covariance cannot exceed the variance")
        if self.cov_theta > 0:
            raise ValidityError("log-width covariance must be <= 0")

    def wander_covariance(self) -> np.ndarray:
        """4x4 covariance of (x0, y0, Theta1, Theta2)."""
        m = np.zeros((4, 4))
        m[0, 0] = m[1, 1] = self.var_x0
        m[2, 2] = m[3, 3] = self.var_theta
        m[2, 3] = m[3, 2] = self.cov_theta
        return m


def cn2(model: AtmosphereModel, h) -> float:
    """Hufnagel-Valley structure parameter Cn^2(h) [m^(-2/3)] at altitude h [m]."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise ValueError("altitude must be >= 0")
    out = (
        0.00594 * (model.v_rms / 27.0) ** 2 * (h * 1e-5) ** 10 * np.exp(-h / 1000.0)
        + 2.7e-16 * np.exp(-h / 1500.0)
        + model.A * np.exp(-h / 100.0)
    )
    return out if out.ndim else float(out)


def rytov_variance(geom: ChannelGeometry, model: AtmosphereModel) -> float:
    """Downlink Rytov variance: 2.25 k^(7/6) sec^(11/6)(theta_z) times the
    altitude integral of Cn^2(h) (h - h0)^(5/6)."""
    k = geom.wavenumber
    sec = 1.0 / math.cos(geom.theta_z)
    integral = integrate_profile(
        lambda h: cn2(model, h) * (h - geom.h0) ** (5.0 / 6.0), geom.h0, geom.H
    )
    return 2.25 * k ** (7.0 / 6.0) * sec ** (11.0 / 6.0) * integral


def scintillation_index(sigma_R2: float) -> float:
    """Downlink scintillation index as a saturating function of the Rytov variance."""
    if sigma_R2 < 0:
        raise ValueError(f"Rytov variance must be >= 0, got {sigma_R2}")
    s65 = sigma_R2 ** (6.0 / 5.0)
    return math.expm1(
        0.49 * sigma_R2 / (1.0 + 1.11 * s65) ** (7.0 / 6.0)
        + 0.51 * sigma_R2 / (1.0 + 0.69 * s65) ** (5.0 / 6.0)
    )


def fried_parameter(geom: ChannelGeometry, model: AtmosphereModel) -> float:
    """Fried coherence length r_F = [0.423 k^2 sec(theta_z) int Cn^2 dh]^(-3/5) [m]."""
    k = geom.wavenumber
    sec = 1.0 / math.cos(geom.theta_z)
    integral = integrate_profile(lambda h: cn2(model, h), geom.h0, geom.H)
    strength = 0.423 * k**2 * sec * integral
    if strength <= 0.0:
        raise TurbulenceFreeChannelError(
            "integrated Cn^2 underflows: channel is effectively turbulence-free"
        )
    return strength ** (-3.0 / 5.0)


def beam_moments(sigma_I2: float, Omega: float, w0: float) -> tuple[float, float, float, float]:
    """Joint Gaussian moments of the beam-wandering / log-width parameters.

    Returns (theta_mean, var_x0, var_theta, cov_theta) for the variables
    (x0, y0, Theta1, Theta2) where Theta_i = ln(W_i^2 / w0^2).
    """
    if sigma_I2 < 0 or Omega <= 0 or w0 <= 0:
        raise ValueError("need sigma_I2 >= 0, Omega > 0, w0 > 0")
    s = sigma_I2 * Omega ** (5.0 / 6.0)
    theta_mean = math.log(
        (1.0 + 2.96 * s) ** 2 / (Omega**2 * math.sqrt((1.0 + 2.96 * s) ** 2 + 1.2 * s))
    )
    var_x0 = 0.33 * w0**2 * sigma_I2 * Omega ** (-7.0 / 6.0)
    var_theta = math.log1p(1.2 * s / (1.0 + 2.96 * s) ** 2)
    cov_theta = math.log1p(-0.8 * s / (1.0 + 2.96 * s) ** 2)
    return theta_mean, var_x0, var_theta, cov_theta


def channel_stats(geom: ChannelGeometry, model: AtmosphereModel, w0: float) -> TurbulenceStats:
    """Bundle of all deterministic channel statistics for one configuration."""
    if w0 <= 0:
        raise ValidityError(f"beam waist must be positive, got {w0}")
    sigma_r2 = rytov_variance(geom, model)
    sigma_i2 = scintillation_index(sigma_r2)
    r_f = fried_parameter(geom, model)
    omega = geom.wavenumber * w0**2 / (2.0 * geom.path_length)
    theta_mean, var_x0, var_theta, cov_theta = beam_moments(sigma_i2, omega, w0)
    return TurbulenceStats(
        sigma_R2=sigma_r2,
        sigma_I2=sigma_i2,
        r_F=r_f,
        Omega=omega,
        theta_mean=theta_mean,
        var_x0=var_x0,
        var_theta=var_theta,
        cov_theta=cov_theta,
    )
