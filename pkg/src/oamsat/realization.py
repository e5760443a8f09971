"""Sampled turbulence realizations and the perturbed received field.

A realization freezes the five random parameters of one atmospheric state:
centroid displacement (x0, y0), elliptical semi-axes (W1, W2) and ellipse
rotation phi. The turbulent phase screen is never sampled; its effect enters
detection only through the ensemble-averaged rotational phase correlation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lg_modes import LGMode, effective_radius, eigenstate_amplitude
from .numerics import cholesky2
from .turbulence import TurbulenceStats

PHASE_STRUCTURE_COEFF = 6.88


@dataclass(frozen=True)
class TurbulenceRealization:
    """One sampled channel instance. W1, W2 are already scaled for the
    transmitted OAM number; phi is the ellipse rotation in [0, pi/2)."""

    x0: float
    y0: float
    W1: float
    W2: float
    phi: float

    def __post_init__(self):
        if self.W1 <= 0 or self.W2 <= 0:
            raise ValueError("semi-axes W1, W2 must be positive")
        if not 0.0 <= self.phi < math.pi / 2:
            raise ValueError(f"ellipse rotation must lie in [0, pi/2), got {self.phi}")


@dataclass(frozen=True)
class ApertureSpec:
    """Receiver aperture radius r_a and transmitter aperture radius r_t [m]."""

    r_a: float
    r_t: float

    def __post_init__(self):
        if self.r_a <= 0 or self.r_t <= 0:
            raise ValueError("aperture radii must be positive")


@dataclass(frozen=True)
class AoMode:
    """Ideal phase-only adaptive optics switch: when enabled, the turbulent
    phase profile is treated as perfectly corrected."""

    enabled: bool = False


def sample_realization(
    stats: TurbulenceStats, l0: int, w0: float, rng: np.random.Generator
) -> TurbulenceRealization:
    """Draw one realization from the joint channel statistics.

    x0, y0 are independent zero-mean Gaussians; the log-width pair is jointly
    Gaussian with common mean and negative cross-covariance; phi is uniform on
    [0, pi/2) and independent. The Gaussian-equivalent semi-axes are scaled by
    sqrt(|l0|+1) to match the size of the transmitted ring mode.

    The draw order is fixed so that equal seeds give equal underlying samples
    for every l0 (common random numbers across basis states).
    """
    sd_centroid = math.sqrt(stats.var_x0)
    x0, y0 = sd_centroid * rng.standard_normal(2)
    chol = cholesky2(
        [[stats.var_theta, stats.cov_theta], [stats.cov_theta, stats.var_theta]]
    )
    theta1, theta2 = stats.theta_mean + chol @ rng.standard_normal(2)
    phi = rng.uniform(0.0, math.pi / 2)
    scale = math.sqrt(abs(l0) + 1.0)
    return TurbulenceRealization(
        x0=float(x0),
        y0=float(y0),
        W1=w0 * math.exp(theta1 / 2.0) * scale,
        W2=w0 * math.exp(theta2 / 2.0) * scale,
        phi=float(phi),
    )


def shape_matrix(
    realization: TurbulenceRealization, l0: int, mode: LGMode, z: float
) -> tuple[np.ndarray, float]:
    """Beam-shape matrix S and its determinant.

    S maps the ideal mode frame to the received ellipse, normalized by the
    nominal effective radius at the receiver plane so that an undistorted
    channel gives S = identity.
    """
    if z <= 0:
        raise ValueError(f"receiver plane must be at z > 0, got {z}")
    ref_mode = LGMode(p=0, l=l0, w0=mode.w0, wavelength=mode.wavelength)
    r0l = effective_radius(ref_mode, z)
    c, s = math.cos(realization.phi), math.sin(realization.phi)
    m = (
        np.array(
            [
                [realization.W1 * c, -realization.W2 * s],
                [realization.W1 * s, realization.W2 * c],
            ]
        )
        / r0l
    )
    det = realization.W1 * realization.W2 / r0l**2
    return m, det


def perturbed_field(
    mode: LGMode, realization: TurbulenceRealization, r, theta, z: float
):
    """Received (pre-aperture) field of the distorted beam at the plane z.

    The receiver-plane point is shifted by the centroid displacement, pulled
    back through the inverse shape matrix, and the ideal mode is evaluated at
    the transformed coordinates; 1/sqrt(det S) keeps the total power at one.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s, det = shape_matrix(realization, mode.l, mode, z)
    x_t = r * np.cos(theta) - realization.x0
    y_t = r * np.sin(theta) - realization.y0
    # closed-form 2x2 inverse
    x_i = (s[1, 1] * x_t - s[0, 1] * y_t) / det
    y_i = (-s[1, 0] * x_t + s[0, 0] * y_t) / det
    r_i = np.hypot(x_i, y_i)
    theta_i = np.arctan2(y_i, x_i)
    return eigenstate_amplitude(mode, r_i, theta_i, z) / math.sqrt(det)


def phase_structure(delta_r, r_F: float):
    """Kolmogorov phase structure function 6.88 (dr / r_F)^(5/3)."""
    delta_r = np.asarray(delta_r, dtype=float)
    if np.any(delta_r < 0):
        raise ValueError("separation distance must be >= 0")
    if r_F <= 0:
        raise ValueError(f"Fried parameter must be positive, got {r_F}")
    out = PHASE_STRUCTURE_COEFF * (delta_r / r_F) ** (5.0 / 3.0)
    return out if out.ndim else float(out)


def phase_correlation(r, delta_theta, r_F: float, ao: AoMode):
    """Rotational phase correlation of the turbulent screen at radius r.

    Equals exp[-6.88 * 2^(2/3) (r/r_F)^(5/3) |sin(dtheta/2)|^(5/3)], i.e. the
    Gaussian-process average of the phase difference between two points on the
    same circle; identically 1 under ideal AO correction.
    """
    r = np.asarray(r, dtype=float)
    delta_theta = np.asarray(delta_theta, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be >= 0")
    if ao.enabled:
        out = np.ones(np.broadcast(r, delta_theta).shape)
        return out if out.ndim else 1.0
    if r_F <= 0:
        raise ValueError(f"Fried parameter must be positive, got {r_F}")
    out = np.exp(
        -PHASE_STRUCTURE_COEFF
        * 2.0 ** (2.0 / 3.0)
        * (r / r_F) ** (5.0 / 3.0)
        * np.abs(np.sin(delta_theta / 2.0)) ** (5.0 / 3.0)
    )
    return out if out.ndim else float(out)
