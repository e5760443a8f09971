"""Laguerre-Gaussian mode family: amplitudes and beam-size formulas.

Radial profiles are normalized so that the integral of |R|^2 r dr over
[0, inf) equals one; the azimuthal factor exp(i l theta)/sqrt(2 pi) then
makes the transverse modes orthonormal on the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import laguerre


@dataclass(frozen=True)
class LGMode:
    """One Laguerre-Gaussian transverse mode.

    p: radial node number, l: azimuthal (OAM) quantum number,
    w0: beam-waist radius [m], wavelength [m].
    """

    p: int
    l: int
    w0: float
    wavelength: float

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"radial index p must be >= 0, got {self.p}")
        if self.w0 <= 0:
            raise ValueError(f"beam waist must be positive, got {self.w0}")
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def rayleigh_range(self) -> float:
        """z_R = pi w0^2 / lambda [m]."""
        return math.pi * self.w0**2 / self.wavelength

    @property
    def wavenumber(self) -> float:
        """k = 2 pi / lambda [1/m]."""
        return 2.0 * math.pi / self.wavelength


def beam_width(mode: LGMode, z: float) -> float:
    """Gaussian spot radius w(z) = w0 sqrt(1 + (z/z_R)^2) [m]."""
    if z < 0:
        raise ValueError(f"propagation distance z must be >= 0, got {z}")
    return mode.w0 * math.sqrt(1.0 + (z / mode.rayleigh_range) ** 2)


def _norm_factor(p: int, abs_l: int) -> float:
    # sqrt(p!/(p+|l|)!) as a product ratio; avoids large factorials
    prod = 1.0
    for j in range(p + 1, p + abs_l + 1):
        prod *= j
    return 1.0 / math.sqrt(prod)


def radial_profile(mode: LGMode, r, z: float):
    """Complex radial profile R_{p,l}(r, z) [1/m], curvature and Gouy phases included.

    `r` may be a scalar or ndarray. At z=0 the profile is real.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius r must be >= 0")
    if z < 0:
        raise ValueError(f"propagation distance z must be >= 0, got {z}")
    al = abs(mode.l)
    w = beam_width(mode, z)
    zr = mode.rayleigh_range
    amp = (
        2.0
        * _norm_factor(mode.p, al)
        / w
        * (r * math.sqrt(2.0) / w) ** al
        * np.exp(-(r**2) / w**2)
        * laguerre(mode.p, al, 2.0 * r**2 / w**2)
    )
    curvature = mode.wavenumber * z / (2.0 * (z**2 + zr**2))
    gouy = (2 * mode.p + al + 1) * math.atan2(z, zr)
    out = amp * np.exp(1j * (curvature * r**2 - gouy))
    return out if out.ndim else complex(out)


def eigenstate_amplitude(mode: LGMode, r, theta, z: float):
    """Full transverse amplitude R_{p,l}(r, z) exp(i l theta) / sqrt(2 pi)."""
    theta = np.asarray(theta, dtype=float)
    return radial_profile(mode, r, z) * np.exp(1j * mode.l * theta) / math.sqrt(2.0 * math.pi)


def _require_fundamental_radial(mode: LGMode, what: str):
    if mode.p != 0:
        raise ValueError(f"{what} is defined for p=0 modes only, got p={mode.p}")


def rms_radius(mode: LGMode, z: float) -> float:
    """Root-mean-square intensity radius of a p=0 mode: sqrt((|l|+1)/2) w(z)."""
    _require_fundamental_radial(mode, "rms_radius")
    return math.sqrt((abs(mode.l) + 1) / 2.0) * beam_width(mode, z)


def effective_radius(mode: LGMode, z: float) -> float:
    """Beam-size radius sqrt(|l|+1) w(z) of a p=0 mode.

    The disc of this radius holds roughly 90% of the mode power; transmitter
    and receiver apertures are sized from it.
    """
    _require_fundamental_radial(mode, "effective_radius")
    return math.sqrt(abs(mode.l) + 1.0) * beam_width(mode, z)
