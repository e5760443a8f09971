"""Special functions and quadrature/transform primitives shared by the physics modules.

All routines are pure functions and safe for unrestricted concurrent use.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalError, QuadratureConvergenceError

MAX_LAGUERRE_ORDER = 64


def laguerre(p: int, a: float, x):
    """Generalized Laguerre polynomial L_p^a(x) by the three-term recurrence.

    The recurrence (k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1} avoids the
    factorial overflow of the explicit series. `x` may be a scalar or ndarray.
    """
    if not isinstance(p, (int, np.integer)) or p < 0:
        raise ValueError(f"radial order p must be a non-negative integer, got {p!r}")
    if p > MAX_LAGUERRE_ORDER:
        raise ValueError(f"radial order p={p} exceeds supported maximum {MAX_LAGUERRE_ORDER}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("laguerre argument x must be finite")
    prev = np.ones_like(x)
    if p == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + a - x
    for k in range(1, p):
        prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class QuadratureRule:
    """Fixed quadrature rule on an interval: strictly increasing interior nodes,
    positive weights summing to the interval length."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        a, b = self.interval
        if not np.all(np.diff(self.nodes) > 0):
            raise NumericalError("quadrature nodes must be strictly increasing")
        if self.nodes[0] <= a or self.nodes[-1] >= b:
            raise NumericalError("quadrature nodes must lie strictly inside the interval")
        if abs(self.weights.sum() - (b - a)) > 1e-12 * abs(b - a):
            raise NumericalError("quadrature weights must sum to the interval length")

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule with n nodes mapped to (a, b); exact through degree 2n-1."""
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")
    if not a < b:
        raise ValueError(f"invalid interval: need a < b, got a={a}, b={b}")
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w
    return QuadratureRule(nodes=nodes, weights=weights, interval=(float(a), float(b)))


def integrate_profile(f, a: float, b: float, rel_tol: float = 1e-9) -> float:
    """Adaptive quadrature of a continuous function on [a, b] to a relative tolerance.

    Used for altitude integrals whose integrand decays over widely separated
    scales, where a fixed grid is wasteful or inaccurate.
    """
    if a > b:
        raise ValueError(f"invalid interval: need a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=400)
        except integrate.IntegrationWarning as exc:
            raise QuadratureConvergenceError(
                f"adaptive quadrature on [{a}, {b}] did not converge: {exc}"
            ) from exc
    return value


def circular_fourier(samples) -> dict[int, complex]:
    """Fourier coefficients of uniform samples on [0, 2pi).

    Returns c_m = (1/N) sum_j f(theta_j) exp(-i m theta_j) for m in [-N/2, N/2),
    which approximates (1/2pi) * integral of f(theta) exp(-i m theta).
    """
    samples = np.asarray(samples, dtype=complex)
    n = samples.size
    if n < 8 or n & (n - 1):
        raise ValueError(f"sample count must be a power of two >= 8, got {n}")
    coeff = np.fft.fft(samples) / n
    out: dict[int, complex] = {}
    for m in range(-n // 2, n // 2):
        out[m] = complex(coeff[m % n])
    return out


def cholesky2(cov) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric PSD 2x2 matrix.

    Accepts semidefinite input (zero variances are legitimate in the vacuum
    limit), unlike library factorizations that require strict positivity.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {cov.shape}")
    if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * (1.0 + abs(cov[0, 1])):
        raise ValueError("covariance matrix must be symmetric")
    a, b, c = cov[0, 0], cov[0, 1], cov[1, 1]
    scale = max(abs(a), abs(b), abs(c), 1.0)
    tol = 1e-12 * scale
    if a < -tol or c < -tol:
        raise NumericalError("matrix is not positive semidefinite (negative diagonal)")
    a = max(a, 0.0)
    l11 = np.sqrt(a)
    if l11 == 0.0:
        if abs(b) > tol:
            raise NumericalError("matrix is not positive semidefinite (rank defect)")
        l21 = 0.0
    else:
        l21 = b / l11
    rem = c - l21 * l21
    if rem < -tol:
        raise NumericalError("matrix is not positive semidefinite (negative pivot)")
    l22 = np.sqrt(max(rem, 0.0))
    return np.array([[l11, 0.0], [l21, l22]])
