"""Special functions and dimensional constants used throughout the package.

Conventions:

* ``gauss_cdf`` / ``gauss_quantile`` are the standard normal CDF G and its
  inverse, evaluated through the error-function kernels (no quadrature on
  the hot path).
* ``reg_inc_gamma(shape, x)`` is the regularized lower incomplete gamma
  P(shape, x); the mass that the standard Gaussian in dimension n puts on
  a centered ball of radius t equals P(n/2, t^2/2), which is the numerical
  route to every ball-mass matching problem in this package.
* ``sphere_constants(n)`` returns the boundary measure A_n of the unit
  ball and its volume V_n = A_n / n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._integrate import integrate
from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DimConstants:
    """Unit-ball constants in dimension ``n``.

    ``surface`` is the boundary measure of the unit ball (length of the
    unit circle for n=2, area of the unit sphere for n=3, and 2 points of
    counting measure for n=1); ``volume`` is the Lebesgue volume of the
    ball.  They satisfy surface = n * volume.
    """

    n: int
    surface: float
    volume: float


def sphere_constants(n: int) -> DimConstants:
    """Boundary measure and volume of the unit ball in dimension n >= 1."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    surface = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    return DimConstants(n=int(n), surface=surface, volume=surface / n)


def log_sphere_surface(n: float) -> float:
    """log A_n, stable for large (possibly non-integer) n."""
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - special.gammaln(n / 2.0)


def gauss_cdf(r):
    """Standard normal CDF G(r); vectorized, absolute error below 1e-15."""
    return special.ndtr(r)


def gauss_pdf(r):
    """Standard normal density G'(r) = (2*pi)^(-1/2) exp(-r^2/2)."""
    r = np.asarray(r, dtype=float)
    out = np.exp(-0.5 * r * r) / math.sqrt(TWO_PI)
    return out if out.ndim else float(out)


def gauss_quantile(a):
    """Inverse of the standard normal CDF on (0, 1)."""
    arr = np.asarray(a, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("gauss_quantile requires arguments strictly inside (0, 1)")
    out = special.ndtri(arr)
    return out if out.ndim else float(out)


def reg_inc_gamma(shape: float, x):
    """Regularized lower incomplete gamma P(shape, x), monotone in x."""
    if shape <= 0.0:
        raise DomainError(f"shape must be positive, got {shape}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("reg_inc_gamma requires x >= 0")
    out = special.gammainc(shape, arr)
    return out if out.ndim else float(out)


def reg_inc_gamma_inv(shape: float, p):
    """Inverse of P(shape, .) in its second argument."""
    if shape <= 0.0:
        raise DomainError(f"shape must be positive, got {shape}")
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("reg_inc_gamma_inv requires p in [0, 1]")
    out = special.gammaincinv(shape, arr)
    return out if out.ndim else float(out)


def reg_inc_gamma_upper(shape: float, x):
    """Regularized upper incomplete gamma Q(shape, x) = 1 - P(shape, x)."""
    if shape <= 0.0:
        raise DomainError(f"shape must be positive, got {shape}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("reg_inc_gamma_upper requires x >= 0")
    out = special.gammaincc(shape, arr)
    return out if out.ndim else float(out)


def reg_inc_gamma_upper_inv(shape: float, q):
    """Inverse of Q(shape, .), accurate for tail arguments down to ~1e-300."""
    if shape <= 0.0:
        raise DomainError(f"shape must be positive, got {shape}")
    arr = np.asarray(q, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("reg_inc_gamma_upper_inv requires q in [0, 1]")
    out = special.gammainccinv(shape, arr)
    return out if out.ndim else float(out)


def gaussian_ball_mass(n: int, t):
    """Mass the standard Gaussian in dimension n puts on the ball of radius t."""
    return reg_inc_gamma(n / 2.0, np.square(np.asarray(t, dtype=float)) / 2.0)


def gaussian_ball_mass_inv(n: int, mass):
    """Radius t with gaussian_ball_mass(n, t) == mass."""
    return np.sqrt(2.0 * reg_inc_gamma_inv(n / 2.0, mass))


def gaussian_tail_radius(n: int, tail):
    """Radius t whose Gaussian complement mass in dimension n equals ``tail``."""
    return np.sqrt(2.0 * reg_inc_gamma_upper_inv(n / 2.0, tail))


def gaussian_tail_check(r: float, n: int, lam: float) -> bool:
    """Two-sided envelope test for the Gaussian radial tail integral.

    Checks ``lam * e^(-r^2/2) r^(n-2) <= I(r) <= (1/lam) e^(-r^2/2) r^(n-2)``
    with I(r) the tail integral of e^(-s^2/2) s^(n-1), computed by adaptive
    quadrature.  The envelope holds for every fixed lam < 1 once r is large
    enough and fails for small r.
    """
    if r <= 0.0:
        raise DomainError("gaussian_tail_check requires r > 0")
    if not 0.0 < lam < 1.0:
        raise DomainError("lam must lie in (0, 1)")
    tail = integrate(lambda s: np.exp(-0.5 * s * s) * s ** (n - 1), r, np.inf)
    pivot = math.exp(-0.5 * r * r) * r ** (n - 2)
    return lam * pivot <= tail <= pivot / lam
