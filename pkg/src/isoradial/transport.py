"""Monotone radial transport between the Gaussian and a target radial measure.

For a target radial measure mu in dimension n whose profile f has
connected support and is continuous inside it, there is a unique
increasing map sigma on the support solving the ball-mass matching
equation

    gamma_n[B_sigma(r)] = mu[B_r],      gamma_n[B_t] = P(n/2, t^2 / 2),

so sigma(r) = sqrt(2 * Pinv(n/2, mu[B_r])), with the upper-incomplete
branch used past the median to keep tail accuracy.  The inverse of sigma
transfers Gaussian radii to target radii, and its radial extension

    s(x) = rho(|x|) x,      rho(u) = inverse_sigma(u) / u,   s(0) = 0

pushes the n-dimensional standard Gaussian forward onto mu.
Differentiating the matching equation gives the closed form

    sigma'(r) = (2 pi)^(n/2) / M * f(r) * e^(sigma(r)^2 / 2) * (r / sigma(r))^(n-1),

which is evaluated in log space; no numerical differentiation enters the
grid values.  The smallest Lipschitz constant of the radial extension is
the same for every n and equals sup max(rho, 1/sigma'); since a finite
grid cannot prove unboundedness, the constant is reported as +inf when

* the support starts away from the origin (the extension jumps at 0), or
* the grid sup of 1/sigma' exceeds 1e8, or
* 1/sigma' grows monotonically (>0.5 percent and >=90 percent of steps)
  across the last resolved decade of tail mass at either support end.

The trend verdicts are numerical certificates, not proofs, and are
recorded in ``lipschitz_reason``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .errors import DimensionMismatchError, DisconnectedSupportError, OutOfRangeError
from .radial import RadialMeasure
from .specfun import TWO_PI, gaussian_ball_mass_inv, gaussian_tail_radius

#: grid sup of 1/sigma' beyond which the map is declared non-Lipschitz
SLOPE_THRESHOLD = 1e8
#: minimal relative growth across a tail decade that counts as a trend
TREND_GROWTH = 5e-3
#: fraction of monotone steps required for a trend verdict
TREND_MONOTONE = 0.90


@dataclass(frozen=True)
class JacobianSpectrum:
    """Eigenvalues of the radial-extension Jacobian at radius r > 0.

    The radial direction carries (d/du) inverse_sigma(u) with multiplicity
    one; every tangential direction carries rho(u) with multiplicity n - 1.
    """

    radial: float
    tangential: float
    radial_multiplicity: int
    tangential_multiplicity: int


class TransportMap:
    """Tabulated transport for one target measure and dimension.

    ``radii`` and ``sigma`` are strictly increasing grids with
    gamma-ball-mass(sigma[i]) = mu-ball-mass(radii[i]) to quadrature
    accuracy; ``sigma_prime`` holds the closed-form derivative on the same
    nodes.  Evaluation between nodes uses monotone cubic interpolation,
    with linear continuation beyond the last node (tail mass below the
    grid floor).  Instances are immutable after construction.
    """

    def __init__(self, measure: RadialMeasure, radii, sigma, sigma_prime,
                 lipschitz, lipschitz_reason, sup_inverse_slope):
        self.measure = measure
        self.n = measure.n
        self.radii = radii
        self.sigma = sigma
        self.sigma_prime = sigma_prime
        self.lipschitz = float(lipschitz)
        self.lipschitz_reason = lipschitz_reason
        self.sup_inverse_slope = float(sup_inverse_slope)
        lo = measure.density.support_lo
        self._sigma_interp = PchipInterpolator(
            np.concatenate(([lo], radii)), np.concatenate(([0.0], sigma)))
        self._sigma_slope = self._sigma_interp.derivative()
        self._inverse_interp = PchipInterpolator(
            np.concatenate(([0.0], sigma)), np.concatenate(([lo], radii)))
        self._inverse_slope = self._inverse_interp.derivative()

    # -- scalar/vector map evaluation ---------------------------------------

    def sigma_at(self, r):
        """sigma(r), 0 at and below the support infimum."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        lo = self.measure.density.support_lo
        last_r, last_s = self.radii[-1], self.sigma[-1]
        out = np.where(
            r <= lo, 0.0,
            np.where(r <= last_r, self._sigma_interp(np.clip(r, lo, last_r)),
                     last_s + (r - last_r) * self.sigma_prime[-1]))
        return float(out[0]) if scalar else out

    def sigma_prime_at(self, r):
        """Slope of the tabulated sigma (monotone-cubic derivative)."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        lo = self.measure.density.support_lo
        last_r = self.radii[-1]
        out = np.where((r >= lo) & (r <= last_r),
                       self._sigma_slope(np.clip(r, lo, last_r)),
                       self.sigma_prime[-1] * (r > last_r))
        return float(out[0]) if scalar else out

    def sigma_prime_form_at(self, r):
        """Closed-form sigma' from the differentiated matching equation."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        sig = self.sigma_at(r)
        out = _sigma_prime_closed(self.measure, r, sig)
        return float(out[0]) if scalar else out

    def inverse_at(self, u):
        """inverse_sigma(u): target radius whose sigma equals u (u >= 0)."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        lo = self.measure.density.support_lo
        hi = self.measure.density.support_hi
        last_r, last_s = self.radii[-1], self.sigma[-1]
        ext = last_r + (u - last_s) / self.sigma_prime[-1]
        out = np.where(u <= 0.0, lo,
                       np.where(u <= last_s,
                                self._inverse_interp(np.clip(u, 0.0, last_s)),
                                np.minimum(ext, hi)))
        return float(out[0]) if scalar else out

    def rho_at(self, u):
        """rho(u) = inverse_sigma(u) / u, extended by its limit at 0+."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        lo = self.measure.density.support_lo
        limit = math.inf if lo > 0.0 else self.radii[0] / self.sigma[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(u > 0.0, self.inverse_at(u) / u, limit)
        return float(out[0]) if scalar else out


def _sigma_prime_closed(measure: RadialMeasure, r: np.ndarray, sig: np.ndarray) -> np.ndarray:
    """(2 pi)^(n/2)/M * f(r) * e^(sig^2/2) * (r/sig)^(n-1), in log space."""
    n = measure.n
    log_c = 0.5 * n * math.log(TWO_PI) - math.log(measure.mass)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_val = (log_c + measure.density.log_value(r) + 0.5 * sig * sig
                   + (n - 1) * (np.log(r) - np.log(sig)))
    return np.exp(log_val)


def _decade_trend(values: np.ndarray, toward_end: bool) -> bool:
    """True when ``values`` grow monotonically toward the chosen end."""
    if values.size < 8:
        return False
    seq = values if toward_end else values[::-1]
    growth = seq[-1] / seq[0] - 1.0
    steps = np.diff(seq)
    return growth > TREND_GROWTH and np.mean(steps > 0) >= TREND_MONOTONE


def build_transport(measure: RadialMeasure) -> TransportMap:
    """Construct the transport map for ``measure``.

    Raises :class:`DisconnectedSupportError` when adjacent grid nodes carry
    no mass between them (the profile vanishes on an interior interval, so
    no strictly increasing transport exists).  Divergent-mass inputs never
    reach this point: building the measure already raises.
    """
    n = measure.n
    radii = measure.grid
    fractions_lo = measure.below / measure.total_weight
    fractions_hi = measure.above / measure.total_weight
    gaps = np.diff(measure.below)
    if np.any(gaps <= 0.0):
        idx = int(np.argmin(gaps))
        raise DisconnectedSupportError(
            f"{measure.density.name}: no mass between r={radii[idx]:.6g} and "
            f"r={radii[idx + 1]:.6g}; support is not connected")

    sigma = np.where(fractions_lo <= 0.5,
                     gaussian_ball_mass_inv(n, fractions_lo),
                     gaussian_tail_radius(n, fractions_hi))
    if np.any(np.diff(sigma) <= 0.0):
        raise DisconnectedSupportError(
            f"{measure.density.name}: matched Gaussian radii are not strictly increasing")
    sigma_prime = _sigma_prime_closed(measure, radii, sigma)

    with np.errstate(divide="ignore"):
        inverse_slope = 1.0 / sigma_prime
    rho_vals = radii / sigma
    grid_sup = float(max(np.max(inverse_slope), np.max(rho_vals)))

    lo = measure.density.support_lo
    floor_hi = fractions_hi[-1]
    floor_lo = fractions_lo[0]
    upper_window = inverse_slope[fractions_hi <= 10.0 * floor_hi]
    lower_window = inverse_slope[fractions_lo <= 10.0 * floor_lo]

    if lo > 1e-12:
        lipschitz, reason = math.inf, "support starts away from the origin"
    elif not np.isfinite(grid_sup) or grid_sup > SLOPE_THRESHOLD:
        lipschitz, reason = math.inf, "slope threshold exceeded"
    elif _decade_trend(upper_window, toward_end=True):
        lipschitz, reason = math.inf, "slope grows through the last tail decade"
    elif _decade_trend(lower_window, toward_end=False):
        lipschitz, reason = math.inf, "slope grows through the first tail decade"
    else:
        lipschitz, reason = _refine_sup(measure, radii, sigma, grid_sup), "finite"

    return TransportMap(measure, radii, sigma, sigma_prime,
                        lipschitz, reason, grid_sup)


def _refine_sup(measure, radii, sigma, grid_sup) -> float:
    """Polish the grid sup of 1/sigma' by a local bounded minimization."""
    interp = PchipInterpolator(np.concatenate(([measure.density.support_lo], radii)),
                               np.concatenate(([0.0], sigma)))
    with np.errstate(divide="ignore"):
        i = int(np.argmax(1.0 / _sigma_prime_closed(measure, radii, sigma)))
    lo_r = radii[max(i - 2, 0)]
    hi_r = radii[min(i + 2, radii.size - 1)]
    if hi_r <= lo_r:
        return grid_sup

    def slope(r):
        return float(_sigma_prime_closed(measure, np.array([r]), interp(np.array([r])))[0])

    res = minimize_scalar(slope, bounds=(lo_r, hi_r), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, hi_r)})
    refined = 1.0 / res.fun if res.fun > 0.0 else math.inf
    return float(max(grid_sup, refined))


def lipschitz_constant(tmap: TransportMap) -> float:
    """Smallest Lipschitz constant of the radial extension; +inf if unbounded."""
    return tmap.lipschitz


def apply_map(tmap: TransportMap, x):
    """s(x) = rho(|x|) x, the Gaussian-to-target radial extension; s(0) = 0."""
    pts, single = _as_points(tmap.n, x)
    u = np.linalg.norm(pts, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(u > 0.0, tmap.inverse_at(u) / np.where(u > 0.0, u, 1.0), 0.0)
    out = pts * factor[:, None]
    return out[0] if single else out


def apply_sigma_map(tmap: TransportMap, x):
    """Left inverse of :func:`apply_map`: sigma(|x|)/|x| x on the image, else 0."""
    pts, single = _as_points(tmap.n, x)
    u = np.linalg.norm(pts, axis=1)
    lo = tmap.measure.density.support_lo
    hi = tmap.measure.density.support_hi
    inside = (u > lo) & (u < hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(inside, tmap.sigma_at(u) / np.where(u > 0.0, u, 1.0), 0.0)
    out = pts * factor[:, None]
    return out[0] if single else out


def jacobian_spectrum(tmap: TransportMap, r: float) -> JacobianSpectrum:
    """Eigenvalues of the Jacobian of the radial extension at radius r.

    Raises :class:`OutOfRangeError` when r is not covered by the tabulated
    Gaussian radii (r <= 0 or beyond the last matched node).
    """
    if not (0.0 < r <= tmap.sigma[-1] * (1.0 + 1e-12)):
        raise OutOfRangeError(
            f"radius {r!r} outside the tabulated range (0, {tmap.sigma[-1]:.6g}]")
    target = tmap.inverse_at(r)
    radial = 1.0 / tmap.sigma_prime_form_at(target)
    return JacobianSpectrum(radial=float(radial), tangential=float(tmap.rho_at(r)),
                            radial_multiplicity=1, tangential_multiplicity=tmap.n - 1)


def write_transport_csv(tmap: TransportMap, path) -> None:
    """Dump the grid as ``r,sigma,sigma_prime,rho`` (rho = r / sigma)."""
    with open(path, "w", newline="") as fh:
        fh.write("r,sigma,sigma_prime,rho\n")
        for r, s, sp in zip(tmap.radii, tmap.sigma, tmap.sigma_prime):
            fh.write(f"{float(r)!r},{float(s)!r},{float(sp)!r},{float(r / s)!r}\n")


def _as_points(n: int, x):
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != n:
        raise DimensionMismatchError(f"points have dimension {pts.shape[1]}, map has {n}")
    return pts, single
