"""Gaussian-type isoperimetric lower bounds and their 1-d audit.

The Gaussian isoperimetric profile is I(a) = G'(G^{-1}(a)): the boundary
measure of a half-space of Gaussian mass a, and the exact minimizer among
all sets of that mass.  For a radial measure reached from the Gaussian by
a radial extension with finite Lipschitz constant L (any dimension n),
every set A satisfies

    boundary_measure(A) >= I(mu[A]) / L,

except possibly at mass exactly 1/2, which is certified only when the
profile has a finite positive lim sup at the origin.  ``bound_curve``
samples the lower-bound curve a -> I(a)/L; when L = +inf the curve is
identically zero and flagged non-certified.

In one dimension the boundary measure of a finite union of closed
intervals is exactly the sum of the density values at the distinct
interval endpoints, so the bound can be *audited*: ``bound_audit`` throws
randomized interval unions (quantile-mapped endpoints, so all mass ranges
are exercised) at the inequality and reports the minimal slack.  The
bound is a theorem for correctly built transports; a violation beyond
tolerance signals an implementation bug and raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BoundViolationError,
    DimensionMismatchError,
    DomainError,
    OverlappingIntervalsError,
    SupportBoundsError,
)
from .radial import RadialMeasure, cdf_1d
from .specfun import gauss_pdf, gauss_quantile
from .transport import TransportMap


def gaussian_profile(a):
    """The Gaussian isoperimetric profile I(a) = G'(G^{-1}(a)) on [0, 1]."""
    arr = np.asarray(a, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("profile argument must lie in [0, 1]")
    interior = (arr > 0.0) & (arr < 1.0)
    out = np.zeros(arr.shape, dtype=float)
    if np.any(interior):
        out[interior] = gauss_pdf(gauss_quantile(arr[interior]))
    return float(out) if arr.ndim == 0 else out


@dataclass(frozen=True)
class ProfileBound:
    """Sampled lower-bound curve a -> I(a) / L with certification flags.

    ``half_level_certified`` records whether the a = 1/2 point is covered
    (finite positive lim sup of the profile at the origin); ``finite`` is
    False when L = +inf, in which case the curve is identically zero and
    certifies nothing.
    """

    n: int
    lipschitz: float
    levels: np.ndarray
    bounds: np.ndarray
    half_level_certified: bool
    finite: bool


def bound_curve(tmap: TransportMap, grid_size: int = 401,
                density=None) -> ProfileBound:
    """Sample the isoperimetric lower-bound curve of a transported measure.

    The a = 1/2 point is excluded (flagged) unless the profile's lim sup
    at 0 is finite, positive, and clears a 10 percent margin relative to
    the profile's peak near the origin; borderline estimates exclude it.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    density = density if density is not None else tmap.measure.density
    levels = np.linspace(0.0, 1.0, grid_size)
    finite = bool(np.isfinite(tmap.lipschitz))
    bounds = gaussian_profile(levels) / tmap.lipschitz if finite \
        else np.zeros_like(levels)
    limsup = density.limsup_at_zero
    hi_eval = min(density.support_hi, tmap.radii[-1])
    peak = float(np.max(density.profile(np.geomspace(max(1e-9, 1e-9 * hi_eval),
                                                     hi_eval, 256))))
    certified = bool(finite and np.isfinite(limsup)
                     and limsup > 0.1 * max(peak, 1e-300))
    return ProfileBound(n=tmap.n, lipschitz=tmap.lipschitz, levels=levels,
                        bounds=bounds, half_level_certified=certified,
                        finite=finite)


def write_curve_csv(bound: ProfileBound, path) -> None:
    """Export the curve as ``a,bound,certified`` (certified in {0, 1})."""
    with open(path, "w", newline="") as fh:
        fh.write("a,bound,certified\n")
        for a, b in zip(bound.levels, bound.bounds):
            certified = bound.finite and (a != 0.5 or bound.half_level_certified)
            fh.write(f"{float(a)!r},{float(b)!r},{int(certified)}\n")


# ---------------------------------------------------------------------------
# 1-d boundary measure of interval unions
# ---------------------------------------------------------------------------

def _canonical_intervals(measure: RadialMeasure, intervals):
    hi = measure.density.support_hi
    cleaned = []
    for lo, up in intervals:
        lo, up = float(lo), float(up)
        if not lo <= up:
            raise DomainError(f"interval ({lo}, {up}) has negative length")
        for endpoint in (lo, up):
            if np.isfinite(endpoint) and abs(endpoint) >= hi:
                raise SupportBoundsError(
                    f"endpoint {endpoint} outside the open support (-{hi:g}, {hi:g})")
        cleaned.append((lo, up))
    cleaned.sort()
    merged = []
    for lo, up in cleaned:
        if merged and lo < merged[-1][1]:
            raise OverlappingIntervalsError(
                f"intervals overlap near {lo:g}")
        if merged and lo == merged[-1][1]:
            merged[-1] = (merged[-1][0], up)  # touching: merge, no boundary point
        else:
            merged.append((lo, up))
    return merged


def boundary_measure_1d(measure: RadialMeasure, intervals) -> tuple[float, float]:
    """(mass, boundary measure) of a finite union of closed intervals.

    Intervals are (lo, hi) pairs; infinite endpoints give half-lines.
    Touching intervals are merged first so shared endpoints are not
    counted; overlapping interiors raise.  The boundary measure is the sum
    of density values f(|b|)/M over the distinct finite endpoints, exact
    for interval unions whose endpoints are continuity points of the
    profile.
    """
    if measure.n != 1:
        raise DimensionMismatchError("boundary_measure_1d needs a 1-d measure")
    merged = _canonical_intervals(measure, intervals)
    if not merged:
        return 0.0, 0.0
    mass = 0.0
    boundary = 0.0
    for lo, up in merged:
        cdf_hi = cdf_1d(measure, up) if np.isfinite(up) else 1.0
        cdf_lo = cdf_1d(measure, lo) if np.isfinite(lo) else 0.0
        mass += cdf_hi - cdf_lo
        for endpoint in (lo, up):
            if np.isfinite(endpoint):
                boundary += float(measure.density.profile(
                    np.array([abs(endpoint)]))[0]) / measure.mass
    return float(np.clip(mass, 0.0, 1.0)), boundary


@dataclass(frozen=True)
class NeighborhoodQuotients:
    """Direct difference quotients (mu[A^eps] - mu[A]) / eps with Richardson check."""

    eps: np.ndarray
    quotients: np.ndarray
    richardson: float
    density_formula: float
    consistent: bool


def neighborhood_quotients(measure: RadialMeasure, intervals,
                           eps_list=(1e-3, 1e-4, 1e-5)) -> NeighborhoodQuotients:
    """Numerical boundary measure via epsilon-neighborhoods.

    The quotient converges first order in eps; Richardson extrapolation of
    the two smallest eps values is compared against the density-sum
    formula (3 percent agreement flag).
    """
    merged = _canonical_intervals(measure, intervals)
    base_mass, density_formula = boundary_measure_1d(measure, merged)
    eps_arr = np.asarray(sorted(eps_list, reverse=True), dtype=float)
    quotients = []
    for eps in eps_arr:
        grown = [(lo - eps if np.isfinite(lo) else lo,
                  up + eps if np.isfinite(up) else up) for lo, up in merged]
        grown_merged = []
        for lo, up in sorted(grown):
            if grown_merged and lo <= grown_merged[-1][1]:
                grown_merged[-1] = (grown_merged[-1][0], max(up, grown_merged[-1][1]))
            else:
                grown_merged.append((lo, up))
        mass = sum((cdf_1d(measure, up) if np.isfinite(up) else 1.0)
                   - (cdf_1d(measure, lo) if np.isfinite(lo) else 0.0)
                   for lo, up in grown_merged)
        quotients.append((min(mass, 1.0) - base_mass) / eps)
    quotients = np.asarray(quotients)
    e1, e2 = eps_arr[-2], eps_arr[-1]
    richardson = (quotients[-1] * e1 - quotients[-2] * e2) / (e1 - e2)
    consistent = bool(abs(richardson - density_formula)
                      <= 3e-2 * max(abs(density_formula), 1e-12))
    return NeighborhoodQuotients(eps=eps_arr, quotients=quotients,
                                 richardson=float(richardson),
                                 density_formula=density_formula,
                                 consistent=consistent)


# ---------------------------------------------------------------------------
# randomized audit of the lower bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    """Outcome of a randomized interval-union audit of the lower bound."""

    trials: int
    violations: int
    min_slack: float
    witness: Optional[tuple]
    halfline_trials: int
    min_halfline_slack: float
    tolerance: float


def bound_audit(measure: RadialMeasure, tmap: TransportMap, trials: int,
                seed: int, tolerance: float = 1e-9,
                raise_on_violation: bool = True) -> AuditReport:
    """Check boundary_measure >= I(mass)/L on random interval unions.

    Each trial draws a half-line (roughly a quarter of trials) or a union
    of up to three disjoint intervals with quantile-mapped endpoints.  The
    report carries the minimal slack and its witness set; any slack below
    -tolerance counts as a violation and (by default) raises
    :class:`BoundViolationError`, since the inequality is guaranteed for a
    correctly constructed transport.
    """
    if measure.n != 1 or tmap.n != 1:
        raise DimensionMismatchError("bound_audit needs 1-d measure and transport")
    if not np.isfinite(tmap.lipschitz):
        raise DomainError("bound_audit requires a finite Lipschitz constant")
    if trials < 0:
        raise DomainError("trials must be >= 0")
    if trials == 0:
        return AuditReport(0, 0, math.inf, None, 0, math.inf, tolerance)

    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    shape_draw = rng.random(trials)
    count_draw = rng.integers(1, 4, size=trials)
    endpoint_u = np.clip(rng.random((trials, 6)), 1e-9, 1.0 - 1e-9)
    endpoints = np.asarray(measure.quantile_1d(endpoint_u))
    cdf_vals = cdf_1d(measure, endpoints)
    dens_vals = measure.density.profile(np.abs(endpoints)) / measure.mass

    inv_l = 1.0 / tmap.lipschitz
    min_slack = math.inf
    min_half = math.inf
    witness = None
    violations = 0
    halfline_trials = 0
    for i in range(trials):
        if shape_draw[i] < 0.25:
            halfline_trials += 1
            mass = cdf_vals[i, 0]
            boundary = dens_vals[i, 0]
            trial_set = ((-math.inf, endpoints[i, 0]),)
        else:
            k = count_draw[i]
            perm = np.argsort(endpoints[i, :2 * k])
            order = endpoints[i, :2 * k][perm]
            sorted_cdf = cdf_vals[i, :2 * k][perm]
            mass = float(np.sum(sorted_cdf[1::2] - sorted_cdf[0::2]))
            boundary = float(np.sum(dens_vals[i, :2 * k]))
            trial_set = tuple(zip(order[0::2], order[1::2]))
        slack = boundary - gaussian_profile(min(max(mass, 0.0), 1.0)) * inv_l
        if slack < min_slack:
            min_slack = slack
            witness = trial_set
        if shape_draw[i] < 0.25:
            min_half = min(min_half, slack)
        if slack < -tolerance:
            violations += 1
    report = AuditReport(trials=trials, violations=violations,
                         min_slack=float(min_slack), witness=witness,
                         halfline_trials=halfline_trials,
                         min_halfline_slack=float(min_half), tolerance=tolerance)
    if violations and raise_on_violation:
        raise BoundViolationError(
            f"{violations} audit violations, worst slack {min_slack:.3e} "
            f"(witness {witness})", report=report)
    return report
