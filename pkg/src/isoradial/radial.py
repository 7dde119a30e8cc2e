"""Radial density profiles and the probability measures they induce.

A :class:`RadialDensity` is a scalar profile f on (0, inf).  In dimension
n it induces the probability measure with Lebesgue density f(|x|) / M,
where the normalizer

    M = A_n * Int_0^inf f(r) r^(n-1) dr

makes the total mass one (A_n is the boundary measure of the unit ball).
The standard Gaussian corresponds to f(r) = exp(-r^2/2) with M = (2 pi)^(n/2).

:class:`RadialMeasure` tabulates the cumulative radial mass on a grid whose
nodes are placed log-uniformly in tail mass on *both* ends, so the origin
and the far tail are each resolved down to ``tail_floor`` (default 1e-10).
Mass below a node is accumulated left-to-right and mass above a node
right-to-left; both directions are sums of positive panel integrals, which
preserves relative accuracy in the respective tail and avoids the usual
1 - F cancellation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from ._integrate import integrate, panel_integrals, segment_integrals, tail_integral
from .errors import (
    DimensionMismatchError,
    DivergentMassError,
    InvalidDensityError,
)
from .specfun import sphere_constants


@dataclass(frozen=True)
class RadialDensity:
    """A nonnegative profile f on (0, inf) with known support interval.

    ``profile`` must accept an ndarray of radii >= 0 and evaluate
    elementwise, returning 0 outside [support_lo, support_hi].
    ``log_profile`` (optional) is an exact log f used to avoid under- and
    overflow on hot paths.  ``limsup_at_zero`` is the lim sup of f at 0+,
    estimated on a dyadic grid when not supplied; it only matters for the
    a = 1/2 edge case of the profile bound.  ``breakpoints`` marks interior
    kinks (table knots, indicator edges) so quadrature can split there.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    support_lo: float
    support_hi: float
    limsup_at_zero: float
    name: str = "density"
    log_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    breakpoints: Optional[tuple] = None

    def __post_init__(self):
        if not 0.0 <= self.support_lo < self.support_hi:
            raise InvalidDensityError(
                f"support [{self.support_lo}, {self.support_hi}] is not a valid interval"
            )

    def log_value(self, r):
        """log f(r), using the exact form when available."""
        r = np.asarray(r, dtype=float)
        if self.log_profile is not None:
            return self.log_profile(r)
        with np.errstate(divide="ignore"):
            return np.log(self.profile(r))


def estimate_limsup_at_zero(profile, support_hi: float) -> float:
    """max of f over the dyadic radii 2^-k, k = 4..40 (all below support_hi)."""
    radii = 2.0 ** -np.arange(4, 41, dtype=float)
    radii = radii[radii < support_hi]
    vals = np.asarray(profile(radii), dtype=float)
    return float(np.max(vals)) if vals.size else 0.0


def make_density(profile, support=(0.0, math.inf), *, log_profile=None,
                 limsup_at_zero=None, name="density", breakpoints=None) -> RadialDensity:
    """Wrap a vectorized profile callable as a RadialDensity."""
    lo, hi = float(support[0]), float(support[1])
    if limsup_at_zero is None:
        limsup_at_zero = estimate_limsup_at_zero(profile, hi)
    return RadialDensity(profile=profile, support_lo=lo, support_hi=hi,
                         limsup_at_zero=float(limsup_at_zero), name=name,
                         log_profile=log_profile, breakpoints=breakpoints)


# ---------------------------------------------------------------------------
# built-in profiles
# ---------------------------------------------------------------------------

def gaussian_density() -> RadialDensity:
    """f(r) = exp(-r^2 / 2), the standard Gaussian profile."""
    return RadialDensity(
        profile=lambda r: np.exp(-0.5 * np.square(r)),
        support_lo=0.0, support_hi=math.inf, limsup_at_zero=1.0,
        name="gaussian",
        log_profile=lambda r: -0.5 * np.square(r),
    )


def scaled_gaussian_density(c: float) -> RadialDensity:
    """f(r) = exp(-r^2 / (2 c^2)): the Gaussian dilated by the factor c."""
    if not (np.isfinite(c) and c > 0.0):
        raise InvalidDensityError(f"scale must be positive, got {c}")
    c2 = float(c) * float(c)
    return RadialDensity(
        profile=lambda r: np.exp(-0.5 * np.square(r) / c2),
        support_lo=0.0, support_hi=math.inf, limsup_at_zero=1.0,
        name=f"scaled-gaussian(c={c:g})",
        log_profile=lambda r: -0.5 * np.square(r) / c2,
    )


def exp_power_density(p: float) -> RadialDensity:
    """f(r) = exp(-r^p / p); p = 2 recovers the Gaussian."""
    if not (np.isfinite(p) and p > 0.0):
        raise InvalidDensityError(f"exponent must be positive, got {p}")
    p = float(p)
    return RadialDensity(
        profile=lambda r: np.exp(-np.power(np.asarray(r, dtype=float), p) / p),
        support_lo=0.0, support_hi=math.inf, limsup_at_zero=1.0,
        name=f"exp-power(p={p:g})",
        log_profile=lambda r: -np.power(np.asarray(r, dtype=float), p) / p,
    )


def uniform_shell_density(lo: float, hi: float) -> RadialDensity:
    """Indicator profile of the open shell (lo, hi)."""
    if not (0.0 <= lo < hi < math.inf):
        raise InvalidDensityError(f"invalid shell ({lo}, {hi})")

    def profile(r):
        r = np.asarray(r, dtype=float)
        return ((r > lo) & (r < hi)).astype(float)

    return RadialDensity(
        profile=profile, support_lo=float(lo), support_hi=float(hi),
        limsup_at_zero=1.0 if lo == 0.0 else 0.0,
        name=f"shell({lo:g},{hi:g})", breakpoints=(float(lo), float(hi)),
    )


def density_from_table(radii, values, name="table") -> RadialDensity:
    """Piecewise-linear profile through (radii, values), zero outside.

    Radii must be strictly increasing and >= 0, values nonnegative and
    finite.  The support is inferred as the span of grid points with
    f > 1e-300; the interpolant is zeroed outside that span so the
    declared support and the actual mass agree.
    """
    r = np.asarray(radii, dtype=float)
    f = np.asarray(values, dtype=float)
    if r.ndim != 1 or r.size < 2 or r.shape != f.shape:
        raise InvalidDensityError("table needs two parallel 1-d columns with >= 2 rows")
    if np.any(~np.isfinite(r)) or np.any(~np.isfinite(f)):
        raise InvalidDensityError("table contains non-finite entries")
    if np.any(np.diff(r) <= 0.0) or r[0] < 0.0:
        raise InvalidDensityError("table radii must be strictly increasing and >= 0")
    if np.any(f < 0.0):
        raise InvalidDensityError("table values must be nonnegative")
    positive = np.nonzero(f > 1e-300)[0]
    if positive.size == 0:
        raise InvalidDensityError("table has no positive values")
    # support of the interpolant: include the zero knot a taper ends on,
    # otherwise its linearly interpolated mass would be dropped
    first = positive[0] - 1 if positive[0] > 0 else positive[0]
    last = positive[-1] + 1 if positive[-1] < r.size - 1 else positive[-1]
    lo, hi = float(r[first]), float(r[last])
    if lo >= hi:
        raise InvalidDensityError("table support degenerates to a point")

    def profile(x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, r, f, left=0.0, right=0.0)
        return np.where((x >= lo) & (x <= hi), out, 0.0)

    return make_density(profile, (lo, hi), name=name, breakpoints=tuple(r))


def load_density_table(path) -> RadialDensity:
    """Read a CSV with header ``r,f`` into a tabulated density."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip().lower() for c in rows[0]] != ["r", "f"]:
        raise InvalidDensityError(f"{path}: expected header 'r,f'")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=float)
    except (ValueError, TypeError) as exc:
        raise InvalidDensityError(f"{path}: malformed row ({exc})") from exc
    if data.size == 0:
        raise InvalidDensityError(f"{path}: empty table")
    return density_from_table(data[:, 0], data[:, 1], name=f"table:{path}")


# ---------------------------------------------------------------------------
# normalization and cumulative tables
# ---------------------------------------------------------------------------

def _weighted(density: RadialDensity, n: int):
    """The radial mass integrand f(r) r^(n-1), safe against tail overflow.

    Evaluated through log f when an exact log profile is available, so that
    huge radii produce exp(-inf) = 0 instead of 0 * inf = nan (improper
    tails probe radii far beyond the support's numerically relevant range).
    """
    profile = density.profile
    log_profile = density.log_profile

    if log_profile is not None and n > 1:
        def g(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                log_r = np.log(np.where(r > 0.0, r, 1.0))
                vals = np.exp(log_profile(r) + (n - 1) * log_r)
            return np.where(r > 0.0, vals, 0.0)
    elif log_profile is not None:
        def g(r):
            with np.errstate(over="ignore", invalid="ignore"):
                return np.exp(log_profile(np.asarray(r, dtype=float)))
    else:
        def g(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                vals = profile(r) * r ** (n - 1)
            return np.nan_to_num(vals, nan=0.0, posinf=np.inf, neginf=-np.inf)

    return g


def _total_weight(density: RadialDensity, n: int) -> float:
    """Int f(r) r^(n-1) dr over the support, raising on divergence."""
    g = _weighted(density, n)
    lo, hi = density.support_lo, density.support_hi
    pts = density.breakpoints
    if np.isfinite(hi):
        total = integrate(g, lo, hi, points=pts)
    else:
        split = max(1.0, 2.0 * lo)
        head = integrate(g, lo, split, points=pts)
        tail, converged = tail_integral(g, split)
        if not converged:
            raise DivergentMassError(
                f"{density.name}: radial mass integral diverges for n={n}"
            )
        total = head + tail
    if not np.isfinite(total) or total <= 0.0:
        raise InvalidDensityError(
            f"{density.name}: radial mass integral is {total!r} for n={n}"
        )
    return total


def normalizing_mass(density: RadialDensity, n: int) -> float:
    """Normalizer M = A_n * Int f(r) r^(n-1) dr making the measure unit mass."""
    if n < 1:
        raise DimensionMismatchError(f"dimension must be >= 1, got {n}")
    return sphere_constants(n).surface * _total_weight(density, n)


#: tail decades used as quantile anchors when placing grid nodes
_ANCHOR_TAILS = np.array([1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5,
                          1e-4, 1e-3, 1e-2, 5e-2, 1e-1, 0.25, 0.5])


class RadialMeasure:
    """Radial probability measure with tabulated cumulative mass.

    ``grid`` holds interior node radii; ``below[i]`` and ``above[i]`` are
    the unnormalized integrals of f(s) s^(n-1) over [support_lo, grid[i]]
    and [grid[i], support_hi].  ``mass`` is the normalizer M.
    Instances are immutable in practice and safe to share across threads.
    """

    def __init__(self, density, n, grid, below, above, total_weight):
        self.density = density
        self.n = int(n)
        self.grid = grid
        self.below = below
        self.above = above
        self.total_weight = float(total_weight)
        self.surface = sphere_constants(self.n).surface
        self.mass = self.surface * self.total_weight
        self._weight_fn = _weighted(density, self.n)
        self._lower_quantile = None
        self._upper_quantile = None

    # -- cumulative mass ---------------------------------------------------

    def _far_cap(self, hi: float) -> float:
        # beyond this radius the residual tail (< tail_floor / 30) is dropped
        if np.isfinite(hi):
            return hi
        return self.grid[-1] + 3.0 * max(self.grid[-1], 1.0)

    def _segments(self, r):
        """(reference index, residual integral from the node left of r)."""
        refs = np.concatenate(([self.density.support_lo], self.grid))
        idx = np.searchsorted(self.grid, r, side="right")
        start = refs[idx]
        resid = segment_integrals(self._weight_fn, start, r)
        return idx, resid

    def ball_mass(self, r):
        """mu[B_r(0)]: mass of the centered ball, clamped to [0, 1]."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        lo, hi = self.density.support_lo, self.density.support_hi
        out = np.zeros(r.shape, dtype=float)
        done_hi = r >= hi
        out[done_hi] = 1.0
        live = ~done_hi & (r > lo)
        if np.any(live):
            rl = np.minimum(r[live], self._far_cap(hi))
            idx, resid = self._segments(rl)
            base = np.where(idx > 0, self.below[np.maximum(idx - 1, 0)], 0.0)
            low = base + resid
            tail_base = np.where(idx > 0, self.above[np.maximum(idx - 1, 0)], self.total_weight)
            tail = np.maximum(tail_base - resid, 0.0)
            frac_low = low / self.total_weight
            frac = np.where(frac_low <= 0.5, frac_low, 1.0 - tail / self.total_weight)
            out[live] = np.clip(frac, 0.0, 1.0)
        return float(out[0]) if scalar else out

    def upper_partial(self, r):
        """Unnormalized tail integral of f(s) s^(n-1) over [r, support_hi]."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        lo, hi = self.density.support_lo, self.density.support_hi
        out = np.zeros(r.shape, dtype=float)
        below_lo = r <= lo
        out[below_lo] = self.total_weight
        live = ~below_lo & (r < hi)
        if np.any(live):
            rl = np.minimum(r[live], self._far_cap(hi))
            idx, resid = self._segments(rl)
            tail_base = np.where(idx > 0, self.above[np.maximum(idx - 1, 0)], self.total_weight)
            out[live] = np.maximum(tail_base - resid, 0.0)
        return float(out[0]) if scalar else out

    def tail_mass(self, r):
        """1 - ball_mass(r), evaluated tail-side so small values keep accuracy."""
        frac = np.asarray(self.upper_partial(r)) / self.total_weight
        out = np.clip(frac, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    # -- quantiles ----------------------------------------------------------

    def _build_quantiles(self):
        frac_lo = self.below / self.total_weight
        frac_hi = self.above / self.total_weight
        keep = frac_lo <= 0.6
        x = np.log(frac_lo[keep])
        _, first = np.unique(x, return_index=True)
        self._lower_quantile = PchipInterpolator(x[first], self.grid[keep][first], extrapolate=True)
        keep = frac_hi <= 0.6
        x = np.log(frac_hi[keep])[::-1]
        y = self.grid[keep][::-1]
        _, first = np.unique(x, return_index=True)
        self._upper_quantile = PchipInterpolator(x[first], y[first], extrapolate=True)

    def radius_at_ball_mass(self, p):
        """Approximate inverse of ball_mass (relative accuracy ~1e-10)."""
        if self._lower_quantile is None:
            self._build_quantiles()
        p = np.asarray(p, dtype=float)
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        floor = max(self.below[0] / self.total_weight, 1e-300)
        ceil = max(self.above[-1] / self.total_weight, 1e-300)
        p = np.clip(p, floor, 1.0 - ceil)
        out = np.where(
            p <= 0.5,
            self._lower_quantile(np.log(np.maximum(p, floor))),
            self._upper_quantile(np.log(np.maximum(1.0 - p, ceil))),
        )
        lo_bound = self.density.support_lo
        hi_bound = self.grid[-1]
        out = np.clip(out, lo_bound, hi_bound)
        return float(out[0]) if scalar else out

    def radius_at_tail(self, t):
        """Radius whose tail mass equals t (same accuracy as radius_at_ball_mass)."""
        t = np.asarray(t, dtype=float)
        return self.radius_at_ball_mass(1.0 - t)

    def quantile_1d(self, u):
        """Inverse of the 1-d CDF (only meaningful for n = 1)."""
        u = np.asarray(u, dtype=float)
        radius = self.radius_at_ball_mass(np.abs(2.0 * u - 1.0))
        out = np.sign(u - 0.5) * radius
        return float(out) if out.ndim == 0 else out


def radial_cdf(measure: RadialMeasure, r):
    """mu_n^f[B_r(0)] for r >= 0; 0 below the support, 1 above it."""
    return measure.ball_mass(r)


def cdf_1d(measure: RadialMeasure, alpha):
    """F(alpha) = mu_1^f[(-inf, alpha]] via symmetry of the density."""
    if measure.n != 1:
        raise DimensionMismatchError(f"cdf_1d needs a 1-d measure, got n={measure.n}")
    alpha = np.asarray(alpha, dtype=float)
    out = 0.5 * (1.0 + np.sign(alpha) * measure.ball_mass(np.abs(alpha)))
    return float(out) if out.ndim == 0 else out


def build_measure(density: RadialDensity, n: int, grid_size: int = 4096,
                  tail_floor: float = 1e-10) -> RadialMeasure:
    """Tabulate the radial measure of ``density`` in dimension ``n``.

    Nodes are spaced log-uniformly in tail mass between ``tail_floor`` and
    0.5 on both sides of the median.  Placement only needs to be rough; the
    returned cumulative values are recomputed to full precision by panel
    quadrature between the final nodes.
    """
    if n < 1:
        raise DimensionMismatchError(f"dimension must be >= 1, got {n}")
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    g = _weighted(density, n)
    lo, hi = density.support_lo, density.support_hi
    pts = density.breakpoints
    total = _total_weight(density, n)
    quad_tol = max(1e-15 * total, 1e-300)

    def cum(r):
        # reliable for lower-tail targets only: short interval, no cancellation
        return integrate(g, lo, r, points=pts, tol=quad_tol) if r > lo else 0.0

    if np.isfinite(hi):
        def tail_at(r):
            return integrate(g, r, hi, points=pts, tol=quad_tol)
    else:
        def tail_at(r):
            # dyadic blocks: computing total - cum(r) would lose the tail
            # to quadrature noise on heavy-tailed integrands
            return tail_integral(g, r)[0]

    anchors_t = np.unique(np.concatenate(
        [[tail_floor], _ANCHOR_TAILS[_ANCHOR_TAILS > tail_floor]]
    ))
    lower_anchor_r, upper_anchor_r = [], []
    prev = None
    for t in anchors_t[::-1]:  # t descending from 0.5
        target = t * total
        if prev is None:
            b = 1e-6
            if np.isfinite(hi):
                b = min(b, 0.5 * (lo + hi))
            while cum(b) < target:
                b = min(b * 2.0, hi) if np.isfinite(hi) else b * 2.0
                if np.isfinite(hi) and b >= hi:
                    b = hi
                    break
            r_t = brentq(lambda r: cum(r) - target, lo, b,
                         xtol=1e-13, rtol=1e-9, maxiter=256)
        else:
            r_t = brentq(lambda r: cum(r) - target, lo, prev,
                         xtol=1e-13, rtol=1e-9, maxiter=256)
        lower_anchor_r.append(r_t)
        prev = r_t
    lower_anchor_r = lower_anchor_r[::-1]  # ascending radius, t ascending
    prev = lower_anchor_r[-1]
    upper_anchor_r.append(prev)  # shared median anchor
    for t in anchors_t[::-1][1:]:
        target = t * total
        b = max(2.0 * prev, 1e-6)
        if np.isfinite(hi):
            b = hi
        else:
            while tail_at(b) > target:
                b *= 2.0
        r_t = brentq(lambda r: tail_at(r) - target, prev, b,
                     xtol=1e-13, rtol=1e-9, maxiter=256)
        upper_anchor_r.append(r_t)
        prev = r_t

    half = max(grid_size // 2, 32)
    logt = np.linspace(math.log(tail_floor), math.log(0.5), half)
    anchor_logt = np.log(anchors_t)
    lower_interp = PchipInterpolator(anchor_logt, lower_anchor_r, extrapolate=True)
    upper_interp = PchipInterpolator(anchor_logt, np.asarray(upper_anchor_r)[::-1],
                                     extrapolate=True)
    nodes = np.concatenate([lower_interp(logt), upper_interp(logt[:-1])[::-1]])
    if pts is not None:
        inner = [p for p in pts if lo < p < (hi if np.isfinite(hi) else np.inf)]
        nodes = np.concatenate([nodes, np.asarray(inner, dtype=float)])
    nodes = np.unique(nodes)
    nodes = nodes[(nodes > lo) & (nodes < hi)]
    if nodes.size < 16:
        raise InvalidDensityError(f"{density.name}: could not place a usable grid")

    edges = np.concatenate(([lo], nodes))
    panels = panel_integrals(g, edges, order=40)
    # the first panel may touch an endpoint kink; redo it adaptively
    panels[0] = integrate(g, lo, nodes[0], points=pts)
    if np.isfinite(hi):
        upper_end = integrate(g, nodes[-1], hi, points=pts)
    else:
        # dyadic blocks: quad's infinite-interval transform can silently
        # miss slowly decaying (power-law) tail mass
        upper_end, _ = tail_integral(g, nodes[-1])
    if np.any(panels < -1e-12 * max(total, 1e-300)):
        raise InvalidDensityError(f"{density.name}: negative mass detected")
    below = np.cumsum(panels)
    above = np.concatenate([np.cumsum(panels[1:][::-1])[::-1], [0.0]]) + upper_end
    total_weight = below[-1] + upper_end
    return RadialMeasure(density, n, nodes, below, above, total_weight)


# ---------------------------------------------------------------------------
# condition (a): positivity on the support and at the origin
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionAReport:
    """Numerical certificate for positivity of f on (0, R_f) and at 0+."""

    passed: bool
    positive_on_support: bool
    witness_radius: Optional[float]
    liminf_at_zero: float
    checked_up_to: float


def check_condition_a(density: RadialDensity, grid_points: int = 512) -> ConditionAReport:
    """Check that f is positive on (0, R_f) with positive lim inf at 0.

    Positivity is sampled on a dense grid of (0, R_f); the lim inf at 0 is
    estimated on the dyadic radii 2^-k.  The result is a numerical
    certificate, not a proof: failures carry the witness radius.
    """
    hi = density.support_hi
    if np.isfinite(hi):
        cap = hi * (1.0 - 1e-12)
    else:
        # walk out until the profile is negligible relative to its peak
        cap = 1.0
        peak = float(np.max(density.profile(np.geomspace(1e-6, 8.0, 64)))) or 1.0
        while cap < 1e9 and float(density.profile(np.array([cap]))[0]) > 1e-16 * peak:
            cap *= 2.0
    radii = np.unique(np.concatenate([
        np.geomspace(1e-12, cap, grid_points),
        np.linspace(cap / grid_points, cap, grid_points),
    ]))
    vals = np.asarray(density.profile(radii), dtype=float)
    bad = np.nonzero(vals <= 0.0)[0]
    positive = bad.size == 0
    witness = float(radii[bad[0]]) if bad.size else None

    dyadic = 2.0 ** -np.arange(10, 45, dtype=float)
    dyadic = dyadic[dyadic < hi]
    liminf = float(np.min(density.profile(dyadic))) if dyadic.size else 0.0
    scale = float(np.max(vals)) if vals.size else 1.0
    positive_at_zero = liminf > 1e-12 * max(scale, 1e-300)
    return ConditionAReport(
        passed=positive and positive_at_zero,
        positive_on_support=positive,
        witness_radius=witness,
        liminf_at_zero=liminf,
        checked_up_to=float(cap),
    )
