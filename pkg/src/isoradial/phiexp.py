"""Deformed exponentials and the radial density families they generate.

For a continuous, positive, nondecreasing deformation phi on (0, inf), the
phi-logarithm is ln_phi(t) = Int_1^t ds / phi(s); its inverse, extended by
0 below the lower limit l_phi = lim_{t->0} ln_phi(t) and by +inf above the
upper limit L_phi, is the phi-exponential.  phi(s) = s recovers log/exp;
phi(s) = s^q gives the power family

    exp_q(tau) = [1 + (1 - q) tau]_+^(1 / (1 - q)),   exp_1 = exp,

with the convention 0^a = inf for a < 0.  The growth of phi is summarized
by the extremes of the logarithmic-derivative coefficient s phi'(s)/phi(s):
``theta`` is its sup and ``delta`` its inf over s > 0.

The induced radial profile exp_phi(-r^p / p) has support radius
(-p l_phi)^(1/p); ``classify`` decides integrability of its radial mass in
dimension n and, where the theory is decisive, whether the Gaussian-to-
target transport is Lipschitz:

* theta < 1: Lipschitz (compactly supported, log-convex tail);
* theta = delta = 1 (phi proportional to s, i.e. profiles e^(-c r^p / p)):
  Lipschitz exactly when p >= 2;
* delta >= 1, 1 < theta < (n+p)/n and (theta-delta)/(theta-1) <= 1/p:
  not Lipschitz (the tail is too heavy for a bounded radial stretch).

Anything else is reported INCONCLUSIVE rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from ._integrate import integrate, panel_integrals, tail_integral
from .errors import DomainError, InvalidDensityError
from .radial import RadialDensity, make_density


@dataclass
class PhiFunction:
    """A deformation phi with its derived constants.

    ``lower_log_limit`` and ``upper_log_limit`` are the limits of ln_phi at
    0+ and +inf (possibly -inf / +inf).  ``theta`` / ``delta`` are the sup
    and inf of s phi'(s) / phi(s); for the power built-ins they are exact,
    for user-supplied deformations they are estimates over a bounded
    logarithmic grid.  ``power`` marks an exact power law phi(s) = s^q and
    ``linear`` an exact proportionality phi(s) = c s.
    """

    func: Callable[[np.ndarray], np.ndarray]
    name: str
    lower_log_limit: float
    upper_log_limit: float
    theta: float
    delta: float
    power: Optional[float] = None
    linear: bool = False
    scale_at_one: float = 1.0
    _inverse_cache: object = field(default=None, repr=False, compare=False)


def power_phi(q: float) -> PhiFunction:
    """phi(s) = s^q for q > 0, with closed-form constants."""
    if not (np.isfinite(q) and q > 0.0):
        raise DomainError(f"power exponent must be positive, got {q}")
    q = float(q)
    if q == 1.0:
        lower, upper = -math.inf, math.inf
    elif q < 1.0:
        lower, upper = -1.0 / (1.0 - q), math.inf
    else:
        lower, upper = -math.inf, 1.0 / (q - 1.0)
    return PhiFunction(
        func=lambda s: np.power(np.asarray(s, dtype=float), q),
        name="identity" if q == 1.0 else f"power(q={q:g})",
        lower_log_limit=lower, upper_log_limit=upper,
        theta=q, delta=q, power=q, linear=(q == 1.0),
    )


def identity_phi() -> PhiFunction:
    """phi(s) = s: the undeformed case."""
    return power_phi(1.0)


def poly_phi(coeffs) -> PhiFunction:
    """phi(s) = sum_k coeffs[k] s^k with nonnegative coefficients.

    For nonnegative coefficients s phi'(s)/phi(s) is a weighted average of
    the exponents, so theta and delta are the largest and smallest degree
    carrying a positive coefficient.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0 or np.any(c < 0.0) or not np.any(c > 0.0):
        raise DomainError("poly_phi needs nonnegative coefficients, not all zero")
    degrees = np.nonzero(c > 0.0)[0]
    theta, delta = float(degrees[-1]), float(degrees[0])

    def func(s):
        s = np.asarray(s, dtype=float)
        return sum(c[k] * s ** k for k in degrees)

    name = "poly(" + ",".join(f"{v:g}" for v in c) + ")"
    lower = _log_limit_at_zero(func)
    upper = _log_limit_at_infinity(func)
    linear = degrees.size == 1 and degrees[0] == 1
    return PhiFunction(func=func, name=name, lower_log_limit=lower,
                       upper_log_limit=upper, theta=theta, delta=delta,
                       linear=linear, scale_at_one=float(func(np.array([1.0]))[0]))


def phi_from_table(radii, values, name="phi-table") -> PhiFunction:
    """Piecewise-linear deformation through (s, phi(s)) samples.

    Continued as a constant beyond both table ends (keeps phi positive and
    nondecreasing).  Constants are numerical estimates.
    """
    s = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    if s.ndim != 1 or s.size < 2 or s.shape != v.shape:
        raise DomainError("phi table needs two parallel columns with >= 2 rows")
    if np.any(np.diff(s) <= 0.0) or s[0] <= 0.0:
        raise DomainError("phi table abscissae must be positive, strictly increasing")
    if np.any(v <= 0.0) or np.any(np.diff(v) < 0.0):
        raise DomainError("phi table values must be positive and nondecreasing")

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, s, v, left=v[0], right=v[-1])

    return make_phi(func, name=name)


def make_phi(func, name="phi") -> PhiFunction:
    """Wrap a generic positive nondecreasing callable, estimating constants."""
    grid = np.geomspace(1e-8, 1e8, 2001)
    vals = np.asarray(func(grid), dtype=float)
    if np.any(vals <= 0.0) or np.any(~np.isfinite(vals)):
        raise DomainError(f"{name}: deformation must be positive and finite on (0, inf)")
    if np.any(np.diff(vals) < -1e-12 * np.maximum(vals[:-1], vals[1:])):
        raise DomainError(f"{name}: deformation must be nondecreasing")
    theta, delta = _theta_delta_numeric(func, grid, vals)
    return PhiFunction(func=func, name=name,
                       lower_log_limit=_log_limit_at_zero(func),
                       upper_log_limit=_log_limit_at_infinity(func),
                       theta=theta, delta=delta,
                       scale_at_one=float(np.asarray(func(np.array([1.0])))[0]))


def _theta_delta_numeric(func, grid, vals, step=1e-6):
    """sup / inf of the one-sided difference quotient s (phi(s+h)-phi(s)) / (h phi(s))."""
    bumped = np.asarray(func(grid * (1.0 + step)), dtype=float)
    quotients = (bumped - vals) / (step * vals)
    return float(np.max(quotients)), float(np.min(quotients))


def _log_limit_at_zero(func) -> float:
    """lim_{t -> 0+} ln_phi(t) via dyadic blocks of Int 1/phi toward 0."""
    total = 0.0
    a = 1.0
    quiet = 0
    while a > 1e-250:
        b = 0.5 * a
        piece = integrate(lambda s: 1.0 / np.asarray(func(s), dtype=float), b, a)
        total += piece
        if piece <= 1e-15 * total + 1e-300:
            quiet += 1
            if quiet >= 2:
                return -total
        else:
            quiet = 0
        a = b
    return -math.inf


def _log_limit_at_infinity(func) -> float:
    """lim_{t -> inf} ln_phi(t), +inf when the integral of 1/phi diverges."""
    val, converged = tail_integral(lambda s: 1.0 / np.asarray(func(s), dtype=float), 1.0)
    return val if converged else math.inf


def theta_delta(phi: PhiFunction) -> tuple[float, float]:
    """(theta, delta): sup and inf of the logarithmic-derivative coefficient."""
    return phi.theta, phi.delta


def ln_phi(phi: PhiFunction, t: float) -> float:
    """ln_phi(t) = Int_1^t ds / phi(s) for t > 0; sign follows t - 1."""
    if not t > 0.0:
        raise DomainError(f"ln_phi requires t > 0, got {t}")
    if phi.power is not None:
        q = phi.power
        return math.log(t) if q == 1.0 else (t ** (1.0 - q) - 1.0) / (1.0 - q)
    if t == 1.0:
        return 0.0
    kernel = lambda s: 1.0 / np.asarray(phi.func(s), dtype=float)
    return integrate(kernel, 1.0, t) if t > 1.0 else -integrate(kernel, t, 1.0)


def exp_q(q: float, tau) -> float | np.ndarray:
    """The power-family exponential [1 + (1-q) tau]_+^(1/(1-q)); exp for q = 1.

    Follows the convention 0^a = inf for a < 0, so for q > 1 the value is
    +inf at and above the upper limit 1/(q-1).
    """
    if not (np.isfinite(q) and q > 0.0):
        raise DomainError(f"exp_q requires q > 0, got {q}")
    tau_arr = np.asarray(tau, dtype=float)
    scalar = tau_arr.ndim == 0
    tau_arr = np.atleast_1d(tau_arr)
    if q == 1.0:
        with np.errstate(over="ignore"):
            out = np.exp(tau_arr)
    else:
        base = 1.0 + (1.0 - q) * tau_arr
        expo = 1.0 / (1.0 - q)
        with np.errstate(over="ignore", divide="ignore"):
            out = np.where(base > 0.0, np.maximum(base, 1e-320) ** expo,
                           math.inf if expo < 0.0 else 0.0)
    return float(out[0]) if scalar else out


def exp_phi(phi: PhiFunction, tau) -> float | np.ndarray:
    """The phi-exponential: 0 up to l_phi, ln_phi^{-1} in between, inf past L_phi."""
    tau_arr = np.asarray(tau, dtype=float)
    scalar = tau_arr.ndim == 0
    tau_arr = np.atleast_1d(tau_arr)
    if phi.power is not None:
        out = np.asarray(exp_q(phi.power, tau_arr), dtype=float)
    else:
        lo, hi = phi.lower_log_limit, phi.upper_log_limit
        out = np.empty(tau_arr.shape, dtype=float)
        out[tau_arr <= lo] = 0.0
        out[tau_arr >= hi] = math.inf
        mid = (tau_arr > lo) & (tau_arr < hi)
        if np.any(mid):
            if tau_arr.size <= 4:
                out[mid] = [_invert_ln_phi(phi, float(t)) for t in tau_arr[mid]]
            else:
                out[mid] = _inverse_table(phi)(tau_arr[mid])
    return float(out[0]) if scalar else out


def _invert_ln_phi(phi: PhiFunction, tau: float) -> float:
    """Root of ln_phi(t) = tau by bracketing plus Brent, tolerance 1e-12."""
    a = b = 1.0
    if tau >= 0.0:
        while ln_phi(phi, b) < tau:
            b *= 2.0
            if b > 1e300:
                return math.inf
    else:
        while ln_phi(phi, a) > tau:
            a *= 0.5
            if a < 1e-300:
                return 0.0
    if a == b:
        # tau == 0 or the doubling landed exactly
        a, b = 0.5 * a, 2.0 * b
    return brentq(lambda t: ln_phi(phi, t) - tau, a, b, xtol=1e-14, rtol=1e-12)


def _inverse_table(phi: PhiFunction):
    """Cached monotone interpolant of exp_phi for bulk evaluation."""
    if phi._inverse_cache is None:
        t_grid = np.unique(np.concatenate([np.geomspace(1e-12, 1e12, 4801), [1.0]]))
        kernel = lambda s: 1.0 / np.asarray(phi.func(s), dtype=float)
        pieces = panel_integrals(kernel, t_grid, order=20)
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        anchor = int(np.searchsorted(t_grid, 1.0))
        tau_grid = cum - cum[anchor]
        tau_grid, keep = np.unique(tau_grid, return_index=True)
        phi._inverse_cache = PchipInterpolator(tau_grid, t_grid[keep], extrapolate=False)
    interp = phi._inverse_cache

    def evaluate(tau):
        tau = np.asarray(tau, dtype=float)
        lo, hi = interp.x[0], interp.x[-1]
        out = interp(np.clip(tau, lo, hi))
        out = np.where(tau < lo, interp(np.array(lo)), out)
        out = np.where(tau > hi, interp(np.array(hi)), out)
        return out

    return evaluate


def phi_p_density(phi: PhiFunction, p: float) -> RadialDensity:
    """The radial profile f(r) = exp_phi(-r^p / p) as a RadialDensity.

    The support radius is (-p l_phi)^(1/p) (infinite when l_phi = -inf).
    """
    if not (np.isfinite(p) and p > 0.0):
        raise DomainError(f"exponent must be positive, got {p}")
    p = float(p)
    support_hi = support_radius(phi, p)
    name = f"phi-p({phi.name},p={p:g})"

    if phi.power is not None:
        q = phi.power
        if q == 1.0:
            log_profile = lambda r: -np.power(np.asarray(r, dtype=float), p) / p
        elif q > 1.0:
            kappa = 1.0 / (q - 1.0)

            def log_profile(r):
                r = np.asarray(r, dtype=float)
                with np.errstate(over="ignore"):
                    return -kappa * np.log1p((q - 1.0) * np.power(r, p) / p)
        else:
            kappa = 1.0 / (1.0 - q)

            def log_profile(r):
                r = np.asarray(r, dtype=float)
                base = np.maximum(1.0 - (1.0 - q) * np.power(r, p) / p, 0.0)
                with np.errstate(divide="ignore"):
                    return kappa * np.log(base)

        def profile(r):
            with np.errstate(over="ignore"):
                return np.exp(log_profile(r))

        return RadialDensity(profile=profile, support_lo=0.0, support_hi=support_hi,
                             limsup_at_zero=1.0, name=name, log_profile=log_profile)

    def profile(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore"):
            vals = exp_phi(phi, -np.power(r, p) / p)
        return np.asarray(vals, dtype=float)

    return make_density(profile, (0.0, support_hi), name=name, limsup_at_zero=1.0)


def support_radius(phi: PhiFunction, p: float) -> float:
    """(-p l_phi)^(1/p): the radius where exp_phi(-r^p/p) hits zero."""
    if phi.lower_log_limit == -math.inf:
        return math.inf
    return (-p * phi.lower_log_limit) ** (1.0 / p)


@dataclass(frozen=True)
class PhiPClassification:
    """Verdict for the profile exp_phi(-r^p/p) in dimension n.

    ``integrable`` certifies finiteness of the radial mass integral;
    ``lipschitz`` is YES / NO / INCONCLUSIVE for the transport map, with
    ``which_clause`` naming the criterion that fired.
    """

    integrable: bool
    lipschitz: str
    which_clause: str
    support_radius: float


def classify(phi: PhiFunction, p: float, n: int) -> PhiPClassification:
    """Integrability and Lipschitz verdict for exp_phi(-r^p/p) in dimension n."""
    if not (np.isfinite(p) and p > 0.0):
        raise DomainError(f"exponent must be positive, got {p}")
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    theta, delta = phi.theta, phi.delta
    radius = support_radius(phi, p)
    integrable = (phi.lower_log_limit > -math.inf) or (theta < (n + p) / n)

    if theta < 1.0:
        verdict, clause = "YES", "compact support (theta < 1)"
    elif phi.linear:
        verdict = "YES" if p >= 2.0 else "NO"
        clause = "exponential-power threshold p >= 2"
    elif not integrable:
        verdict, clause = "INCONCLUSIVE", "radial mass not integrable"
    elif (delta >= 1.0 and 1.0 < theta < (n + p) / n
          and (theta - delta) / (theta - 1.0) <= 1.0 / p):
        verdict, clause = "NO", "heavy-tail obstruction (1 < theta < (n+p)/n)"
    else:
        verdict, clause = "INCONCLUSIVE", "no criterion applies"
    return PhiPClassification(integrable=integrable, lipschitz=verdict,
                              which_clause=clause, support_radius=radius)
