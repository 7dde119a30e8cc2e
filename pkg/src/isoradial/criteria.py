"""Profile-only criteria for Lipschitz continuity of the radial transport.

Whether the Gaussian-to-target map is Lipschitz can be decided from the
profile f alone.  With a continuous positive weight psi on a tail
neighborhood of R_f, the decisive facts are:

* positivity: f > 0 on (0, R_f) with positive lim inf at 0;
* tail envelope: lam * f(r) psi(r) r^(n-1) <= Int_r^{R_f} f s^(n-1) ds
  <= (1/lam) * f(r) psi(r) r^(n-1) for some lam in (0, 1);
* tail limit: liminf_{r -> R_f} psi(r)^2 log(f(r) psi(r) r^(n-1)) > -inf.

All three together are equivalent to a Lipschitz transport (given a
bounded profile at 0); conversely, once the envelope holds for some psi,
a Lipschitz transport forces the tail limit to be finite, so envelope-
holds + tail-limit-fails certifies NOT Lipschitz for that same psi.
A log-concavity-style test supplies a canonical psi = 1 / (-log f)'
whenever -log f has diverging slope, eventually-positive curvature and
bounded curvature-to-slope-squared ratio near R_f.

"For r large enough" is operationalized as the window of the last decades
of tail mass (1e-2 down to 1e-10); limits are estimated from the deepest
sub-windows with a 5 percent stabilization rule.  Verdicts are numerical
certificates on a finite grid, never proofs; whenever the trend tests and
the thresholds disagree the verdict is INCONCLUSIVE rather than a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonSmoothDensityError, UnboundedAtZeroError
from .radial import (
    ConditionAReport,
    RadialDensity,
    RadialMeasure,
    build_measure,
    check_condition_a,
)
from .transport import TransportMap

#: tail-mass window representing "r close to R_f"
WINDOW_HI = 1e-2
WINDOW_LO = 1e-10
#: smallest admissible envelope constant
LAMBDA_FLOOR = 1e-3
#: relative drop between sub-window infima that counts as divergence
STABILIZE_TOL = 0.05

VERDICT_LIPSCHITZ = "LIPSCHITZ"
VERDICT_NOT = "NOT_LIPSCHITZ"
VERDICT_UNDECIDED = "INCONCLUSIVE"


@dataclass(frozen=True)
class TailEnvelopeResult:
    """Two-sided envelope check (largest admissible lam and its window)."""

    passed: bool
    lam: float
    radii: np.ndarray
    ratios: np.ndarray


@dataclass(frozen=True)
class TailLimitResult:
    """Estimated liminf of psi^2 log(f psi r^(n-1)) toward R_f."""

    passed: bool
    liminf_estimate: float
    stabilized: bool
    radii: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class LogConcavityReport:
    """Tail behavior of -log f: curvature, slope divergence, ratio bound.

    ``psi`` is the canonical weight 1 / (-log f)' when all three
    hypotheses hold, else None.
    """

    applicable: bool
    passed: bool
    curvature_positive: bool
    slope_diverges: bool
    ratio_bounded: bool
    curvature_estimate: float
    slope_estimate: float
    ratio_estimate: float
    psi: Optional[Callable]


@dataclass(frozen=True)
class CriteriaReport:
    """Combined verdict with the individual certificates."""

    condition_a: ConditionAReport
    envelope: Optional[TailEnvelopeResult]
    tail_limit: Optional[TailLimitResult]
    log_concavity: Optional[LogConcavityReport]
    verdict: str
    lipschitz_agrees: Optional[bool]


def psi_from_log_derivative(density: RadialDensity, rel_step: float = 1e-4):
    """The canonical weight psi(r) = 1 / (-log f)'(r), by central differences."""

    def psi(r):
        r = np.asarray(r, dtype=float)
        h = np.maximum(r * rel_step, 1e-12)
        slope = (density.log_value(r + h) - density.log_value(r - h)) / (2.0 * h)
        with np.errstate(divide="ignore"):
            return -1.0 / slope

    return psi


def _window_radii(measure: RadialMeasure, count: int = 257):
    tails = np.geomspace(WINDOW_HI, WINDOW_LO, count)
    return measure.radius_at_tail(tails), tails


def check_b(density: RadialDensity, n: int, psi,
            measure: Optional[RadialMeasure] = None
            ) -> tuple[TailEnvelopeResult, TailLimitResult]:
    """Evaluate the tail envelope and tail limit for the weight ``psi``.

    The envelope constant is the exact minimum over the window of
    min(ratio, 1/ratio) with ratio = tail integral / (f psi r^(n-1)); it
    passes at or above 1e-3.  The tail limit passes when the running
    infimum over the two deepest tail decades stabilizes (drop below 5
    percent) above -1e6.
    """
    if measure is None:
        measure = build_measure(density, n)
    radii, tails = _window_radii(measure)
    psi_vals = np.asarray(psi(radii), dtype=float)
    f_vals = np.asarray(density.profile(radii), dtype=float)
    pivot = f_vals * psi_vals * radii ** (n - 1)
    tail_ints = measure.upper_partial(radii)
    good = np.isfinite(pivot) & (pivot > 0.0) & np.isfinite(tail_ints) & (tail_ints > 0.0)
    if not np.all(good):
        ratios = np.full(radii.shape, math.nan)
        envelope = TailEnvelopeResult(False, 0.0, radii, ratios)
    else:
        ratios = tail_ints / pivot
        lam = float(np.min(np.minimum(ratios, 1.0 / ratios)))
        envelope = TailEnvelopeResult(lam >= LAMBDA_FLOOR, lam, radii, ratios)

    log_pivot = (density.log_value(radii) + np.log(psi_vals)
                 + (n - 1) * np.log(radii))
    values = psi_vals ** 2 * log_pivot
    mid = (tails <= 1e-6) & (tails >= 1e-8)
    deep = tails <= 1e-8
    inf_mid = float(np.min(values[mid]))
    inf_deep = float(np.min(values[deep]))
    stabilized = inf_deep >= inf_mid - STABILIZE_TOL * abs(inf_mid) - 1e-12
    tail_limit = TailLimitResult(
        passed=bool(stabilized and inf_deep > -1e6),
        liminf_estimate=inf_deep, stabilized=bool(stabilized),
        radii=radii, values=values)
    return envelope, tail_limit


def _loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x (y > 0 assumed)."""
    lx, ly = np.log(x), np.log(y)
    lx = lx - lx.mean()
    denom = float(np.dot(lx, lx))
    if denom <= 0.0:
        return 0.0
    return float(np.dot(lx, ly - ly.mean()) / denom)


def check_logcvx(density: RadialDensity, n: int,
                 measure: Optional[RadialMeasure] = None) -> LogConcavityReport:
    """Log-concavity-style tail test on Phi = -log f near R_f.

    Requires f positive with f -> 0 at R_f (checked numerically; the
    report is marked not applicable otherwise).  Phi' and Phi'' come from
    central differences of log f; if halving the step changes the
    curvature by more than 1e-3 relative the profile is declared too
    rough (tabulated inputs) and NonSmoothDensityError is raised.
    """
    if measure is None:
        measure = build_measure(density, n)
    tails = np.geomspace(1e-4, WINDOW_LO, 161)
    radii = measure.radius_at_tail(tails)
    f_vals = np.asarray(density.profile(radii), dtype=float)
    scale = max(density.limsup_at_zero, float(np.max(f_vals)), 1e-300)
    applicable = bool(np.all(f_vals > 0.0) and f_vals[-1] < 1e-3 * scale
                      and f_vals[-1] < f_vals[0])
    if not applicable:
        return LogConcavityReport(False, False, False, False, False,
                                  math.nan, math.nan, math.nan, None)

    def derivatives(step):
        h = radii * step
        log_f = density.log_value
        up, mid_v, down = log_f(radii + h), log_f(radii), log_f(radii - h)
        slope = -(up - down) / (2.0 * h)
        curvature = -(up - 2.0 * mid_v + down) / (h * h)
        return slope, curvature

    slope, curvature = derivatives(1e-4)
    _, curvature_half = derivatives(5e-5)
    noise = np.max(np.abs(curvature - curvature_half) / (1.0 + np.abs(curvature)))
    if noise > 1e-3:
        raise NonSmoothDensityError(
            f"{density.name}: log-profile curvature noise {noise:.2e} exceeds 1e-3")

    deep = slice(len(radii) // 2, None)
    curv_deep = curvature[deep]
    slope_deep = slope[deep]
    curvature_positive = bool(np.all(curv_deep > 1e-8)
                              and _loglog_slope(radii[deep], np.maximum(curv_deep, 1e-300)) >= -STABILIZE_TOL)
    slope_diverges = bool(np.all(slope_deep > 0.0)
                          and (_loglog_slope(radii[deep], np.maximum(slope_deep, 1e-300)) > STABILIZE_TOL
                               or slope_deep[-1] > 1e6))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = curvature / slope ** 2
    ratio_deep = ratio[deep]
    ratio_ok = bool(np.all(np.isfinite(ratio_deep)) and np.max(np.abs(ratio_deep)) < 1e6)
    if ratio_ok and np.all(ratio_deep > 0.0):
        ratio_ok = _loglog_slope(radii[deep], ratio_deep) <= STABILIZE_TOL
    passed = curvature_positive and slope_diverges and ratio_ok
    return LogConcavityReport(
        applicable=True, passed=passed,
        curvature_positive=curvature_positive,
        slope_diverges=slope_diverges,
        ratio_bounded=ratio_ok,
        curvature_estimate=float(curv_deep[-1]),
        slope_estimate=float(slope_deep[-1]),
        ratio_estimate=float(ratio_deep[-1]),
        psi=psi_from_log_derivative(density) if passed else None)


def prop_lip_verdict(density: RadialDensity, n: int, psi=None,
                     transport: Optional[TransportMap] = None) -> CriteriaReport:
    """Combined Lipschitz verdict from the profile alone.

    Verdict logic: positivity + envelope + tail limit give LIPSCHITZ; a
    failed positivity check, or a passing envelope with a failing tail
    limit, give NOT_LIPSCHITZ (a Lipschitz transport would force the tail
    limit for the same psi); anything else is INCONCLUSIVE.  When a built
    transport is supplied the verdict is cross-checked against the
    finiteness of its Lipschitz constant.
    """
    if not np.isfinite(density.limsup_at_zero):
        raise UnboundedAtZeroError(
            f"{density.name}: profile is unbounded at the origin")
    cond_a = check_condition_a(density)
    measure = transport.measure if transport is not None and transport.n == n \
        else build_measure(density, n)

    log_concavity = None
    chosen_psi = psi
    if chosen_psi is None:
        try:
            log_concavity = check_logcvx(density, n, measure)
            if log_concavity.passed:
                chosen_psi = log_concavity.psi
        except NonSmoothDensityError:
            log_concavity = None
        if chosen_psi is None:
            chosen_psi = psi_from_log_derivative(density)

    envelope, tail_limit = check_b(density, n, chosen_psi, measure)

    if not cond_a.passed:
        verdict = VERDICT_NOT
    elif envelope.passed and tail_limit.passed:
        verdict = VERDICT_LIPSCHITZ
    elif envelope.passed and not tail_limit.passed:
        verdict = VERDICT_NOT
    else:
        verdict = VERDICT_UNDECIDED

    agrees = None
    if transport is not None and verdict != VERDICT_UNDECIDED:
        agrees = (verdict == VERDICT_LIPSCHITZ) == np.isfinite(transport.lipschitz)
    return CriteriaReport(condition_a=cond_a, envelope=envelope,
                          tail_limit=tail_limit, log_concavity=log_concavity,
                          verdict=verdict, lipschitz_agrees=agrees)


def report_text(report: CriteriaReport) -> str:
    """Human-readable rendering of a CriteriaReport."""
    lines = [f"verdict: {report.verdict}"]
    a = report.condition_a
    lines.append(f"  positivity: {'pass' if a.passed else 'FAIL'} "
                 f"(liminf at 0 = {a.liminf_at_zero:.4g}"
                 + (f", witness r = {a.witness_radius:.4g}" if a.witness_radius else "")
                 + ")")
    if report.envelope is not None:
        e = report.envelope
        lines.append(f"  tail envelope: {'pass' if e.passed else 'FAIL'} (lambda = {e.lam:.4g})")
    if report.tail_limit is not None:
        t = report.tail_limit
        lines.append(f"  tail limit: {'pass' if t.passed else 'FAIL'} "
                     f"(liminf ~ {t.liminf_estimate:.4g}, "
                     f"{'stable' if t.stabilized else 'diverging'})")
    if report.log_concavity is not None and report.log_concavity.applicable:
        l = report.log_concavity
        lines.append(f"  log-concavity tail test: {'pass' if l.passed else 'FAIL'} "
                     f"(curvature ~ {l.curvature_estimate:.4g}, slope ~ {l.slope_estimate:.4g})")
    if report.lipschitz_agrees is not None:
        lines.append(f"  transport cross-check: "
                     f"{'consistent' if report.lipschitz_agrees else 'MISMATCH'}")
    return "\n".join(lines)


def write_diagnostics_csv(report: CriteriaReport, path) -> None:
    """Per-radius window diagnostics as CSV (r, envelope ratio, tail value)."""
    env, tl = report.envelope, report.tail_limit
    if env is None or tl is None:
        raise ValueError("report carries no window diagnostics")
    with open(path, "w", newline="") as fh:
        fh.write("r,envelope_ratio,tail_value\n")
        for r, q, v in zip(env.radii, env.ratios, tl.values):
            fh.write(f"{float(r)!r},{float(q)!r},{float(v)!r}\n")
