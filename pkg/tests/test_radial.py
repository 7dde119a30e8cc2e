"""Radial densities and measures: normalization, CDFs, tables, support."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from isoradial import radial
from isoradial.errors import (
    DimensionMismatchError,
    DivergentMassError,
    InvalidDensityError,
)

G_AT_ONE = 0.8413447460685429


@pytest.fixture(scope="module")
def gauss1():
    return radial.build_measure(radial.gaussian_density(), 1)


@pytest.fixture(scope="module")
def gauss2():
    return radial.build_measure(radial.gaussian_density(), 2)


def test_normalizing_mass_gaussian():
    d = radial.gaussian_density()
    for n in (1, 2, 3, 5):
        assert radial.normalizing_mass(d, n) == pytest.approx(
            (2.0 * math.pi) ** (n / 2.0), rel=1e-12)


def test_normalizing_mass_shell():
    # indicator of (0,1) in one dimension: uniform on [-1, 1], mass 2
    d = radial.uniform_shell_density(0.0, 1.0)
    assert radial.normalizing_mass(d, 1) == pytest.approx(2.0, rel=1e-12)


def test_normalizing_mass_exponential_oracle():
    # A_2 * Int_0^inf e^(-r) r dr = 2 pi * Gamma(2)
    d = radial.make_density(lambda r: np.exp(-np.asarray(r, dtype=float)),
                            log_profile=lambda r: -np.asarray(r, dtype=float),
                            name="exp")
    oracle, _ = quad(lambda r: 2.0 * math.pi * math.exp(-r) * r, 0.0, np.inf)
    assert oracle == pytest.approx(2.0 * math.pi, rel=1e-12)
    assert radial.normalizing_mass(d, 2) == pytest.approx(oracle, rel=1e-10)


def test_divergent_mass_raises():
    heavy = radial.make_density(lambda r: 1.0 / (1.0 + np.square(r)), name="heavy")
    with pytest.raises(DivergentMassError):
        radial.normalizing_mass(heavy, 2)
    with pytest.raises(DivergentMassError):
        radial.build_measure(heavy, 3)


def test_radial_cdf_support_edges(gauss2):
    assert radial.radial_cdf(gauss2, 0.0) == 0.0
    assert radial.radial_cdf(gauss2, 1e300) == pytest.approx(1.0, abs=1e-9)
    shell = radial.build_measure(radial.uniform_shell_density(1.0, 2.0), 1)
    assert radial.radial_cdf(shell, 0.5) == 0.0
    assert radial.radial_cdf(shell, 1.0) == 0.0
    assert radial.radial_cdf(shell, 2.0) == 1.0
    assert radial.radial_cdf(shell, 5.0) == 1.0
    assert radial.radial_cdf(shell, 1.5) == pytest.approx(0.5, abs=1e-12)


def test_radial_cdf_gaussian_closed_form(gauss2):
    # n = 2: mu[B_r] = 1 - e^(-r^2/2); at r = sqrt(2 ln 2) the mass is 1/2
    r_half = math.sqrt(2.0 * math.log(2.0))
    assert radial.radial_cdf(gauss2, r_half) == pytest.approx(0.5, abs=1e-11)
    rs = np.linspace(0.1, 5.0, 21)
    assert np.max(np.abs(radial.radial_cdf(gauss2, rs)
                         - (1.0 - np.exp(-0.5 * rs * rs)))) < 1e-11


def test_cdf_1d(gauss1):
    assert radial.cdf_1d(gauss1, 0.0) == pytest.approx(0.5, abs=1e-14)
    assert radial.cdf_1d(gauss1, 50.0) == pytest.approx(1.0, abs=1e-12)
    assert radial.cdf_1d(gauss1, -50.0) == pytest.approx(0.0, abs=1e-12)
    assert radial.cdf_1d(gauss1, 1.0) == pytest.approx(G_AT_ONE, abs=1e-11)
    assert radial.cdf_1d(gauss1, -1.0) == pytest.approx(1.0 - G_AT_ONE, abs=1e-11)
    with pytest.raises(DimensionMismatchError):
        radial.cdf_1d(radial.build_measure(radial.gaussian_density(), 2), 0.0)


@pytest.mark.parametrize("density,n", [
    (radial.gaussian_density(), 1),
    (radial.gaussian_density(), 3),
    (radial.scaled_gaussian_density(2.0), 2),
    (radial.exp_power_density(3.0), 5),
    (radial.uniform_shell_density(0.0, 1.0), 2),
])
def test_unit_mass(density, n):
    measure = radial.build_measure(density, n)
    # A_n / M * Int f(s) s^(n-1) ds must be exactly one
    assert measure.surface * measure.total_weight / measure.mass == pytest.approx(1.0, abs=1e-12)
    far = measure.grid[-1] * 1.5 if np.isfinite(density.support_hi) else measure.grid[-1]
    assert measure.ball_mass(far) == pytest.approx(1.0, abs=1e-8)


def test_monotone_cdf(gauss1):
    rng = np.random.default_rng(5)
    rs = np.sort(rng.uniform(0.0, 8.0, size=400))
    vals = radial.radial_cdf(gauss1, rs)
    assert np.all(np.diff(vals) >= 0.0)


def test_tail_mass_relative_accuracy(gauss1):
    # deep tail values keep relative accuracy (no 1 - F cancellation)
    from scipy.special import ndtr
    for r in (4.0, 5.0, 6.0):
        exact = 2.0 * (1.0 - ndtr(r))
        assert gauss1.tail_mass(r) == pytest.approx(exact, rel=1e-9)


def test_quantiles_roundtrip(gauss1):
    ps = np.array([1e-8, 1e-4, 0.1, 0.5, 0.9, 1.0 - 1e-4, 1.0 - 1e-8])
    rs = gauss1.radius_at_ball_mass(ps)
    assert np.max(np.abs(gauss1.ball_mass(rs) - ps)) < 1e-8
    u = np.array([0.01, 0.3, 0.5, 0.8413447460685429, 0.99])
    xs = gauss1.quantile_1d(u)
    assert np.max(np.abs(radial.cdf_1d(gauss1, xs) - u)) < 1e-8


def test_table_density(tmp_path):
    path = tmp_path / "tri.csv"
    path.write_text("r,f\n0,1\n1,0.5\n2,0\n")
    d = radial.load_density_table(path)
    # support is the closure of the interpolant's positive set
    assert d.support_lo == 0.0 and d.support_hi == 2.0
    # interpolation hits the knots and midpoints
    assert d.profile(np.array([0.5]))[0] == pytest.approx(0.75)
    m = radial.build_measure(d, 1)
    assert m.ball_mass(2.0) == pytest.approx(1.0, abs=1e-9)
    # 1-d mass of [-1, 1]: trapezoid area 0.75 over total area 1.0
    assert radial.cdf_1d(m, 1.0) - radial.cdf_1d(m, -1.0) == pytest.approx(0.75, abs=1e-10)


def test_table_validation(tmp_path):
    bad_header = tmp_path / "a.csv"
    bad_header.write_text("x,y\n0,1\n1,1\n")
    with pytest.raises(InvalidDensityError):
        radial.load_density_table(bad_header)
    bad_order = tmp_path / "b.csv"
    bad_order.write_text("r,f\n1,1\n0.5,1\n")
    with pytest.raises(InvalidDensityError):
        radial.load_density_table(bad_order)
    negative = tmp_path / "c.csv"
    negative.write_text("r,f\n0,1\n1,-1\n")
    with pytest.raises(InvalidDensityError):
        radial.load_density_table(negative)
    with pytest.raises(InvalidDensityError):
        radial.density_from_table([0.0, 1.0], [0.0, 0.0])


def test_condition_a_gaussian_passes():
    report = radial.check_condition_a(radial.gaussian_density())
    assert report.passed and report.positive_on_support
    assert report.liminf_at_zero == pytest.approx(1.0, rel=1e-6)


def test_condition_a_detached_shell_fails():
    report = radial.check_condition_a(radial.uniform_shell_density(1.0, 2.0))
    assert not report.passed
    assert report.witness_radius is not None and report.witness_radius < 1.0
