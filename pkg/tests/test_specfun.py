"""Special functions: oracle values by direct quadrature, round trips,
and the dimensional-constant identities."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import beta as beta_fn

from isoradial import specfun
from isoradial.errors import DomainError

# frozen from the quadrature oracle below (30-digit evaluation)
G_AT_ONE = 0.8413447460685429


def gauss_cdf_oracle(r):
    val, _ = quad(lambda s: math.exp(-0.5 * s * s) / math.sqrt(2 * math.pi),
                  -np.inf, r, epsabs=1e-14)
    return val


def test_gauss_cdf_center_and_limits():
    assert specfun.gauss_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert specfun.gauss_cdf(40.0) == pytest.approx(1.0, abs=1e-15)
    assert specfun.gauss_cdf(-40.0) == pytest.approx(0.0, abs=1e-15)


def test_gauss_cdf_against_quadrature():
    oracle = gauss_cdf_oracle(1.0)
    assert oracle == pytest.approx(G_AT_ONE, abs=1e-12)
    for r in (-3.0, -1.0, 0.3, 1.0, 2.5):
        assert specfun.gauss_cdf(r) == pytest.approx(gauss_cdf_oracle(r), abs=1e-12)


def test_gauss_quantile_roundtrip():
    rs = np.linspace(-6.0, 6.0, 121)
    back = specfun.gauss_quantile(specfun.gauss_cdf(rs))
    assert np.max(np.abs(back - rs)) <= 1e-8
    assert specfun.gauss_quantile(0.5) == 0.0
    assert specfun.gauss_quantile(G_AT_ONE) == pytest.approx(1.0, abs=1e-8)


def test_gauss_quantile_domain():
    for bad in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(DomainError):
            specfun.gauss_quantile(bad)


def test_reg_inc_gamma_special_cases():
    # shape 1 is the exponential CDF
    xs = np.linspace(0.0, 20.0, 41)
    assert np.max(np.abs(specfun.reg_inc_gamma(1.0, xs) - (1.0 - np.exp(-xs)))) < 1e-13
    # normalization at large x
    assert specfun.reg_inc_gamma(0.5, 1e6) == pytest.approx(1.0, abs=1e-15)
    # frozen oracle: Gaussian mass of the unit ball in dimension 3,
    # A_3 (2 pi)^(-3/2) Int_0^1 e^(-s^2/2) s^2 ds
    oracle, _ = quad(lambda s: math.exp(-0.5 * s * s) * s * s, 0.0, 1.0, epsabs=1e-14)
    oracle *= 4.0 * math.pi * (2.0 * math.pi) ** -1.5
    assert oracle == pytest.approx(0.19874804309879915, abs=1e-12)
    assert specfun.reg_inc_gamma(1.5, 0.5) == pytest.approx(oracle, abs=1e-12)


def test_reg_inc_gamma_domain():
    with pytest.raises(DomainError):
        specfun.reg_inc_gamma(0.0, 1.0)
    with pytest.raises(DomainError):
        specfun.reg_inc_gamma(1.0, -1.0)
    with pytest.raises(DomainError):
        specfun.reg_inc_gamma_inv(1.0, 1.5)


@pytest.mark.parametrize("shape", [0.5, 1.0, 1.5, 5.0])
def test_reg_inc_gamma_inverse_roundtrip(shape):
    # branch-adaptive round trip: past the median the lower value P(x)
    # rounds to within ulps of 1 and carries no tail information, so the
    # inverse must go through the upper branch (as all ball-mass matching
    # in this package does)
    xs = np.linspace(1e-3, 40.0, 80)
    ps = specfun.reg_inc_gamma(shape, xs)
    qs = specfun.reg_inc_gamma_upper(shape, xs)
    lower = ps <= 0.5
    back = np.where(lower,
                    specfun.reg_inc_gamma_inv(shape, np.minimum(ps, 0.5)),
                    specfun.reg_inc_gamma_upper_inv(shape, np.minimum(qs, 0.5)))
    assert np.max(np.abs(back - xs)) <= 1e-10 * (1.0 + np.max(xs))


def test_sphere_constants_low_dimensions():
    c1 = specfun.sphere_constants(1)
    # boundary of [-1, 1] is two points of counting measure
    assert c1.surface == pytest.approx(2.0, rel=1e-14)
    assert c1.volume == pytest.approx(2.0, rel=1e-14)
    c2 = specfun.sphere_constants(2)
    assert c2.surface == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert c2.volume == pytest.approx(math.pi, rel=1e-14)
    c3 = specfun.sphere_constants(3)
    assert c3.surface == pytest.approx(4.0 * math.pi, rel=1e-14)
    assert c3.volume == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)


def test_sphere_constant_identities():
    for n in range(1, 21):
        c = specfun.sphere_constants(n)
        assert c.surface == pytest.approx(n * c.volume, rel=1e-12)
    for n in range(2, 21):
        v_n = specfun.sphere_constants(n).volume
        a_prev = specfun.sphere_constants(n - 1).surface
        assert v_n / a_prev == pytest.approx(beta_fn(1.5, (n - 1) / 2.0), rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_gaussian_ball_mass_two_routes(n):
    surface = specfun.sphere_constants(n).surface
    for t in np.linspace(0.1, 6.0, 13):
        direct, _ = quad(
            lambda s: surface * (2 * math.pi) ** (-n / 2.0)
            * math.exp(-0.5 * s * s) * s ** (n - 1),
            0.0, t, epsabs=1e-13)
        assert specfun.gaussian_ball_mass(n, t) == pytest.approx(direct, abs=1e-9)


def test_gaussian_tail_check():
    assert specfun.gaussian_tail_check(10.0, 2, 0.9)
    # in dimension 2 the tail integral equals the pivot exactly, so the
    # envelope holds at every radius; the asymptotic-only behavior shows
    # in the other dimensions (oracle: direct quadrature of the tail)
    assert specfun.gaussian_tail_check(0.1, 2, 0.99)
    assert not specfun.gaussian_tail_check(0.1, 1, 0.99)
    assert not specfun.gaussian_tail_check(0.1, 3, 0.99)
    # the envelope eventually holds for any fixed lam < 1
    assert specfun.gaussian_tail_check(40.0, 2, 0.999)
    assert specfun.gaussian_tail_check(12.0, 3, 0.99)
    with pytest.raises(DomainError):
        specfun.gaussian_tail_check(-1.0, 2, 0.5)
    with pytest.raises(DomainError):
        specfun.gaussian_tail_check(1.0, 2, 1.5)
