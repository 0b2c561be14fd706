import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from ncgas.density import (RescaledPoint, bessel_zero_count, bessel_zero_density, eps_bounds,
                           fermi_intersections, zero_density_scaled, zero_density_unscaled)
from ncgas.errors import DomainError, NoIntersectionError
from ncgas.spectrum import ThermoPoint


def test_band_examples():
    assert (eps_bounds(0.0).eps_minus, eps_bounds(0.0).eps_plus) == (0.0, 4.0)
    assert (eps_bounds(-1.0).eps_minus, eps_bounds(-1.0).eps_plus) == (1.0, 1.0)
    band = eps_bounds(3.0)
    assert (band.eps_minus, band.eps_plus) == pytest.approx((1.0, 9.0))
    with pytest.raises(DomainError):
        eps_bounds(-1.5)


@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(-1.0, 50.0))
def test_band_width_and_product(alpha):
    band = eps_bounds(alpha)
    assert band.width == pytest.approx(4 * math.sqrt(alpha + 1), abs=1e-12)
    assert band.eps_plus * band.eps_minus == pytest.approx(alpha * alpha, abs=1e-10 * max(1, alpha * alpha))
    assert 0 <= band.eps_minus <= band.eps_plus


def test_density_values():
    assert zero_density_scaled(2.0, 0.0) == pytest.approx(1 / (2 * math.pi))
    assert zero_density_scaled(eps_bounds(2.5).eps_plus, 2.5) == 0.0
    assert zero_density_scaled(eps_bounds(2.5).eps_minus, 2.5) == 0.0
    with pytest.raises(DomainError):
        zero_density_scaled(5.0, 0.0)


def test_density_radicand_matches_band():
    rng = np.random.default_rng(11)
    for _ in range(100):
        alpha = rng.uniform(-1, 20)
        band = eps_bounds(alpha)
        eps = rng.uniform(band.eps_minus, band.eps_plus)
        if eps == 0:
            continue
        direct = 4 * eps - (alpha - eps) ** 2
        via_band = (band.eps_plus - eps) * (eps - band.eps_minus)
        assert direct == pytest.approx(via_band, abs=1e-12 * max(1.0, alpha ** 2))
        assert zero_density_scaled(eps, alpha) == pytest.approx(
            math.sqrt(max(direct, 0)) / (2 * math.pi * eps), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("alpha", [-0.9, -0.5, -0.1, 0.0, 0.3, 2.0, 10.0])
def test_sector_normalization(alpha):
    band = eps_bounds(alpha)
    total, _ = quad(lambda e: zero_density_scaled(e, alpha), band.eps_minus, band.eps_plus,
                    epsabs=1e-13, epsrel=1e-12, limit=200)
    expected = 1.0 + alpha if alpha < 0 else 1.0
    assert total == pytest.approx(expected, abs=1e-8)


def test_unscaled_density_consistency():
    M = 37.0
    assert zero_density_unscaled(2 * M, 0.0, M) == pytest.approx(zero_density_scaled(2.0, 0.0))
    for eps, alpha in [(1.3, 0.2), (5.0, 3.0), (0.7, -0.4)]:
        assert zero_density_unscaled(M * eps, M * alpha, M) == pytest.approx(
            zero_density_scaled(eps, alpha), rel=1e-12)
    # radicand exactly zero at x = M(alpha + 2 + 2 sqrt(alpha + 1)) with alpha = 3
    assert zero_density_unscaled(9 * M, 3 * M, M) == 0.0
    with pytest.raises(DomainError):
        zero_density_unscaled(20 * M, 0.0, M)


def test_fermi_intersections_examples():
    c = 2.25
    am, ap = fermi_intersections(RescaledPoint(1.0, c, 0.0))
    assert (am, ap) == pytest.approx((c - 2 * math.sqrt(c), c + 2 * math.sqrt(c)))
    am, ap = fermi_intersections(RescaledPoint(1.0, 0.0, 0.5))
    assert (am, ap) == pytest.approx((0.0, 8.0))
    assert eps_bounds(8.0).eps_minus == pytest.approx(4.0)
    with pytest.raises(NoIntersectionError):
        fermi_intersections(RescaledPoint(1.0, -1.0, 0.5))
    with pytest.raises(NoIntersectionError):
        fermi_intersections(RescaledPoint(1.0, 1.0, 1.0))


@settings(max_examples=100, deadline=None)
@given(c=st.floats(-5, 20), w=st.floats(-5, 3))
def test_intersections_lie_on_band_edges(c, w):
    pt = RescaledPoint(1.0, c, w)
    try:
        am, ap = fermi_intersections(pt)
    except NoIntersectionError:
        assert w == 1 or c - c * w + w * w < 0
        return
    assert am <= ap
    for a in (am, ap):
        if a < -1:
            continue
        band = eps_bounds(a)
        f = pt.f(a)
        gap = min(abs(f - band.eps_plus), abs(f - band.eps_minus))
        assert gap < 1e-10 * max(1.0, abs(a), abs(f))


def test_rescaled_point_round_trip():
    pt = ThermoPoint(50, 2.0, 30.0, -0.3)
    rp = RescaledPoint.from_thermo(pt)
    assert (rp.b, rp.c, rp.w) == (100.0, 0.6, -0.3)
    assert rp.to_thermo(50) == pt
    with pytest.raises(DomainError):
        RescaledPoint(0.0, 1.0, 0.0)


def test_bessel_density():
    assert bessel_zero_density(17.3, 0) == pytest.approx(1 / math.pi)
    assert bessel_zero_density(4.0, 4) == 0.0
    with pytest.raises(DomainError):
        bessel_zero_density(2.0, 3)
    for m, j in [(0, 10.0), (3, 7.5), (5, 40.0)]:
        val, _ = quad(lambda t: bessel_zero_density(t, m), m, j, epsrel=1e-12)
        assert bessel_zero_count(j, m) == pytest.approx(val, rel=1e-10)
