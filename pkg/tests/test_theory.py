"""Exponent maps, boundary densities, CDFs, conformal covariance."""

import math

import numpy as np
import pytest

from sawlab import theory


def test_exponents_saw_point():
    em = theory.exponents_from_charge(0.0)
    assert em.kappa == pytest.approx(8.0 / 3.0, abs=1e-14)
    assert em.b == pytest.approx(5.0 / 8.0, abs=1e-14)
    assert em.b_tilde == pytest.approx(5.0 / 48.0, abs=1e-14)
    assert em.d_dimension == pytest.approx(4.0 / 3.0, abs=1e-14)


def test_exponents_lerw_point():
    em = theory.exponents_from_charge(-2.0)
    assert em.kappa == pytest.approx(2.0, abs=1e-14)


def test_exponents_upper_endpoint():
    assert theory.exponents_from_charge(1.0).kappa == pytest.approx(4.0)
    with pytest.raises(ValueError):
        theory.exponents_from_charge(1.5)


def test_kappa_monotone_in_charge():
    cs = np.linspace(-10, 1, 40)
    ks = [theory.exponents_from_charge(c).kappa for c in cs]
    assert np.all(np.diff(ks) > 0)


def test_disc_uniform_density():
    dens = theory.theoretical_density("disc_center")
    # constant 1/(2 pi) per radian
    vals = dens.density(np.linspace(0.1, 6.0, 7))
    assert np.allclose(vals, 1.0 / (2 * math.pi))
    assert theory.density_cdf(dens, math.pi / 2) == pytest.approx(0.25, abs=1e-12)


def test_semicircle_density_ratio():
    dens = theory.theoretical_density("halfplane_semicircle")
    r = dens.density(math.pi / 2) / dens.density(math.pi / 6)
    assert r == pytest.approx(2 ** 1.25, rel=1e-10)


def test_semicircle_cdf_midpoint():
    dens = theory.theoretical_density("halfplane_semicircle")
    assert theory.density_cdf(dens, math.pi / 2) == pytest.approx(0.5, abs=1e-10)
    assert theory.density_cdf(dens, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert theory.density_cdf(dens, math.pi) == pytest.approx(1.0, abs=1e-12)


def test_dual_quadrature_agreement():
    corr = theory.periodic_interpolator(
        np.arange(0.0, 90.0, 5.0),
        1.0 + 0.3 * np.cos(np.radians(np.arange(0.0, 90.0, 5.0)) * 4))
    for geometry in ("disc_center", "halfplane_semicircle"):
        for correction in (None, corr):
            dens = theory.theoretical_density(geometry, correction)
            angles = np.linspace(dens.lo, dens.hi, 13)
            a = np.asarray(theory.density_cdf(dens, angles, rule="adaptive"))
            g = np.asarray(theory.density_cdf(dens, angles, rule="gauss"))
            assert np.abs(a - g).max() <= 1e-8


def test_cdf_monotone():
    dens = theory.theoretical_density("halfplane_semicircle")
    grid = np.linspace(0, math.pi, 181)
    cdf = np.asarray(theory.density_cdf(dens, grid))
    assert np.all(np.diff(cdf) >= -1e-12)


def test_flat_correction_changes_nothing():
    dens0 = theory.theoretical_density("halfplane_semicircle")
    densc = theory.theoretical_density("halfplane_semicircle", lambda d: 2.7)
    grid = np.linspace(0.2, 3.0, 9)
    assert np.allclose(theory.density_cdf(dens0, grid),
                       theory.density_cdf(densc, grid), atol=1e-10)


def test_conformal_covariance_identity_map():
    base = np.array([1.0, 2.0, 3.0])
    out = theory.conformal_covariance_check(np.ones(3), 0.625, base)
    assert np.allclose(out, base / base.mean())


def test_conformal_covariance_semicircle_map():
    # |g'| of z + 1/z on the unit semicircle is 2 sin(theta); weighting the
    # uniform boundary density by |g'|^b gives the sin^{5/8} interior law
    grid = np.linspace(0.05, math.pi - 0.05, 400)
    out = theory.conformal_covariance_check(2.0 * np.sin(grid), 0.625)
    expected = np.sin(grid) ** 0.625
    assert np.allclose(out, expected / expected.mean(), rtol=1e-12)


def test_conformal_covariance_rejects_nonpositive():
    with pytest.raises(ValueError):
        theory.conformal_covariance_check(np.array([1.0, 0.0]), 0.625)


def test_halfplane_reference():
    h, s = theory.halfplane_boundary_reference(1.0)
    assert (h, s) == (1.0, 1.0)
    h4, s4 = theory.halfplane_boundary_reference(4.0)
    assert h4 == pytest.approx(1 / 16)
    assert s4 == pytest.approx(4.0 ** -1.25)
    x = np.array([0.5, 1.7, 9.0])
    _, f = theory.halfplane_boundary_reference(x)
    _, f2 = theory.halfplane_boundary_reference(2 * x)
    assert np.allclose(f2 / f, 2.0 ** -1.25)
    with pytest.raises(ValueError):
        theory.halfplane_boundary_reference(0.0)


def test_periodic_interpolator_wraparound():
    f = theory.periodic_interpolator([0.0, 30.0, 60.0], [1.0, 2.0, 3.0])
    assert f(90.0) == pytest.approx(1.0)
    assert f(-30.0) == pytest.approx(3.0)
    # midpoint of the closing segment (60 -> 90) interpolates toward f(0)
    assert f(75.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        theory.periodic_interpolator([0.0, 95.0], [1.0, 2.0])
