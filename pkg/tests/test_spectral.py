"""Spectral engines: quadrature, orthonormality, frame derivatives.

Degree-1 harmonics satisfy D^2 f = -f g on the unit sphere, which
pins every entry of the frame jet in closed form; degree-2 pins the
Laplacian through the eigenvalue -l(l+n-2).
"""

import math

import numpy as np
import pytest

from warpcmc import ParameterError, get_engine, sphere_volume
from warpcmc.spectral import AxisymEngine, SphericalHarmonicEngine


@pytest.fixture(scope="module")
def full():
    return get_engine("full", 3, 32)


@pytest.fixture(scope="module", params=[3, 4, 5])
def axi(request):
    return get_engine("axisym", request.param, 64)


def test_full_quadrature_total_area(full):
    ones = np.ones((full.nlat, full.nlon))
    assert full.integrate(ones) == pytest.approx(4.0 * math.pi, rel=1e-14)


def test_axisym_quadrature_total_area(axi):
    ones = np.ones(axi.npoints)
    assert axi.integrate(ones) == pytest.approx(sphere_volume(axi.dim - 1), rel=1e-13)


def test_full_mode_orthonormality(full):
    cases = [(0, 0), (1, -1), (1, 0), (2, 1), (3, -2), (5, 4)]
    for i, (l1, m1) in enumerate(cases):
        y1 = full.mode(l1, m1)
        for l2, m2 in cases[i:]:
            y2 = full.mode(l2, m2)
            expected = 1.0 if (l1, m1) == (l2, m2) else 0.0
            assert full.integrate(y1 * y2) == pytest.approx(expected, abs=1e-12)


def test_axisym_mode_orthonormality(axi):
    for l1 in range(5):
        y1 = axi.mode(l1)
        for l2 in range(l1, 5):
            expected = 1.0 if l1 == l2 else 0.0
            assert axi.integrate(y1 * axi.mode(l2)) == pytest.approx(expected, abs=1e-12)


def test_full_roundtrip_band_limited(full):
    rng = np.random.default_rng(5)
    field = np.zeros((full.nlat, full.nlon))
    for l, m in ((0, 0), (1, 1), (3, -2), (7, 5), (12, 0)):
        field = field + rng.normal() * full.mode(l, m)
    back = full.synthesize(full.analyze(field))
    assert np.max(np.abs(back - field)) < 1e-11 * max(1.0, np.max(np.abs(field)))


def test_axisym_roundtrip_band_limited(axi):
    rng = np.random.default_rng(6)
    field = np.zeros(axi.npoints)
    for l in (0, 1, 4, 9):
        field = field + rng.normal() * axi.mode(l)
    back = axi.synthesize(axi.analyze(field))
    assert np.max(np.abs(back - field)) < 1e-11 * max(1.0, np.max(np.abs(field)))


def test_full_frame_jet_degree_one(full):
    # f = cos(theta): gradient (-sin, 0), hessian -f delta
    f = np.cos(full.theta)[:, None] * np.ones(full.nlon)[None, :]
    _, f1, f2, h11, h12, h22 = full.on_frame_jet(f)
    s = np.sin(full.theta)[:, None]
    assert np.max(np.abs(f1 + s)) < 1e-11
    assert np.max(np.abs(f2)) < 1e-11
    for h in (h11, h22):
        assert np.max(np.abs(h + f)) < 1e-10
    assert np.max(np.abs(h12)) < 1e-10


def test_full_frame_jet_equatorial_degree_one(full):
    # f = sin(theta) cos(phi) exercises the azimuthal leg of the frame
    f = np.sin(full.theta)[:, None] * np.cos(full.phi)[None, :]
    _, f1, f2, h11, h12, h22 = full.on_frame_jet(f)
    c = np.cos(full.theta)[:, None]
    assert np.max(np.abs(f1 - c * np.cos(full.phi)[None, :])) < 1e-11
    assert np.max(np.abs(f2 + np.sin(full.phi)[None, :])) < 1e-11
    assert np.max(np.abs(h11 + f)) < 1e-10
    assert np.max(np.abs(h22 + f)) < 1e-10
    assert np.max(np.abs(h12)) < 1e-10


def test_full_frame_jet_degree_two_laplacian(full):
    f = full.mode(2, 1)
    out = full.on_frame_jet(f)
    lap = out[3] + out[5]
    assert np.max(np.abs(lap + 6.0 * f)) < 1e-9


def test_axisym_frame_jet_degree_one(axi):
    f = np.cos(axi.theta)
    _, ft, ftt, cot_ft = axi.on_frame_jet(f)
    assert np.max(np.abs(ft + np.sin(axi.theta))) < 1e-11
    assert np.max(np.abs(ftt + f)) < 1e-10
    # cot(theta) f' = -cos(theta): the tangential hessian entry of degree one
    assert np.max(np.abs(cot_ft + f)) < 1e-10


def test_axisym_frame_jet_laplacian_eigenvalue(axi):
    n = axi.dim
    f = axi.mode(3)
    _, _, ftt, cot_ft = axi.on_frame_jet(f)
    lap = ftt + (n - 2) * cot_ft
    eig = 3.0 * (3.0 + n - 2.0)
    assert np.max(np.abs(lap + eig * f)) < 1e-8 * max(1.0, np.max(np.abs(f)))


def test_filter_degrees_kills_selected_band(full):
    field = full.mode(2, 0) + 0.5 * full.mode(4, 1)
    factor = np.ones(full.lmax + 1)
    factor[4] = 0.0
    filtered = full.filter_degrees(field, factor)
    assert np.max(np.abs(filtered - full.mode(2, 0))) < 1e-11


def test_filter_degrees_axisym(axi):
    field = axi.mode(1) + axi.mode(3)
    factor = np.ones(axi.lmax + 1)
    factor[3] = 0.0
    filtered = axi.filter_degrees(field, factor)
    assert np.max(np.abs(filtered - axi.mode(1))) < 1e-11


def test_get_engine_caches():
    a = get_engine("axisym", 4, 48)
    b = get_engine("axisym", 4, 48)
    assert a is b
    assert get_engine("axisym", 5, 48) is not a


def test_engine_guards():
    with pytest.raises(ParameterError):
        get_engine("full", 4, 32)
    with pytest.raises(ParameterError):
        get_engine("fourier", 3, 32)
    full = get_engine("full", 3, 16)
    with pytest.raises(ParameterError):
        full.mode(full.lmax + 1, 0)
    with pytest.raises(ParameterError):
        full.mode(2, 3)
    axi = get_engine("axisym", 3, 16)
    with pytest.raises(ParameterError):
        axi.mode(2, 1)
    with pytest.raises(ParameterError):
        SphericalHarmonicEngine(4)
    with pytest.raises(ParameterError):
        AxisymEngine(2, 64)


def test_analyze_shape_guard(full):
    with pytest.raises(ParameterError):
        full.analyze(np.ones(full.nlat))
