"""Graph surfaces: first and second fundamental form assembly.

Strong oracles: coordinate slices have H = (n-1) h'/h, vanishing
trace-free shape operator, and area h^{n-1} vol(S^{n-1}); an off-center
round sphere in the flat ambient has H = (n-1)/a exactly; the full and
axisymmetric engines assemble the same zonal surface through disjoint
code paths and must agree.
"""

import math

import numpy as np
import pytest

from warpcmc import (
    DomainError,
    ParameterError,
    axisym_grid,
    euclidean_warping,
    full_sphere_grid,
    hyperbolic_warping,
    perturb_slice,
    slice_surface,
    sphere_volume,
)
from warpcmc.surface import GraphSurface


@pytest.mark.parametrize("mode", ["full", "axisym"])
def test_slice_geometry_closed_form(schw3, mode):
    engine = full_sphere_grid(24) if mode == "full" else axisym_grid(3, 48)
    r0 = 0.6 * schw3.r_bar
    surface = slice_surface(schw3, engine, r0)
    rep = surface.geometry()
    h, hp, _, _ = schw3.jet(r0)
    assert rep.area == pytest.approx(h**2 * sphere_volume(2), rel=1e-12)
    assert np.max(np.abs(rep.mean_curvature - 2.0 * hp / h)) < 1e-11
    assert np.max(rep.shape_deficit) < 1e-11
    assert np.max(np.abs(rep.nu_radial - 1.0)) < 1e-12
    assert np.max(np.abs(rep.support - h)) < 1e-12
    assert np.max(np.abs(rep.potential - hp)) < 1e-12


@pytest.mark.parametrize("dim", [3, 4, 5])
def test_slice_area_higher_dim(dim):
    w = hyperbolic_warping(dim, curvature=0.8, r_bar=3.0)
    engine = axisym_grid(dim, 32)
    surface = slice_surface(w, engine, 1.1)
    h, hp, _, _ = w.jet(1.1)
    rep = surface.geometry()
    assert rep.area == pytest.approx(h ** (dim - 1) * sphere_volume(dim - 1), rel=1e-12)
    assert np.max(np.abs(rep.mean_curvature - (dim - 1) * hp / h)) < 1e-11


def test_off_center_sphere_is_umbilic():
    # polar graph of the unit-ish sphere centered at distance d on the axis
    w = euclidean_warping(3)
    engine = axisym_grid(3, 96)
    d, a = 0.3, 1.0
    c = np.cos(engine.theta)
    rho = d * c + np.sqrt(a * a - d * d * (1.0 - c * c))
    surface = GraphSurface(w, engine, rho)
    rep = surface.geometry()
    assert np.max(np.abs(rep.mean_curvature - 2.0 / a)) < 1e-8
    assert np.max(rep.shape_deficit) < 1e-8
    assert rep.area == pytest.approx(4.0 * math.pi * a * a, rel=1e-10)


def test_off_center_sphere_full_engine():
    w = euclidean_warping(3)
    engine = full_sphere_grid(48)
    d, a = 0.25, 0.9
    c = np.cos(engine.theta)[:, None] * np.ones(engine.nlon)[None, :]
    rho = d * c + np.sqrt(a * a - d * d * (1.0 - c * c))
    rep = GraphSurface(w, engine, rho).geometry()
    assert np.max(np.abs(rep.mean_curvature - 2.0 / a)) < 1e-7
    assert np.max(rep.shape_deficit) < 1e-7
    assert rep.area == pytest.approx(4.0 * math.pi * a * a, rel=1e-9)


def test_full_and_axisym_agree_on_zonal_surface(schw3):
    r0 = 0.5 * schw3.r_bar
    amp = 0.04 * schw3.r_bar
    axi = axisym_grid(3, 64)
    full = full_sphere_grid(64)
    s_axi = perturb_slice(schw3, axi, r0, [(2, 0, amp)])
    s_full = perturb_slice(schw3, full, r0, [(2, 0, amp)])
    ra, rf = s_axi.geometry(), s_full.geometry()
    assert rf.area == pytest.approx(ra.area, rel=1e-10)
    # compare along a meridian: the full grid shares the axisym latitudes
    # only by interpolation, so compare integrated quantities instead
    assert s_full.integrate(rf.mean_curvature) == pytest.approx(
        s_axi.integrate(ra.mean_curvature), rel=1e-9
    )
    assert s_full.integrate(rf.support) == pytest.approx(
        s_axi.integrate(ra.support), rel=1e-9
    )
    assert s_full.enclosed_weighted_volume() == pytest.approx(
        s_axi.enclosed_weighted_volume(), rel=1e-9
    )
    assert np.max(rf.shape_deficit) == pytest.approx(
        np.max(ra.shape_deficit), rel=1e-6
    )


def test_enclosed_weighted_volume_flat_ball():
    # f = 1 in the flat ambient, so the weighted volume is the ball volume
    w = euclidean_warping(3)
    engine = axisym_grid(3, 48)
    surface = slice_surface(w, engine, 1.5)
    vol = surface.enclosed_weighted_volume()
    assert vol == pytest.approx(4.0 / 3.0 * math.pi * 1.5**3, rel=1e-11)


def test_integrate_constant_is_area(schw3):
    engine = axisym_grid(3, 48)
    surface = perturb_slice(schw3, engine, 2.0, [(3, 0, 0.05)])
    rep = surface.geometry()
    ones = np.ones_like(surface.radii)
    assert surface.integrate(ones) == pytest.approx(rep.area, rel=1e-13)


def test_geometry_is_cached(schw3):
    engine = axisym_grid(3, 32)
    surface = slice_surface(schw3, engine, 1.0)
    assert surface.geometry() is surface.geometry()


def test_perturb_slice_guards(schw3):
    axi = axisym_grid(3, 32)
    with pytest.raises(ParameterError):
        perturb_slice(schw3, axi, 1.0, [(2, 1, 0.05)])
    with pytest.raises(ParameterError):
        perturb_slice(schw3, axi, 1.0, [(axi.lmax + 1, 0, 0.05)])
    with pytest.raises(DomainError):
        perturb_slice(schw3, axi, 1.0, [(2, 0, 10.0 * schw3.r_bar)])
    with pytest.raises(DomainError):
        slice_surface(schw3, axi, -1.0)
    with pytest.raises(DomainError):
        slice_surface(schw3, axi, schw3.r_bar * 1.5)


def test_graph_surface_shape_guard(schw3):
    axi = axisym_grid(3, 32)
    with pytest.raises(ParameterError):
        GraphSurface(schw3, axi, np.ones(7))


def test_graph_out_of_chart_raises(schw3):
    axi = axisym_grid(3, 32)
    radii = np.full(axi.npoints, schw3.r_bar * 0.9)
    radii[0] = schw3.r_bar * 1.2
    with pytest.raises(DomainError):
        GraphSurface(schw3, axi, radii).geometry()
