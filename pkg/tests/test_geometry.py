import math

import numpy as np
import pytest

from stokes_dtn.errors import ConfigurationError
from stokes_dtn.geometry import (
    TARGET_SLOPE,
    build_map,
    extension_lemma21,
    hessian_density,
    lipschitz_seminorm,
    mapped_tent_polygon,
    pullback_integral,
    refine_field,
    shoelace_area,
    smooth_sawtooth,
    tent_pullback,
    verify_map,
)
from stokes_dtn.measures import GradedGrid, carleson_norm
from stokes_dtn.spectral import BoundaryField, BoundaryGrid


@pytest.fixture(scope="module")
def saw_map():
    grid = BoundaryGrid(128)
    psi = smooth_sawtooth(16, 0.5).sample(grid)
    return build_map(psi, grid=GradedGrid(grid, 128))


def test_sawtooth_slope():
    psi = smooth_sawtooth(16, 0.5).sample(BoundaryGrid(256))
    # triangle wave of height 0.5 over a half period: slope 1/pi, softened by the Fejer weights
    assert 0.4 < lipschitz_seminorm(psi) < 0.5


def test_refine_field_interpolates_exactly():
    coarse = smooth_sawtooth(8, 1.0).sample(BoundaryGrid(64))
    fine = refine_field(coarse, 2)
    np.testing.assert_allclose(fine.values, smooth_sawtooth(8, 1.0).sample(BoundaryGrid(128)).values, atol=1e-12)


def test_flat_graph_has_zero_hessian():
    grid = BoundaryGrid(64)
    m = build_map(BoundaryField(grid, np.zeros(grid.n)))
    gg = GradedGrid(grid, 64)
    assert m.c0 >= TARGET_SLOPE
    assert np.abs(hessian_density(m, gg)).max() == 0.0
    assert carleson_norm(hessian_density(m, gg), gg).norm == 0.0


def test_slope_bound_after_auto_c0(saw_map):
    gg = GradedGrid(saw_map.grid, 128)
    assert saw_map.on_grid(gg, 0, 1).min() >= TARGET_SLOPE


def test_explicit_c0_is_used():
    grid = BoundaryGrid(64)
    m = build_map(smooth_sawtooth(8, 0.5).sample(grid), c0=3.0)
    assert m.c0 == 3.0 and m.doublings == 0


def test_derivatives_match_differences(saw_map):
    x, t, h = np.array([0.4, 2.0, 5.1]), np.array([0.05, 0.4, 1.5]), 1e-4
    d = saw_map.derivatives(x, t)
    np.testing.assert_allclose(d.phi_t, (saw_map.phi(x, t + h) - saw_map.phi(x, t - h)) / (2 * h), atol=1e-6)
    np.testing.assert_allclose(d.phi_x, (saw_map.phi(x + h, t) - saw_map.phi(x - h, t)) / (2 * h), atol=1e-6)
    dtt = (saw_map.phi(x, t + h) - 2 * saw_map.phi(x, t) + saw_map.phi(x, t - h)) / h**2
    np.testing.assert_allclose(d.hessian[:, 1, 1], dtt, atol=1e-4)
    with pytest.raises(ConfigurationError):
        saw_map.derivatives(x, np.zeros(3))


def test_inverse_round_trip(saw_map):
    x, t = np.array([0.3, 1.0, 4.4]), np.array([0.02, 0.7, 3.0])
    np.testing.assert_allclose(saw_map.inverse(x, saw_map.phi(x, t)), t, atol=1e-10)


def test_tent_pullback_matches_polygon_area(saw_map):
    gg = GradedGrid(saw_map.grid, 128)
    area = tent_pullback(saw_map, 1, 0, gg)
    side = saw_map.grid.L / 2
    assert area == pytest.approx(shoelace_area(*mapped_tent_polygon(saw_map, 0.0, side)), rel=1e-6)


def test_pullback_of_unit_integrand_is_mapped_area(saw_map):
    gg = GradedGrid(saw_map.grid, 128)
    # the strip between psi and phi(., Y) has area c0 Y L + int (zeta_Y * psi - psi) = c0 Y L
    area = pullback_integral(saw_map, lambda x, y: np.ones_like(x), gg)
    assert area == pytest.approx(saw_map.c0 * gg.Y * gg.boundary.L, rel=1e-9)


def test_extension_homogeneity():
    grid = BoundaryGrid(64)
    eta = BoundaryField(grid, np.cos(grid.x))
    _, a = extension_lemma21(eta)
    _, b = extension_lemma21(eta * 3.0)
    assert a.grad_sup == pytest.approx(1.0, abs=1e-3)
    assert b.carleson_first == pytest.approx(3 * a.carleson_first, rel=1e-12)
    assert b.carleson_second == pytest.approx(9 * a.carleson_second, rel=1e-12)


def test_verify_map_passes():
    grid = BoundaryGrid(128)
    m = build_map(smooth_sawtooth(16, 1.0).sample(grid))
    rep = verify_map(m, 128)
    assert rep.passed, rep.flags
    assert rep.min_phi_t >= TARGET_SLOPE
    assert rep.drift <= 0.1
