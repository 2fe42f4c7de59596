import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stokes_dtn.errors import ConfigurationError, DealiasingError
from stokes_dtn.spectral import (
    HILBERT,
    BoundaryField,
    BoundaryGrid,
    FourierMultiplier,
    TrigPolynomial,
    apply_multiplier,
    bandwidth,
    from_spectrum,
    harmonic_extension_sample,
    hilbert_transform,
    inner,
    lipschitz_norm,
    lp_norm,
    mollifier_extension_sample,
    product,
    pure_mode,
    random_trig_polynomial,
    require_headroom,
    standard_bump,
    tangential_derivative,
    to_spectrum,
)

from conftest import random_field


def test_constant_spectrum(grid):
    spec = to_spectrum(BoundaryField(grid, np.ones(grid.n)))
    assert spec[0, 0] == pytest.approx(1.0)
    assert np.abs(spec[0, 1:]).max() < 1e-15


@pytest.mark.parametrize("n", [0, 6, 12, 100])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ConfigurationError):
        BoundaryGrid(n)


def test_hilbert_and_derivative_of_cos(grid):
    c = BoundaryField(grid, np.cos(3 * grid.x))
    np.testing.assert_allclose(hilbert_transform(c).scalar, np.sin(3 * grid.x), atol=1e-13)
    np.testing.assert_allclose(tangential_derivative(c).scalar, -3 * np.sin(3 * grid.x), atol=1e-12)


def test_constants_are_annihilated(grid):
    one = BoundaryField(grid, np.full(grid.n, 2.5))
    assert np.abs(hilbert_transform(one).values).max() == 0.0
    assert np.abs(tangential_derivative(one).values).max() == 0.0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), band=st.integers(1, 15))
def test_hilbert_squares_to_minus_identity(seed, band):
    grid = BoundaryGrid(64)
    g = random_trig_polynomial(np.random.default_rng(seed), band, 1, include_mean=False).sample(grid)
    hh = hilbert_transform(hilbert_transform(g))
    np.testing.assert_allclose(hh.values, -g.values, atol=1e-12 * np.abs(g.values).max())
    assert lp_norm(hilbert_transform(g)) == pytest.approx(lp_norm(g), rel=1e-12)


def test_multiplier_compose_and_reality(grid):
    assert HILBERT.reality_defect(grid) == 0.0
    sq = HILBERT.compose(HILBERT)
    g = pure_mode(grid, 4)
    np.testing.assert_allclose(apply_multiplier(sq, g).values, -g.values, atol=1e-13)
    bad = FourierMultiplier(lambda k: 1j * np.ones_like(k), 1, "i")
    assert bad.reality_defect(grid) > 0.5


def test_from_spectrum_rejects_non_hermitian(grid):
    spec = np.zeros((1, grid.n), complex)
    spec[0, 1] = 1.0
    with pytest.raises(ConfigurationError):
        from_spectrum(grid, spec)


def test_product_is_exact_for_band_limited_factors(grid, rng):
    a, b = random_field(rng, grid, 8, 1), random_field(rng, grid, 8, 1)
    np.testing.assert_allclose(product(a, b).values, a.values * b.values, atol=1e-13)


def test_headroom_guard(grid):
    wide = pure_mode(grid, 20)
    assert bandwidth(wide) == 20
    with pytest.raises(DealiasingError):
        require_headroom(wide, pure_mode(grid, 2))


def test_norms_of_cos(grid):
    c = BoundaryField(grid, np.cos(grid.x))
    assert lp_norm(c) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert lp_norm(c, math.inf) == pytest.approx(1.0)
    assert lipschitz_norm(c) == pytest.approx(2.0, rel=2e-3)
    assert inner(c, c) == pytest.approx(math.pi, rel=1e-14)


def test_harmonic_extension_of_cos(grid):
    c = BoundaryField(grid, np.cos(2 * grid.x))
    np.testing.assert_allclose(harmonic_extension_sample(c, 0.3).scalar, np.exp(-0.6) * c.scalar, atol=1e-14)


def test_standard_bump_is_normalized():
    bump = standard_bump()
    bump.validate()
    assert bump.mass == pytest.approx(1.0, abs=1e-10)
    assert bump.transform(np.array([0.0]))[0] == pytest.approx(1.0, abs=1e-10)


def test_mollifier_direct_method_converges_to_spectral():
    # the direct path integrates the linear interpolant: O(h^2)
    poly = random_trig_polynomial(np.random.default_rng(5), 6, 1)
    gaps = []
    for n in (128, 256, 512):
        g = poly.sample(BoundaryGrid(n))
        spectral = mollifier_extension_sample(g, 0.2, method="spectral")
        direct = mollifier_extension_sample(g, 0.2, method="direct")
        gaps.append(np.abs(spectral.values - direct.values).max() / np.abs(g.values).max())
    assert gaps[-1] < 1e-3
    assert math.log2(gaps[1] / gaps[2]) == pytest.approx(2.0, abs=0.15)


def test_mollifier_keeps_constants(grid):
    g = BoundaryField(grid, np.full(grid.n, 0.7))
    np.testing.assert_allclose(mollifier_extension_sample(g, 0.5).values, 0.7, atol=1e-12)


def test_trig_polynomial_checks_period(grid):
    poly = TrigPolynomial(np.ones((1, 2)), np.zeros((1, 2)), L=1.0)
    with pytest.raises(ConfigurationError):
        poly.sample(grid)
