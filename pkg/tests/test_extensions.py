import numpy as np
import pytest

from stokes_dtn.errors import ConfigurationError
from stokes_dtn.extensions import EXTENSION_KINDS, extend
from stokes_dtn.spectral import BoundaryField, mollifier_extension_sample

from conftest import random_field


def test_kinds():
    assert EXTENSION_KINDS == ("harmonic", "mollifier", "constant")


def test_harmonic_extension_and_derivatives(grid):
    eta = BoundaryField(grid, np.cos(2 * grid.x))
    G = extend(eta, "harmonic")
    np.testing.assert_allclose(G.slice(0.5).scalar, np.exp(-1.0) * np.cos(2 * grid.x), atol=1e-14)
    np.testing.assert_allclose(G.dy().slice(0.5).scalar, -2 * np.exp(-1.0) * np.cos(2 * grid.x), atol=1e-13)
    np.testing.assert_allclose(G.dx().slice(0.5).scalar, -2 * np.exp(-1.0) * np.sin(2 * grid.x), atol=1e-13)


def test_constant_extension(grid, rng):
    eta = random_field(rng, grid, 12, 1)
    G = extend(eta, "constant")
    np.testing.assert_allclose(G.slice(3.0).values, eta.values, atol=1e-12)
    assert np.abs(G.dy().slice(1.0).values).max() == 0.0


def test_mollifier_matches_sampler(grid):
    eta = BoundaryField(grid, np.sin(3 * grid.x))
    np.testing.assert_allclose(
        extend(eta, "mollifier").slice(0.3).values, mollifier_extension_sample(eta, 0.3).values, atol=1e-13
    )


def test_pointwise_matches_grid(grid):
    eta = BoundaryField(grid, np.cos(grid.x) + 0.3 * np.sin(4 * grid.x))
    G = extend(eta, "mollifier").dx()
    x = grid.x[5]
    assert G(np.array([x]), np.array([0.2]))[0] == pytest.approx(G.slice(0.2).scalar[5], abs=1e-12)


def test_rejections(grid):
    eta = BoundaryField(grid, np.cos(grid.x))
    with pytest.raises(ConfigurationError):
        extend(eta, "poisson")
    with pytest.raises(ConfigurationError):
        extend(eta).slice(-1.0)
