import math

import numpy as np
import pytest

from stokes_dtn.errors import ConfigurationError, DealiasingError
from stokes_dtn.extensions import extend
from stokes_dtn.identities import (
    ProductTestField,
    SeparableTestField,
    SmoothCutoff,
    ZeroTestField,
    bilinear_ratio,
    dahlberg_identity_check,
    key_identity_check,
    pressure_identity_check,
    q_eta_h_ratio,
)
from stokes_dtn.measures import GradedGrid
from stokes_dtn.spectral import BoundaryField, lipschitz_norm
from stokes_dtn.stokes import solve_stream

from conftest import random_field


@pytest.fixture
def data(grid, rng):
    f, g = random_field(rng, grid, 8), random_field(rng, grid, 8)
    eta = random_field(rng, grid, 6, 1)
    return f, g, eta * (1 / lipschitz_norm(eta))


@pytest.fixture
def gg(grid):
    return GradedGrid(grid, 256)


@pytest.mark.parametrize("kind", ["harmonic", "mollifier"])
def test_key_identity(data, gg, kind):
    rep = key_identity_check(*data, kind, gg)
    assert rep.relative_residual < 1e-8
    assert len(rep.terms) == 4


def test_key_identity_converges(data, grid):
    res = [key_identity_check(*data, "harmonic", GradedGrid(grid, M)).relative_residual for M in (48, 96)]
    assert math.log2(res[0] / res[1]) >= 2.0


def test_pressure_identity(data, gg):
    rep = pressure_identity_check(*data, "harmonic", gg)
    assert rep.relative_residual < 1e-8
    assert rep.metadata["literal_relative_residual"] > 1e-2


def test_trivial_identities_are_exact(data, gg, grid):
    f, g, _ = data
    one = BoundaryField(grid, np.ones(grid.n))
    rep = pressure_identity_check(f, g, one, "harmonic", gg)
    assert rep.lhs == 0.0 and all(v == 0.0 for _, v in rep.terms)
    z = dahlberg_identity_check(g, ZeroTestField(), gg)
    assert z.lhs == 0.0 and z.rhs == 0.0


def test_dahlberg_identity(data, gg, rng, grid):
    f, g, eta = data
    prod = ProductTestField(extend(eta), solve_stream(f))
    assert dahlberg_identity_check(g, prod, gg).relative_residual < 1e-9
    phi = random_field(rng, grid, 4, 4)
    sep = SeparableTestField(phi, SmoothCutoff(0.0, 2.0))
    assert dahlberg_identity_check(g, sep, gg).relative_residual < 1e-6


def test_non_decaying_test_field_rejected(grid, gg, rng):
    phi = random_field(rng, grid, 4, 4)
    with pytest.raises(ConfigurationError):
        dahlberg_identity_check(random_field(rng, grid), SeparableTestField(phi, SmoothCutoff(0.0, 100.0)), gg)


def test_cutoff_validation():
    with pytest.raises(ConfigurationError):
        SmoothCutoff(2.0, 1.0)


def test_product_headroom_guard(grid, rng):
    wide = random_field(rng, grid, 12, 1)
    with pytest.raises(DealiasingError):
        key_identity_check(random_field(rng, grid, 8), random_field(rng, grid, 8), wide)


def test_ratios_are_scale_free(data, gg, grid):
    f, g, eta = data
    v = ProductTestField(extend(eta), solve_stream(f))
    r = bilinear_ratio(g, v, gg)
    assert 0 < r < math.inf
    assert bilinear_ratio(g * 3.0, ProductTestField(extend(eta), solve_stream(f), 0.5), gg) == pytest.approx(r, rel=1e-10)
    q = q_eta_h_ratio(f, g, eta, "harmonic", gg)
    assert 0 < q < math.inf
    assert q_eta_h_ratio(f * 2.0, g, eta * 4.0, "harmonic", gg) == pytest.approx(q, rel=1e-10)
