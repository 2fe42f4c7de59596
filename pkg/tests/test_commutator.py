import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stokes_dtn.commutator import (
    SweepConfig,
    calderon_commutator,
    calderon_decomposition,
    calderon_scan,
    commutator_apply,
    commutator_ratio,
    dense_commutator_matrix,
    dtn_hilbert_form,
    ensemble_sweep,
    frequency_scan,
)
from stokes_dtn.errors import ConfigurationError, DegenerateRatioError
from stokes_dtn.spectral import BoundaryField, BoundaryGrid, lp_norm, random_trig_polynomial
from stokes_dtn.stokes import apply_dtn

from conftest import random_field


def test_matches_dense_oracle(rng):
    grid = BoundaryGrid(32)
    eta = random_field(rng, grid, 4, 1)
    f = random_field(rng, grid, 4)
    dense = dense_commutator_matrix(eta) @ f.values.ravel()
    fast = commutator_apply(eta, f).values.ravel()
    np.testing.assert_allclose(fast, dense, atol=1e-11 * np.abs(dense).max())


def test_constant_eta_commutes_exactly(grid, rng):
    f = random_field(rng, grid)
    eta = BoundaryField(grid, np.full(grid.n, 0.3))
    assert np.abs(commutator_apply(eta, f).values).max() == 0.0
    field, ratio = calderon_commutator(eta, f.component(0))
    assert ratio == 0.0 and np.abs(field.values).max() == 0.0


def test_invariant_under_constant_shift(grid, rng):
    eta, f = random_field(rng, grid, 6, 1), random_field(rng, grid)
    shifted = BoundaryField(grid, eta.values + 2.0)
    np.testing.assert_allclose(commutator_apply(shifted, f).values, commutator_apply(eta, f).values, atol=1e-11)


def test_hilbert_form(grid, rng):
    f = random_field(rng, grid, 12)
    lam = apply_dtn(f)
    np.testing.assert_allclose(dtn_hilbert_form(f).values, lam.values, atol=1e-12 * np.abs(lam.values).max())
    assert np.abs(dtn_hilbert_form(f, paper_literal=True).values - lam.values).max() > 1e-3


def test_calderon_decomposition(grid, rng):
    eta, g = random_field(rng, grid, 6, 1), random_field(rng, grid, 6, 1)
    field, ratio = calderon_commutator(eta, g)
    np.testing.assert_allclose(calderon_decomposition(eta, g).values, field.values, atol=1e-12)
    assert 0 < ratio < math.inf


def test_degenerate_inputs(grid, rng):
    eta = random_field(rng, grid, 4, 1)
    with pytest.raises(DegenerateRatioError):
        calderon_commutator(eta, BoundaryField(grid, np.zeros(grid.n)))
    with pytest.raises(ConfigurationError):
        commutator_ratio(eta, random_field(rng, grid), p=1.0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(0.01, 100))
def test_ratio_is_homogeneous_in_f(seed, lam):
    grid = BoundaryGrid(64)
    rng = np.random.default_rng(seed)
    eta = random_trig_polynomial(rng, 6, 1).sample(grid)
    f = random_trig_polynomial(rng, 6, 2).sample(grid)
    assert commutator_ratio(eta, f * lam) == pytest.approx(commutator_ratio(eta, f), rel=1e-10)


def test_sweep_is_deterministic_across_workers():
    serial = ensemble_sweep(SweepConfig(trials=12, n=64, band_limit=8))
    pooled = ensemble_sweep(SweepConfig(trials=12, n=64, band_limit=8, workers=4))
    assert serial.ratios == pooled.ratios
    assert 0 < serial.max < math.inf


@pytest.mark.parametrize("bad", [dict(trials=0), dict(p=1.0), dict(band_limit=40, n=64), dict(workers=0)])
def test_sweep_config_validation(bad):
    with pytest.raises(ConfigurationError):
        SweepConfig(**bad)


def test_frequency_scans():
    grid = BoundaryGrid(256)
    eta = BoundaryField(grid, np.cos(grid.x))
    # analytic values use ||cos||_{C^{0,1}} = 2; the discrete norm is slightly smaller
    scan = frequency_scan(eta, 32)
    assert scan.ratios[0] == pytest.approx(0.901, abs=1e-3)
    assert scan.ratios[-1] == pytest.approx(math.sqrt(10) / 4, rel=1e-3)
    assert scan.plateau <= 1.5
    cal = calderon_scan(eta, 32)
    assert cal.ratios[-1] == pytest.approx(math.sqrt(2) / 4, rel=1e-3)
    with pytest.raises(ConfigurationError):
        frequency_scan(eta, 65)
