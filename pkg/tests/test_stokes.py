import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stokes_dtn.errors import ConfigurationError
from stokes_dtn.spectral import BoundaryField, BoundaryGrid, inner, random_trig_polynomial
from stokes_dtn.stokes import (
    apply_dtn,
    conormal_derivative,
    dtn_energy_check,
    dtn_symbol,
    eval_fields,
    residual_stokes,
    solve_stream,
    stack_square_integral,
)

from conftest import cos_field, random_field


def test_dtn_of_cos(grid):
    f = BoundaryField(grid, np.vstack([cos_field(grid), np.zeros(grid.n)]))
    out = apply_dtn(f)
    np.testing.assert_allclose(out.values[0], 2 * np.cos(grid.x), atol=1e-13)
    np.testing.assert_allclose(out.values[1], np.sin(grid.x), atol=1e-13)


def test_energy_closed_form(grid):
    f = BoundaryField(grid, np.vstack([cos_field(grid), np.zeros(grid.n)]))
    pairing, volume = dtn_energy_check(f)
    assert pairing == pytest.approx(2 * math.pi, abs=1e-12)
    assert volume == pytest.approx(2 * math.pi, abs=1e-12)


def test_solution_satisfies_stokes_and_trace(grid, rng):
    f = random_field(rng, grid)
    sol = solve_stream(f)
    pts = np.column_stack([rng.uniform(0, grid.L, 32), rng.uniform(1e-3, 3, 32)])
    res = residual_stokes(sol, pts)
    assert res.momentum < 1e-10 and res.divergence < 1e-10
    trace = eval_fields(sol, 0.0)
    np.testing.assert_allclose(trace.u1.scalar, f.values[0], atol=1e-12)
    np.testing.assert_allclose(trace.u2.scalar, f.values[1], atol=1e-12)
    assert sol.biharmonic_residual() < 1e-12


def test_corrupted_solution_is_detected(grid, rng):
    sol = solve_stream(random_field(rng, grid)).corrupted(1.1)
    pts = np.column_stack([rng.uniform(0, grid.L, 16), rng.uniform(0.1, 2, 16)])
    assert residual_stokes(sol, pts).momentum > 1e-3


def test_divergence_free_per_mode(grid, rng):
    sol = solve_stream(random_field(rng, grid))
    div = sol.u1.dx() + sol.u2.dy()
    assert np.abs(div.on_grid([0.0, 0.1, 1.0])).max() < 1e-12


def test_constant_data(grid):
    f = BoundaryField(grid, np.vstack([np.full(grid.n, 0.3), np.full(grid.n, -1.2)]))
    sol = solve_stream(f)
    s = eval_fields(sol, 0.7)
    np.testing.assert_allclose(s.u1.scalar, 0.3, atol=1e-15)
    np.testing.assert_allclose(s.u2.scalar, -1.2, atol=1e-15)
    assert np.abs(s.q.scalar).max() == 0.0
    assert np.abs(apply_dtn(f).values).max() == 0.0


def test_conormal_derivative_matches_symbol(grid, rng):
    f = random_field(rng, grid)
    np.testing.assert_allclose(conormal_derivative(solve_stream(f)).values, apply_dtn(f).values, atol=1e-11)


@pytest.mark.parametrize("k", [-5, -1, 1, 3, 32])
def test_symbol_spectrum(k):
    m = dtn_symbol(k)
    assert np.abs(m - m.conj().T).max() == 0.0
    np.testing.assert_allclose(np.linalg.eigvalsh(m), [abs(k), 3 * abs(k)], rtol=1e-14)
    assert np.abs(dtn_symbol(k, paper_literal=True) - m).max() > 1.0


def test_symbol_vanishes_at_zero():
    assert np.abs(dtn_symbol(0)).max() == 0.0


def test_square_integral_matches_energy(grid):
    f = BoundaryField(grid, np.vstack([cos_field(grid), np.zeros(grid.n)]))
    sol = solve_stream(f)
    (a, b), (c, d) = sol.gradient()
    assert stack_square_integral([a, b, c, d]) == pytest.approx(2 * math.pi, rel=1e-13)
    assert stack_square_integral([a, b, c, d], 1) == pytest.approx(math.pi, rel=1e-13)
    assert sol.q.square_integral(1) == pytest.approx(math.pi, rel=1e-13)


def test_negative_heights_rejected(grid, rng):
    sol = solve_stream(random_field(rng, grid))
    with pytest.raises(ConfigurationError):
        sol.u1.slice(-0.1)
    with pytest.raises(ConfigurationError):
        residual_stokes(sol, [[0.0, 0.0]])


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(-5, 5))
def test_dtn_is_linear_symmetric_and_nonnegative(seed, scale):
    grid = BoundaryGrid(32)
    rng = np.random.default_rng(seed)
    f = random_trig_polynomial(rng, 6, 2).sample(grid)
    g = random_trig_polynomial(rng, 6, 2).sample(grid)
    lf, lg = apply_dtn(f), apply_dtn(g)
    np.testing.assert_allclose(apply_dtn(f * scale + g).values, (lf * scale + lg).values, atol=1e-10)
    assert inner(lf, g) == pytest.approx(inner(f, lg), rel=1e-10, abs=1e-10)
    assert inner(lf, f) >= -1e-10
