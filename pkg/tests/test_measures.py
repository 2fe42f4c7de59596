import math

import numpy as np
import pytest

from stokes_dtn.errors import ConfigurationError
from stokes_dtn.measures import (
    GradedGrid,
    TentFamily,
    carleson_norm,
    nontangential_max,
    square_bound_report,
    weighted_volume_norm,
)
from stokes_dtn.spectral import BoundaryField, BoundaryGrid
from stokes_dtn.stokes import solve_stream

from conftest import cos_field, random_field


@pytest.fixture
def cos_data(grid):
    return BoundaryField(grid, np.vstack([cos_field(grid), np.zeros(grid.n)]))


@pytest.mark.parametrize("bad", [dict(y_min=0.0), dict(y_min=-1.0), dict(Y=100.0), dict(y_min=5.0, Y=4.0)])
def test_graded_grid_validation(grid, bad):
    with pytest.raises(ConfigurationError):
        GradedGrid(grid, **bad)


def test_quadrature_of_exponentials(grid):
    gg = GradedGrid(grid, 256)
    t = gg.levels
    vals = np.repeat(np.exp(-2 * t)[:, None], grid.n, axis=1)
    exact = (1 - math.exp(-2 * gg.Y) * (1 + 2 * gg.Y)) / 4 * grid.L
    assert gg.integrate(vals, 1) == pytest.approx(exact, rel=1e-10)


def test_square_function_closed_forms(cos_data):
    rep = square_bound_report(cos_data, GradedGrid(cos_data.grid, 256))
    assert rep.grad_u_t == pytest.approx(math.pi, rel=5e-3)
    assert rep.q_t == pytest.approx(math.pi, rel=5e-3)
    assert rep.boundary_l2_sq == pytest.approx(math.pi, rel=1e-12)


def test_chain_ratio_is_three(grid, rng):
    # on the half-plane each pressure mode gives iint |grad q|^2 t^3 = 3 iint |q|^2 t
    rep = square_bound_report(random_field(rng, grid, 8), GradedGrid(grid, 256))
    assert rep.ratios["grad_q_t3/q_t"] == pytest.approx(3.0, rel=1e-6)
    assert not rep.chain_holds


def test_quadrature_converges_under_refinement(grid, rng):
    sol = solve_stream(random_field(rng, grid, 8))
    (a, b), (c, d) = sol.gradient()
    exact = sum(m.square_integral(1) for m in (a, b, c, d))
    errs = [abs(weighted_volume_norm([a, b, c, d], 1, GradedGrid(grid, M)) - exact) / exact for M in (44, 88, 176)]
    assert errs[-1] < 1e-6
    assert math.log2(errs[0] / errs[1]) >= 3.0


def test_unsupported_power(grid, cos_data):
    with pytest.raises(ConfigurationError):
        weighted_volume_norm(solve_stream(cos_data).q, 2, GradedGrid(grid))


def test_nontangential_max_dominates_lowest_slice(grid, cos_data):
    sol = solve_stream(cos_data)
    gg = GradedGrid(grid)
    star = nontangential_max([sol.u1, sol.u2], gg)
    low = np.hypot(*(m.on_grid([gg.levels[0]])[0] for m in (sol.u1, sol.u2)))
    assert np.all(star.scalar >= low)
    wide = nontangential_max([sol.u1, sol.u2], gg, aperture=4.0)
    assert np.all(wide.scalar >= star.scalar)
    assert star.scalar.max() == pytest.approx(1.0, abs=5e-3)


def test_carleson_of_unit_density_is_period(grid):
    gg = GradedGrid(grid)
    res = carleson_norm(np.ones((gg.size, grid.n)), gg)
    assert res.norm == pytest.approx(grid.L, rel=1e-12)
    assert carleson_norm(np.zeros((gg.size, grid.n)), gg).norm == 0.0
    with pytest.raises(ConfigurationError):
        carleson_norm(-np.ones((gg.size, grid.n)), gg)


def test_tent_weights_are_additive(grid):
    fam = TentFamily(GradedGrid(grid), 3)
    by = {(t.level, t.index): fam.x_weights(t) for t in fam.tents}
    for (j, i), w in by.items():
        if j < 3:
            np.testing.assert_allclose(by[j + 1, 2 * i] + by[j + 1, 2 * i + 1], w, atol=1e-15)


def test_constant_data_square_functions_vanish(grid):
    rep = square_bound_report(BoundaryField(grid, np.ones((2, grid.n))), GradedGrid(grid))
    assert rep.grad_u_t == rep.q_t == rep.grad_q_t3 == 0.0
