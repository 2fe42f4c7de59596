import math

import numpy as np
import pytest

from stokes_dtn.spectral import BoundaryGrid, lp_norm, random_trig_polynomial

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split("criterion ", 1)[-1]):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE]


@pytest.fixture
def grid():
    return BoundaryGrid(64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(rng, grid, band=8, components=2, normalize=True):
    f = random_trig_polynomial(rng, band, components, grid.L).sample(grid)
    return f * (1.0 / lp_norm(f)) if normalize else f


def cos_field(grid, k=1):
    x = 2 * math.pi * k * grid.x / grid.L
    return np.cos(x)
