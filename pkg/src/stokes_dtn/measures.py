"""Half-plane quadrature: weighted square functions, dyadic tents,
nontangential maximal functions and Carleson norms.

The vertical rule is composite Gauss-Legendre.  A single bottom panel covers
``[0, y_min]`` and geometric panels cover ``[y_min, Y]``.  Panel breakpoints
include every dyadic height ``L 2^-j`` in range, so each tent height is a
union of whole panels.  Horizontal sums use the boundary grid, which is
exact for band-limited slices.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d

from .errors import ConfigurationError
from .spectral import BoundaryField, BoundaryGrid

PANEL_ORDER = 3
BOTTOM_ORDER = 6


@functools.lru_cache(maxsize=None)
def _gauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def _panel_nodes(edges: np.ndarray, order: int):
    x, w = _gauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


@dataclass(frozen=True, eq=False)
class GradedGrid:
    """Tensor quadrature on ``torus x (0, Y]``.

    ``M`` is the target number of levels above ``y_min``; each octave gets
    the same number of panels of ``PANEL_ORDER`` nodes.  A nonzero ``offset``
    shifts the horizontal nodes, giving an independent re-quadrature.
    """

    boundary: BoundaryGrid
    M: int = 256
    y_min: float | None = None
    Y: float | None = None
    offset: float = 0.0

    def __post_init__(self):
        L = self.boundary.L
        y_min = L / (4 * self.boundary.n) if self.y_min is None else float(self.y_min)
        Y = 2 * L if self.Y is None else float(self.Y)
        if not y_min > 0:
            raise ConfigurationError("y_min must be positive")
        if not y_min < Y <= 4 * L:
            raise ConfigurationError("need y_min < Y <= 4L")
        if self.M < PANEL_ORDER:
            raise ConfigurationError(f"M must be at least {PANEL_ORDER}")
        object.__setattr__(self, "y_min", y_min)
        object.__setattr__(self, "Y", Y)

        octaves = math.log2(Y / y_min)
        per_octave = math.ceil(math.ceil(self.M / PANEL_ORDER) / octaves)
        dyadic = [L * 2.0**-j for j in range(-2, 64) if y_min < L * 2.0**-j < Y]
        breaks = np.array(sorted({y_min, Y, *dyadic}))
        edges = [breaks[:1]]
        for a, b in zip(breaks[:-1], breaks[1:]):
            count = max(1, math.ceil(per_octave * math.log2(b / a) - 1e-9))
            edges.append(a * (b / a) ** (np.arange(1, count + 1) / count))
        edges = np.concatenate(edges)
        upper_y, upper_w = _panel_nodes(edges, PANEL_ORDER)
        low_y, low_w = _panel_nodes(np.array([0.0, y_min]), BOTTOM_ORDER)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "levels", np.concatenate([low_y, upper_y]))
        object.__setattr__(self, "weights", np.concatenate([low_w, upper_w]))
        self.levels.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.levels.size

    def refined(self) -> "GradedGrid":
        return GradedGrid(self.boundary, 2 * self.M, self.y_min, self.Y, self.offset)

    def coarsened(self) -> "GradedGrid":
        return GradedGrid(self.boundary, max(self.M // 2, PANEL_ORDER), self.y_min, self.Y, self.offset)

    def shifted(self, offset: float) -> "GradedGrid":
        return GradedGrid(self.boundary, self.M, self.y_min, self.Y, offset)

    def tail_bound(self) -> float:
        """Relative size of the neglected ``t > Y`` part for mode-one decay."""
        return math.exp(-2 * (2 * math.pi / self.boundary.L) * self.Y)

    def integrate(self, values: np.ndarray, power: float = 0.0) -> float:
        """``iint values t^power dx dt`` for samples of shape ``(levels, n)``."""
        values = np.asarray(values, dtype=float)
        col = values.mean(axis=1) * self.boundary.L
        return float(np.dot(self.weights * self.levels**power, col))

    def below(self, height: float) -> np.ndarray:
        """Mask of levels inside ``(0, height]``; exact when height is a breakpoint."""
        return self.levels <= height


Sampler = Callable[[np.ndarray, np.ndarray], np.ndarray]


def evaluate(sampler, grid: GradedGrid) -> np.ndarray:
    """Samples of shape ``(levels, n)``.

    Accepts an object with ``on_grid(heights)``, a plain ``(x, y) -> value``
    callable, or an array that is already sampled.
    """
    if isinstance(sampler, np.ndarray):
        if sampler.shape != (grid.size, grid.boundary.n):
            raise ConfigurationError("sample array does not match the graded grid")
        return sampler
    if hasattr(sampler, "on_grid"):
        return np.asarray(sampler.on_grid(grid.levels, grid.offset), dtype=float)
    X, Yv = np.meshgrid(grid.boundary.x + grid.offset, grid.levels)
    return np.broadcast_to(np.asarray(sampler(X, Yv), dtype=float), X.shape)


def squared_magnitude(samplers, grid: GradedGrid) -> np.ndarray:
    """Pointwise ``sum |s|^2`` over one sampler or a sequence of components."""
    if not isinstance(samplers, (list, tuple)):
        samplers = [samplers]
    total = np.zeros((grid.size, grid.boundary.n))
    for s in samplers:
        total += evaluate(s, grid) ** 2
    return total


SUPPORTED_POWERS = (1, 3)


def weighted_volume_norm(samplers, power: int, grid: GradedGrid) -> float:
    """``iint |v|^2 t^power dx dt`` over the graded grid."""
    if power not in SUPPORTED_POWERS:
        raise ConfigurationError(f"unsupported weight t^{power}; use one of {SUPPORTED_POWERS}")
    return grid.integrate(squared_magnitude(samplers, grid), power)


class VolumeNormReport(NamedTuple):
    value: float
    coarse_value: float
    richardson_error: float
    tail_bound: float


def weighted_volume_report(samplers, power: int, grid: GradedGrid) -> VolumeNormReport:
    """Value plus the ``M/2`` value and the gap between them as an error estimate."""
    fine = weighted_volume_norm(samplers, power, grid)
    coarse = weighted_volume_norm(samplers, power, grid.coarsened())
    return VolumeNormReport(fine, coarse, abs(fine - coarse), grid.tail_bound())


# -- nontangential maximal function ------------------------------------------------------------

def nontangential_max(samplers, grid: GradedGrid, aperture: float = 2.0) -> BoundaryField:
    """``(v)*(x_j)``: max of ``|v|`` over grid points with ``|x - x_j| <= sqrt(N0^2-1) y``."""
    if not aperture >= 1.0:
        raise ConfigurationError(f"aperture must be at least 1, got {aperture}")
    mag = np.sqrt(squared_magnitude(samplers, grid))
    n, h = grid.boundary.n, grid.boundary.h
    slope = math.sqrt(aperture**2 - 1.0)
    out = np.zeros(n)
    for row, y in zip(mag, grid.levels):
        reach = int(math.floor(slope * y / h * (1 + 1e-12)))
        if 2 * reach + 1 >= n:
            out = np.maximum(out, row.max())
        elif reach > 0:
            out = np.maximum(out, maximum_filter1d(row, 2 * reach + 1, mode="wrap"))
        else:
            out = np.maximum(out, row)
    return BoundaryField(grid.boundary, out)


# -- tents and Carleson norms ------------------------------------------------------------------

@dataclass(frozen=True)
class Tent:
    level: int
    index: int
    left: float
    side: float


class TentFamily:
    """Dyadic intervals ``Q`` at levels ``0..J`` and their tents ``Q x (0, l(Q)]``."""

    def __init__(self, grid: GradedGrid, depth: int | None = None):
        n, L = grid.boundary.n, grid.boundary.L
        max_depth = int(math.log2(n)) - 1
        depth = max_depth - 1 if depth is None else depth
        if not 0 <= depth <= max_depth:
            raise ConfigurationError(f"tent depth must lie in [0, {max_depth}]")
        if L * 2.0**-depth <= grid.y_min:
            raise ConfigurationError("smallest tent is below the bottom panel")
        self.grid = grid
        self.depth = depth
        self.tents = [
            Tent(j, i, i * L * 2.0**-j, L * 2.0**-j) for j in range(depth + 1) for i in range(2**j)
        ]

    def x_weights(self, tent: Tent) -> np.ndarray:
        """Trapezoid weights of ``Q`` on the boundary grid; children sum to the parent."""
        n = self.grid.boundary.n
        per = n >> tent.level
        w = np.zeros(n)
        start = tent.index * per
        idx = np.arange(start, start + per + 1) % n
        w[idx[1:-1]] = 1.0
        if tent.level == 0:
            w[:] = 1.0
        else:
            w[idx[0]] += 0.5
            w[idx[-1]] += 0.5
        return w * self.grid.boundary.h

    def measure(self, density: np.ndarray, tent: Tent, bottom: float = 0.0) -> float:
        """``nu(Q x (bottom, l(Q)])`` for sampled density; bottom must be a breakpoint or 0."""
        g = self.grid
        mask = g.below(tent.side) & ~g.below(bottom) if bottom > 0 else g.below(tent.side)
        col = density[mask] @ self.x_weights(tent)
        return float(np.dot(g.weights[mask], col))


class CarlesonResult(NamedTuple):
    norm: float
    table: list[tuple[int, int, float, float]]  # (level, index, nu(T(Q)), nu/|Q|)


def carleson_norm(density, grid: GradedGrid, depth: int | None = None) -> CarlesonResult:
    """``max_Q nu(T(Q)) / |Q|`` over dyadic tents for a non-negative density."""
    values = evaluate(density, grid)
    peak = np.abs(values).max(initial=0.0)
    if np.any(values < -1e-14 * max(peak, 1.0)):
        raise ConfigurationError("Carleson density must be non-negative")
    family = TentFamily(grid, depth)
    table = []
    for tent in family.tents:
        nu = family.measure(values, tent)
        table.append((tent.level, tent.index, nu, nu / tent.side))
    return CarlesonResult(max(r[3] for r in table), table)


# -- square-function report --------------------------------------------------------------------

@dataclass(frozen=True)
class SquareBoundReport:
    grad_u_t: float
    ntmax_sq: float
    grad_q_t3: float
    q_t: float
    boundary_l2_sq: float

    @property
    def ratios(self) -> dict[str, float]:
        def div(a, b):
            return a / b if b > 0 else (0.0 if a == 0 else math.inf)

        return {
            "grad_u_t/ntmax_sq": div(self.grad_u_t, self.ntmax_sq),
            "grad_q_t3/q_t": div(self.grad_q_t3, self.q_t),
            "q_t/boundary_l2_sq": div(self.q_t, self.boundary_l2_sq),
        }

    @property
    def chain_holds(self) -> bool:
        """Whether the displayed chain ``iint |grad q|^2 t^3 <= iint |q|^2 t`` holds."""
        return self.grad_q_t3 <= self.q_t


def square_bound_report(f: BoundaryField, grid: GradedGrid | None = None, aperture: float = 2.0):
    """Quadrature values of the square functions and maximal function of the solution from ``f``."""
    from .spectral import inner
    from .stokes import solve_stream

    grid = grid or GradedGrid(f.grid)
    sol = solve_stream(f)
    (a, b), (c, d) = sol.gradient()
    return SquareBoundReport(
        grad_u_t=weighted_volume_norm([a, b, c, d], 1, grid),
        ntmax_sq=inner(*(2 * [nontangential_max([sol.u1, sol.u2], grid, aperture)])),
        grad_q_t3=weighted_volume_norm([sol.q.dx(), sol.q.dy()], 3, grid),
        q_t=weighted_volume_norm(sol.q, 1, grid),
        boundary_l2_sq=inner(f, f),
    )
