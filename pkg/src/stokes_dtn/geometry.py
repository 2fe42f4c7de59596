"""Lipschitz graph domains ``{y > psi(x)}`` and the Kenig-Stein map.

``rho(x, t) = (x, phi(x, t))`` with ``phi = c0 t + zeta_t * psi`` sends the
half-plane onto the graph domain.  Every derivative of ``zeta_t * psi`` is
obtained by differentiating the symbol ``zetahat(|kappa| t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigurationError
from .extensions import SpectralExtension
from .measures import CarlesonResult, GradedGrid, TentFamily, carleson_norm, evaluate
from .spectral import (
    TWO_PI,
    BoundaryField,
    BoundaryGrid,
    BumpSpec,
    TrigPolynomial,
    lipschitz_norm,
    standard_bump,
)

TARGET_SLOPE = 0.125
MAX_DOUBLINGS = 1024


def lipschitz_seminorm(g: BoundaryField) -> float:
    v = g.scalar
    return float(np.abs(np.diff(v, append=v[0])).max() / g.grid.h)


@dataclass(frozen=True, eq=False)
class GraphDomain:
    psi: BoundaryField

    @property
    def M(self) -> float:
        return lipschitz_seminorm(self.psi)


def refine_field(g: BoundaryField, factor: int = 2) -> BoundaryField:
    """Spectral interpolation of ``g`` onto a grid ``factor`` times finer."""
    fine = g.grid.refined(factor)
    n, big = g.grid.n, fine.n
    spec = np.zeros((g.components, big), dtype=complex)
    half = n // 2
    spec[:, :half] = g.spectrum[:, :half]
    spec[:, big - half + 1 :] = g.spectrum[:, half + 1 :]
    return BoundaryField(fine, np.fft.ifft(spec * big, axis=-1).real)


def smooth_sawtooth(modes: int = 16, amplitude: float = 1.0, L: float = TWO_PI) -> TrigPolynomial:
    """Band-limited triangle wave with corners at ``0`` and ``L/2``.

    Partial sum of ``|x| - pi/2`` on ``[-pi, pi]`` (odd cosines up to
    ``modes``) with Fejer weights, so the slope stays below ``amplitude``.
    """
    cos_c = np.zeros((1, modes + 1))
    for k in range(1, modes + 1, 2):
        cos_c[0, k] = -4.0 / (math.pi * k**2) * (1.0 - k / (modes + 1))
    scale = amplitude * L / TWO_PI
    return TrigPolynomial(cos_c, np.zeros_like(cos_c), L, scale)


class MapDerivatives(NamedTuple):
    phi: np.ndarray
    phi_t: np.ndarray
    phi_x: np.ndarray
    hessian: np.ndarray  # [..., (x, t), (x, t)]


@dataclass(frozen=True, eq=False)
class KenigSteinMap:
    psi: BoundaryField
    bump: BumpSpec
    c0: float
    doublings: int = 0

    @property
    def smoothing(self) -> SpectralExtension:
        return SpectralExtension(self.psi, "mollifier", self.bump)

    @property
    def grid(self) -> BoundaryGrid:
        return self.psi.grid

    def _part(self, dx: int, dt: int):
        return self.smoothing.derivative(dx, dt)

    def on_grid(self, grid: GradedGrid, dx: int = 0, dt: int = 0) -> np.ndarray:
        """Samples of ``d^dx_x d^dt_t phi`` on a graded grid."""
        vals = evaluate(self._part(dx, dt), grid)
        if (dx, dt) == (0, 0):
            vals = vals + self.c0 * grid.levels[:, None]
        elif (dx, dt) == (0, 1):
            vals = vals + self.c0
        return vals

    def phi(self, x, t) -> np.ndarray:
        return self.c0 * np.asarray(t, float) + self._part(0, 0)(x, t)

    def inverse(self, X, Yv, grid: GradedGrid | None = None) -> np.ndarray:
        """``t`` with ``phi(X, t) = Yv``; monotone interpolation then Newton steps."""
        grid = grid or GradedGrid(self.grid)
        X, Yv = np.broadcast_arrays(np.asarray(X, float), np.asarray(Yv, float))
        ts = np.concatenate([[0.0], grid.levels])
        out = np.empty(X.shape)
        flat_x, flat_y, flat_out = X.ravel(), Yv.ravel(), out.reshape(-1)
        xs, inv = np.unique(flat_x, return_inverse=True)
        table = self.phi(xs[:, None], ts[None, :])
        for i, x in enumerate(xs):
            sel = inv == i
            spline = PchipInterpolator(table[i], ts, extrapolate=True)
            flat_out[sel] = spline(flat_y[sel])
        for _ in range(3):
            d = self.derivatives(flat_x, np.maximum(flat_out, 1e-300))
            flat_out -= (d.phi - flat_y) / d.phi_t
        return out

    def derivatives(self, x, t) -> MapDerivatives:
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        if np.any(t <= 0):
            raise ConfigurationError("map derivatives need t > 0")
        ev = lambda dx, dt: self._part(dx, dt)(x, t)
        hess = np.stack(
            [np.stack([ev(2, 0), ev(1, 1)], -1), np.stack([ev(1, 1), ev(0, 2)], -1)], -2
        )
        return MapDerivatives(self.c0 * t + ev(0, 0), self.c0 + ev(0, 1), ev(1, 0), hess)


def map_derivatives(m: KenigSteinMap, x, t) -> MapDerivatives:
    return m.derivatives(x, t)


def build_map(
    psi: BoundaryField,
    bump: BumpSpec | None = None,
    c0: float | str = "auto",
    grid: GradedGrid | None = None,
    max_doublings: int = MAX_DOUBLINGS,
) -> KenigSteinMap:
    """Map with ``min phi_t >= 1/8`` on the sampled grid.

    ``c0 = "auto"`` starts at ``8 (1 + M int |s zeta'(s)| ds)`` and doubles
    until the grid check passes.  A numeric ``c0`` is used as given.
    """
    bump = bump or standard_bump()
    bump.validate()
    if psi.components != 1:
        raise ConfigurationError("graph function must be scalar")
    if c0 != "auto":
        return KenigSteinMap(psi, bump, float(c0))
    grid = grid or GradedGrid(psi.grid)
    M = lipschitz_seminorm(psi)
    value = 8.0 * (1.0 + M * bump.derivative_moment())
    slope = evaluate(SpectralExtension(psi, "mollifier", bump).derivative(0, 1), grid).min()
    for doublings in range(max_doublings + 1):
        if value + slope >= TARGET_SLOPE:
            return KenigSteinMap(psi, bump, value, doublings)
        value *= 2.0
    raise ConfigurationError(f"c0 search did not reach phi_t >= 1/8 in {max_doublings} doublings")


# -- verification ------------------------------------------------------------------------------

def hessian_density(m: KenigSteinMap, grid: GradedGrid, power: int = 2) -> np.ndarray:
    """``|grad^2 phi|^power t`` on the grid (Frobenius norm)."""
    xx, xt, tt = (m.on_grid(grid, *d) for d in ((2, 0), (1, 1), (0, 2)))
    frob = np.sqrt(xx**2 + 2 * xt**2 + tt**2)
    return frob**power * grid.levels[:, None]


@dataclass(frozen=True)
class MapReport:
    c0: float
    min_phi_t: float
    lower_bound: float
    upper_bound: float
    carleson: float
    carleson_refined: float
    tolerance: float = 0.1

    @property
    def drift(self) -> float:
        if self.carleson == 0.0:
            return 0.0 if self.carleson_refined == 0.0 else math.inf
        return abs(self.carleson_refined - self.carleson) / self.carleson

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "phi_t >= 1/8": self.min_phi_t >= TARGET_SLOPE,
            "bi-Lipschitz": 0.0 < self.lower_bound <= self.upper_bound < math.inf,
            "carleson finite": math.isfinite(self.carleson),
            "carleson drift": self.drift <= self.tolerance,
        }

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


def _jacobian_bounds(m: KenigSteinMap, grid: GradedGrid) -> tuple[float, float]:
    # singular values of [[1, 0], [phi_x, phi_t]]
    px, pt = m.on_grid(grid, 1, 0), m.on_grid(grid, 0, 1)
    fro2 = 1 + px**2 + pt**2
    det = np.abs(pt)
    disc = np.sqrt(np.maximum(fro2**2 - 4 * det**2, 0.0))
    smax = np.sqrt((fro2 + disc) / 2)
    smin = det / smax
    return float(smin.min()), float(smax.max())


def verify_map(m: KenigSteinMap, M: int = 256) -> MapReport:
    """Slope gate, Jacobian bounds and the Carleson norm of ``|grad^2 phi|^2 t``
    together with its value after doubling both grids."""
    grid = GradedGrid(m.grid, M)
    fine = KenigSteinMap(refine_field(m.psi), m.bump, m.c0, m.doublings)
    fine_grid = GradedGrid(fine.grid, 2 * M)
    lo, hi = _jacobian_bounds(m, grid)
    return MapReport(
        c0=m.c0,
        min_phi_t=float(m.on_grid(grid, 0, 1).min()),
        lower_bound=lo,
        upper_bound=hi,
        carleson=carleson_norm(hessian_density(m, grid), grid).norm,
        carleson_refined=carleson_norm(hessian_density(fine, fine_grid), fine_grid).norm,
    )


def pullback_integral(
    m: KenigSteinMap,
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grid: GradedGrid | None = None,
    region: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> float:
    """``iint F(x, phi(x, t)) phi_t dx dt``, optionally restricted to a
    parameter-space region given as a ``(x, t) -> weight`` mask."""
    grid = grid or GradedGrid(m.grid)
    X, T = np.meshgrid(grid.boundary.x + grid.offset, grid.levels)
    vals = np.asarray(integrand(X, m.on_grid(grid)), dtype=float) * m.on_grid(grid, 0, 1)
    if region is not None:
        vals = vals * region(X, T)
    return grid.integrate(vals)


def tent_pullback(m: KenigSteinMap, level: int, index: int, grid: GradedGrid | None = None) -> float:
    """Area of ``rho(T(Q))`` by pullback quadrature with tent bookkeeping."""
    grid = grid or GradedGrid(m.grid)
    family = TentFamily(grid, max(level, 0))
    tent = next(t for t in family.tents if (t.level, t.index) == (level, index))
    return family.measure(m.on_grid(grid, 0, 1), tent)


def shoelace_area(xs: np.ndarray, ys: np.ndarray) -> float:
    return 0.5 * abs(float(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1))))


def mapped_tent_polygon(m: KenigSteinMap, left: float, side: float, samples: int = 2000):
    """Vertices of ``rho(Q x [0, l(Q)])`` traversed counter-clockwise."""
    xs = np.linspace(left, left + side, samples)
    psi_interp = SpectralExtension(m.psi, "constant")
    bottom = psi_interp(xs, np.zeros_like(xs))
    top = m.phi(xs, np.full_like(xs, side))
    px = np.concatenate([xs, xs[::-1]])
    py = np.concatenate([bottom, top[::-1]])
    return px, py


# -- extension of a Lipschitz boundary function -------------------------------------------------

@dataclass(frozen=True)
class ExtensionReport:
    lipschitz: float
    grad_sup: float
    carleson_first: float
    carleson_second: float

    @property
    def gradient_constant(self) -> float:
        return self.grad_sup / self.lipschitz if self.lipschitz > 0 else 0.0


def extension_lemma21(
    eta: BoundaryField, grid: GradedGrid | None = None, bump: BumpSpec | None = None
) -> tuple[SpectralExtension, ExtensionReport]:
    """``G(x, t) = (zeta_t * eta)(x)`` with its gradient bound and both Carleson
    functionals ``|grad^2 G| t`` and ``|grad^2 G|^2 t``."""
    grid = grid or GradedGrid(eta.grid)
    G = SpectralExtension(eta, "mollifier", bump)
    gx, gt = evaluate(G.dx(), grid), evaluate(G.dy(), grid)
    xx, xt, tt = (evaluate(G.derivative(*d), grid) for d in ((2, 0), (1, 1), (0, 2)))
    frob = np.sqrt(xx**2 + 2 * xt**2 + tt**2)
    t = grid.levels[:, None]
    report = ExtensionReport(
        lipschitz=lipschitz_norm(eta),
        grad_sup=float(np.sqrt(gx**2 + gt**2).max()),
        carleson_first=carleson_norm(frob * t, grid).norm,
        carleson_second=carleson_norm(frob**2 * t, grid).norm,
    )
    return G, report
