"""Quadrature checks of the integration-by-parts identities behind the
commutator estimate, and the bilinear ratios they feed.

Coordinates are ``(x, t)`` with ``t`` the distance to the boundary; index
``alpha = 1, 2`` refers to ``x`` and ``t`` respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .commutator import commutator_apply
from .errors import ConfigurationError, DealiasingError, DegenerateRatioError
from .extensions import SpectralExtension, extend
from .measures import GradedGrid, evaluate, nontangential_max, weighted_volume_norm
from .spectral import BoundaryField, bandwidth, inner, lipschitz_norm, lp_norm
from .stokes import StreamSolution, solve_stream, synthesize_rows


@dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: float
    terms: tuple[tuple[str, float], ...]
    metadata: dict = field(default_factory=dict)

    @property
    def rhs(self) -> float:
        return math.fsum(v for _, v in self.terms)

    @property
    def absolute_residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def relative_residual(self) -> float:
        scale = max(abs(self.lhs), math.fsum(abs(v) for _, v in self.terms), 1e-300)
        return self.absolute_residual / scale

    def term(self, name: str) -> float:
        return dict(self.terms)[name]


def _derive(obj, dx: int = 0, dt: int = 0):
    for _ in range(dx):
        obj = obj.dx()
    for _ in range(dt):
        obj = obj.dy()
    return obj


def _check_products(eta: BoundaryField, *fields: BoundaryField):
    cap = eta.grid.n // 4
    for f in fields:
        width = bandwidth(eta) + bandwidth(f)
        if width > cap:
            raise DealiasingError(f"product bandwidth {width} exceeds n/4 = {cap}")


def _metadata(grid: GradedGrid, **extra) -> dict:
    return {
        "n": grid.boundary.n,
        "L": grid.boundary.L,
        "M": grid.M,
        "levels": grid.size,
        "Y": grid.Y,
        "offset": grid.offset,
        "tail_bound": grid.tail_bound(),
        **extra,
    }


class _Sampled:
    """Memoized grid samples of a solution and an extension."""

    def __init__(self, grid: GradedGrid):
        self.grid = grid
        self._cache = {}

    def __call__(self, key, obj, dx=0, dt=0):
        k = (key, dx, dt)
        if k not in self._cache:
            self._cache[k] = evaluate(_derive(obj, dx, dt), self.grid)
        return self._cache[k]


def _velocity(sol: StreamSolution):
    return (sol.u1, sol.u2)


def key_identity_check(
    f: BoundaryField,
    g: BoundaryField,
    eta: BoundaryField,
    extension: str = "harmonic",
    grid: GradedGrid | None = None,
) -> IdentityReport:
    """Boundary pairing ``int [Lambda, eta] f . g`` against its four volume terms."""
    _check_products(eta, f, g)
    grid = grid or GradedGrid(f.grid)
    lhs = inner(commutator_apply(eta, f), g)
    u_sol, h_sol = solve_stream(f), solve_stream(g)
    G = extend(eta, extension)
    s = _Sampled(grid)
    Gd = (s("G", G, 1, 0), s("G", G, 0, 1))
    u = [s(("u", a), c) for a, c in enumerate(_velocity(u_sol))]
    h = [s(("h", a), c) for a, c in enumerate(_velocity(h_sol))]
    du = [[s(("u", a), c, *d) for d in ((1, 0), (0, 1))] for a, c in enumerate(_velocity(u_sol))]
    dh = [[s(("h", a), c, *d) for d in ((1, 0), (0, 1))] for a, c in enumerate(_velocity(h_sol))]
    q = s("q", u_sol.q)
    pi = s("pi", h_sol.q)

    t1 = sum(u[a] * (Gd[0] * dh[a][0] + Gd[1] * dh[a][1]) for a in range(2))
    t2 = -sum((du[a][0] * Gd[0] + du[a][1] * Gd[1]) * h[a] for a in range(2))
    t3 = q * sum(Gd[a] * h[a] for a in range(2))
    t4 = -pi * sum(Gd[a] * u[a] for a in range(2))
    terms = tuple(
        (name, grid.integrate(v))
        for name, v in (
            ("u grad eta . grad h", t1),
            ("-grad u . grad eta h", t2),
            ("q d_a eta h^a", t3),
            ("-pi d_a eta u^a", t4),
        )
    )
    return IdentityReport("key", lhs, terms, _metadata(grid, extension=extension))


def pressure_identity_check(
    f: BoundaryField,
    g: BoundaryField,
    eta: BoundaryField,
    extension: str = "harmonic",
    grid: GradedGrid | None = None,
) -> IdentityReport:
    """``iint q d_a eta h^a`` against its six ``t``- and ``t^2``-weighted terms.

    The two tangential ``t^2`` terms carry ``+1/2``.  The residual with
    ``-1/2`` on those terms is recorded as ``literal_relative_residual``.
    """
    _check_products(eta, f, g)
    grid = grid or GradedGrid(f.grid)
    u_sol, h_sol = solve_stream(f), solve_stream(g)
    G = extend(eta, extension)
    s = _Sampled(grid)
    hs = _velocity(h_sol)
    d = ((1, 0), (0, 1))  # d/dx_alpha for alpha = x, t
    dG = [s("G", G, *d[a]) for a in range(2)]
    dGt = [s("G", G, d[a][0], d[a][1] + 1) for a in range(2)]
    dGx = [s("G", G, d[a][0] + 1, d[a][1]) for a in range(2)]
    h = [s(("h", a), hs[a]) for a in range(2)]
    ht = [s(("h", a), hs[a], 0, 1) for a in range(2)]
    hx = [s(("h", a), hs[a], 1, 0) for a in range(2)]
    q, qt, qx = s("q", u_sol.q), s("q", u_sol.q, 0, 1), s("q", u_sol.q, 1, 0)

    lhs = grid.integrate(q * sum(dG[a] * h[a] for a in range(2)))
    raw = [
        ("-t d2eta/dx_a dt h^a q", -1.0, 1, sum(dGt[a] * h[a] for a in range(2)) * q),
        ("-t deta/dx_a dh^a/dt q", -1.0, 1, sum(dG[a] * ht[a] for a in range(2)) * q),
        ("t^2/2 d2eta/dx_a dt dq/dt h^a", 0.5, 2, sum(dGt[a] * h[a] for a in range(2)) * qt),
        ("t^2/2 deta/dx_a dq/dt dh^a/dt", 0.5, 2, sum(dG[a] * ht[a] for a in range(2)) * qt),
        ("t^2/2 d2eta/dx_a dx dq/dx h^a", 0.5, 2, sum(dGx[a] * h[a] for a in range(2)) * qx),
        ("t^2/2 deta/dx_a dq/dx dh^a/dx", 0.5, 2, sum(dG[a] * hx[a] for a in range(2)) * qx),
    ]
    terms = tuple((name, c * grid.integrate(v, p)) for name, c, p, v in raw)
    literal = IdentityReport(
        "pressure-literal", lhs, terms[:4] + tuple((n, -v) for n, v in terms[4:])
    )
    meta = _metadata(
        grid, extension=extension, literal_relative_residual=literal.relative_residual
    )
    return IdentityReport("pressure", lhs, terms, meta)


# -- Dahlberg identity -------------------------------------------------------------------------

class TestField:
    """A ``2 x 2`` field ``v[j][alpha]`` (``j`` = derivative direction) with
    closed-form first derivatives, sampled on a graded grid."""

    def sample(self, j: int, alpha: int, dx: int, dt: int, grid: GradedGrid) -> np.ndarray:
        raise NotImplementedError

    def components(self, grid: GradedGrid, dx: int = 0, dt: int = 0):
        return [[self.sample(j, a, dx, dt, grid) for a in range(2)] for j in range(2)]


class ZeroTestField(TestField):
    def sample(self, j, alpha, dx, dt, grid):
        return np.zeros((grid.size, grid.boundary.n))


@dataclass(frozen=True, eq=False)
class ProductTestField(TestField):
    """``v[j][alpha] = d_j G * w^alpha`` for an extension ``G`` and a solution ``w``."""

    extension: SpectralExtension
    solution: StreamSolution
    scale: float = 1.0

    def sample(self, j, alpha, dx, dt, grid):
        e = (1, 0) if j == 0 else (0, 1)
        w = _velocity(self.solution)[alpha]
        G = self.extension
        base = lambda a, b: evaluate(G.derivative(e[0] + a, e[1] + b), grid)
        wv = lambda a, b: evaluate(_derive(w, a, b), grid)
        out = base(dx, dt) * wv(0, 0)
        if dx or dt:
            out = out + base(0, 0) * wv(dx, dt)
        return self.scale * out


@dataclass(frozen=True)
class SmoothCutoff:
    """``chi = 1`` on ``[0, T1]``, ``0`` beyond ``T2``, C-infinity in between."""

    T1: float
    T2: float

    def __post_init__(self):
        if not 0 <= self.T1 < self.T2:
            raise ConfigurationError("need 0 <= T1 < T2")

    @staticmethod
    def _f(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    @staticmethod
    def _df(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos]) / s[pos] ** 2
        return out

    def __call__(self, t, order: int = 0):
        w = self.T2 - self.T1
        s = np.clip((np.asarray(t, dtype=float) - self.T1) / w, 0.0, 1.0)
        a, b = self._f(s), self._f(1 - s)
        if order == 0:
            return 1.0 - a / (a + b)
        if order == 1:
            da, db = self._df(s), -self._df(1 - s)
            return -(da * (a + b) - a * (da + db)) / (a + b) ** 2 / w
        raise ConfigurationError("only chi and chi' are available")


@dataclass(frozen=True, eq=False)
class SeparableTestField(TestField):
    """``v[j][alpha](x, t) = phi[2 j + alpha](x) chi(t)``."""

    phi: BoundaryField
    cutoff: SmoothCutoff

    def __post_init__(self):
        if self.phi.components != 4:
            raise ConfigurationError("separable test fields need four boundary components")

    def sample(self, j, alpha, dx, dt, grid):
        comp = self.phi.component(2 * j + alpha)
        spec = comp.spectrum[0] * (1j * grid.boundary.wavenumbers) ** dx
        row = synthesize_rows(grid.boundary, spec[None, :], grid.offset)[0]
        return np.outer(self.cutoff(grid.levels, dt), row)


def _require_decay(v: TestField, grid: GradedGrid):
    mags = np.sqrt(sum(c**2 for row in v.components(grid) for c in row))
    peak = mags.max()
    if peak > 0 and mags[-1].max() > 1e-3 * peak:
        raise ConfigurationError("test field does not decay in t; boundary terms at infinity survive")


def dahlberg_identity_check(g: BoundaryField, v: TestField, grid: GradedGrid | None = None) -> IdentityReport:
    """``iint grad h . v`` against the ``t``-weighted expansion, ``d = 2``."""
    grid = grid or GradedGrid(g.grid)
    _require_decay(v, grid)
    h_sol = solve_stream(g)
    s = _Sampled(grid)
    hs = _velocity(h_sol)
    hx = [s(("h", a), hs[a], 1, 0) for a in range(2)]
    ht = [s(("h", a), hs[a], 0, 1) for a in range(2)]
    pi = s("pi", h_sol.q)
    V = v.components(grid)
    Vx = v.components(grid, dx=1)
    Vt = v.components(grid, dt=1)

    lhs = grid.integrate(sum(hx[a] * V[0][a] + ht[a] * V[1][a] for a in range(2)))
    raw = [
        ("t dh^a/dt dv_1^a/dx", sum(ht[a] * Vx[0][a] for a in range(2))),
        ("-t dh^a/dx dv_1^a/dt", -sum(hx[a] * Vt[0][a] for a in range(2))),
        ("-t dh^a/dt dv_2^a/dt", -sum(ht[a] * Vt[1][a] for a in range(2))),
        ("-t dh^1/dx dv_2^1/dx", -hx[0] * Vx[1][0]),
        ("-t dh^1/dt dv_2^2/dx", -ht[0] * Vx[1][1]),
        ("t pi dv_2^1/dx", pi * Vx[1][0]),
    ]
    terms = tuple((name, grid.integrate(val, 1)) for name, val in raw)
    return IdentityReport("dahlberg", lhs, terms, _metadata(grid))


def bilinear_ratio(
    g: BoundaryField, v: TestField, grid: GradedGrid | None = None, aperture: float = 2.0
) -> float:
    """``|iint grad h . v|`` over the product of square-function factors.

    Denominator: ``((iint |grad h|^2 t)^1/2 + (iint |pi|^2 t)^1/2)
    * ((iint |grad v|^2 t)^1/2 + ||(v)*||_2)``.
    """
    grid = grid or GradedGrid(g.grid)
    report = dahlberg_identity_check(g, v, grid)
    h_sol = solve_stream(g)
    (a, b), (c, d) = h_sol.gradient()
    left = math.sqrt(weighted_volume_norm([a, b, c, d], 1, grid)) + math.sqrt(
        weighted_volume_norm(h_sol.q, 1, grid)
    )
    grads = [c for dd in ((1, 0), (0, 1)) for row in v.components(grid, *dd) for c in row]
    vals = [c for row in v.components(grid) for c in row]
    star = nontangential_max(vals, grid, aperture)
    right = math.sqrt(weighted_volume_norm(grads, 1, grid)) + math.sqrt(inner(star, star))
    den = left * right
    if den == 0.0:
        raise DegenerateRatioError("bilinear ratio denominator vanishes")
    return abs(report.lhs) / den


def q_eta_h_ratio(
    f: BoundaryField,
    g: BoundaryField,
    eta: BoundaryField,
    extension: str = "harmonic",
    grid: GradedGrid | None = None,
    aperture: float = 2.0,
) -> float:
    """``|iint q d_a eta h^a| / (||eta||_{C^{0,1}} ||u||_{L^2(bdry)} ||(h)*||_2)``."""
    grid = grid or GradedGrid(f.grid)
    lhs = pressure_identity_check(f, g, eta, extension, grid).lhs
    h_sol = solve_stream(g)
    star = nontangential_max([h_sol.u1, h_sol.u2], grid, aperture)
    den = lipschitz_norm(eta) * lp_norm(f) * lp_norm(star)
    if den == 0.0:
        raise DegenerateRatioError("ratio denominator vanishes")
    return abs(lhs) / den
