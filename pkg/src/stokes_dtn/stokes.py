"""Closed-form Stokes flow in the periodic half-plane ``{y > 0}``.

Each Fourier mode of a field is stored as ``p_k(y) exp(-r_k y)`` with a
polynomial ``p_k`` and decay rate ``r_k`` (normally ``|kappa_k|``).  Every
quantity the solver produces (stream function, velocity, pressure and all
their derivatives) stays in this class, so derivatives, residuals and
square integrals are exact coefficient algebra.

The boundary ``y = 0`` has outward normal ``n = (0, -1)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import factorial
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError
from .spectral import (
    BoundaryField,
    BoundaryGrid,
    FourierMultiplier,
    apply_multiplier,
    from_spectrum,
    inner,
)


@dataclass(frozen=True, eq=False)
class ModalField:
    """Real field on the half-strip with modes ``sum_m coeffs[m, k] y^m exp(-rates[k] y)``."""

    grid: BoundaryGrid
    coeffs: np.ndarray
    rates: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if c.shape[1] != self.grid.n:
            raise ConfigurationError("coefficient array does not match the grid")
        object.__setattr__(self, "coeffs", c)
        r = np.abs(self.grid.wavenumbers) if self.rates is None else np.asarray(self.rates, float)
        object.__setattr__(self, "rates", r)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def _new(self, coeffs) -> "ModalField":
        return ModalField(self.grid, coeffs, self.rates)

    def dy(self) -> "ModalField":
        c = self.coeffs
        out = np.zeros_like(c)
        out[:-1] = np.arange(1, c.shape[0])[:, None] * c[1:]
        return self._new(out - self.rates[None, :] * c)

    def dx(self) -> "ModalField":
        return self._new(1j * self.grid.wavenumbers[None, :] * self.coeffs)

    def __add__(self, other: "ModalField") -> "ModalField":
        if other.grid != self.grid or not np.array_equal(other.rates, self.rates):
            raise ConfigurationError("modal fields with different grids or rates")
        deg = max(self.degree, other.degree) + 1
        c = np.zeros((deg, self.grid.n), dtype=complex)
        c[: self.coeffs.shape[0]] += self.coeffs
        c[: other.coeffs.shape[0]] += other.coeffs
        return self._new(c)

    def __neg__(self):
        return self._new(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scale):
        return self._new(self.coeffs * scale)

    __rmul__ = __mul__

    def spectra(self, heights) -> np.ndarray:
        """Spectra at each height, shape ``(len(heights), n)``."""
        y = np.atleast_1d(np.asarray(heights, dtype=float))
        powers = y[:, None] ** np.arange(self.coeffs.shape[0])[None, :]
        return (powers @ self.coeffs) * np.exp(-np.outer(y, self.rates))

    def on_grid(self, heights, shift: float = 0.0) -> np.ndarray:
        """Real samples on ``grid.x + shift`` at each height, shape ``(len(heights), n)``."""
        spec = self.spectra(heights)
        return synthesize_rows(self.grid, spec, shift)

    def slice(self, y: float) -> BoundaryField:
        if y < 0:
            raise ConfigurationError(f"height must be non-negative, got {y}")
        # Hermitian by construction; the real part drops round-off only
        return BoundaryField(self.grid, self.on_grid([y]))

    def __call__(self, x, y) -> np.ndarray:
        """Pointwise values at arbitrary (broadcastable) ``x, y``."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        keep = np.arange(self.grid.n) != self.grid.nyquist
        kappa = self.grid.wavenumbers[keep]
        flat_x, flat_y = x.ravel(), y.ravel()
        out = np.empty(flat_x.shape)
        for start in range(0, flat_x.size, 2048):
            sl = slice(start, start + 2048)
            spec = self.spectra(flat_y[sl])[:, keep]
            out[sl] = np.einsum("pk,pk->p", spec, np.exp(1j * np.outer(flat_x[sl], kappa))).real
        return out.reshape(x.shape)

    def square_integral(self, power: int = 0) -> float:
        """Exact ``int_0^inf int_0^L |field|^2 y^power dx dy``.

        Uses ``int_0^inf y^m exp(-2 r y) dy = m! / (2 r)^(m+1)`` per mode.
        Modes with zero rate must vanish identically.
        """
        keep = np.arange(self.grid.n) != self.grid.nyquist
        c = self.coeffs[:, keep]
        r = self.rates[keep]
        flat = r == 0.0
        if np.any(np.abs(c[:, flat]) > 0):
            raise ConfigurationError("non-decaying mode has infinite square integral")
        c, r = c[:, ~flat], r[~flat]
        deg = c.shape[0] - 1
        total = np.zeros(r.shape)
        for a in range(deg + 1):
            for b in range(deg + 1):
                m = a + b + power
                total += (np.conj(c[a]) * c[b]).real * factorial(m) / (2 * r) ** (m + 1)
        return float(self.grid.L * total.sum())


def stack_square_integral(fields, power: int = 0) -> float:
    return sum(f.square_integral(power) for f in fields)


def synthesize_rows(grid: BoundaryGrid, spec: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """Real samples of each spectrum row on ``grid.x + shift`` (Nyquist dropped)."""
    spec = np.array(spec, dtype=complex)
    spec[..., grid.nyquist] = 0.0
    if shift:
        spec *= np.exp(1j * grid.wavenumbers * shift)
    return np.fft.ifft(spec * grid.n, axis=-1).real


# -- solver ------------------------------------------------------------------------------------

class FieldSlices(NamedTuple):
    u1: BoundaryField
    u2: BoundaryField
    q: BoundaryField
    psi: BoundaryField


@dataclass(frozen=True, eq=False)
class StreamSolution:
    """Stream function ``psihat = (A + B y) exp(-|kappa| y)`` per mode.

    The pressure trace is stored separately (computed from the boundary data),
    so a corrupted ``B`` shows up as a Stokes residual.
    """

    grid: BoundaryGrid
    A: np.ndarray
    B: np.ndarray
    pressure_trace: np.ndarray
    mean_velocity: tuple[float, float]

    @functools.cached_property
    def psi(self) -> ModalField:
        return ModalField(self.grid, np.array([self.A, self.B]))

    def _with_mean(self, field: ModalField, value: float) -> ModalField:
        c = field.coeffs.copy()
        c[0, 0] = value
        return ModalField(self.grid, c)

    @functools.cached_property
    def u1(self) -> ModalField:
        return self._with_mean(-self.psi.dy(), self.mean_velocity[0])

    @functools.cached_property
    def u2(self) -> ModalField:
        return self._with_mean(self.psi.dx(), self.mean_velocity[1])

    @functools.cached_property
    def q(self) -> ModalField:
        return ModalField(self.grid, self.pressure_trace[None, :])

    @property
    def velocity(self) -> tuple[ModalField, ModalField]:
        return self.u1, self.u2

    def gradient(self) -> tuple[tuple[ModalField, ModalField], tuple[ModalField, ModalField]]:
        """``((du1/dx, du1/dy), (du2/dx, du2/dy))``."""
        return (self.u1.dx(), self.u1.dy()), (self.u2.dx(), self.u2.dy())

    def biharmonic_residual(self) -> float:
        """Relative size of ``(d_y^2 - kappa^2)^2 psihat`` (identically zero)."""
        k2 = self.grid.wavenumbers**2
        op = lambda f: f.dy().dy() - ModalField(self.grid, f.coeffs * k2[None, :])
        res = op(op(self.psi))
        scale = np.abs(self.psi.coeffs).max(initial=0.0) * max(k2.max(), 1.0) ** 2
        return float(np.abs(res.coeffs).max() / scale) if scale > 0 else 0.0

    def corrupted(self, factor: float) -> "StreamSolution":
        return StreamSolution(self.grid, self.A, self.B * factor, self.pressure_trace, self.mean_velocity)


def solve_stream(f: BoundaryField) -> StreamSolution:
    """Solve the Stokes Dirichlet problem with boundary velocity ``f``.

    Constant data is carried separately as a uniform flow with zero pressure.
    The Nyquist mode of ``f`` is discarded.
    """
    if f.components != 2:
        raise ConfigurationError("Stokes data needs two velocity components")
    grid = f.grid
    F = np.array(f.spectrum)
    F[:, grid.nyquist] = 0.0
    kappa = grid.wavenumbers
    nz = kappa != 0.0
    A = np.zeros(grid.n, dtype=complex)
    A[nz] = F[1, nz] / (1j * kappa[nz])
    B = np.abs(kappa) * A - F[0]
    B[~nz] = 0.0
    trace = 2 * np.abs(kappa) * F[1] - 2j * kappa * F[0]
    mean = (float(F[0, 0].real), float(F[1, 0].real))
    return StreamSolution(grid, A, B, trace, mean)


def eval_fields(sol: StreamSolution, y: float) -> FieldSlices:
    if y < 0:
        raise ConfigurationError(f"height must be non-negative, got {y}")
    return FieldSlices(sol.u1.slice(y), sol.u2.slice(y), sol.q.slice(y), sol.psi.slice(y))


@dataclass(frozen=True)
class InteriorField:
    heights: tuple[float, ...]
    slices: tuple[FieldSlices, ...]

    def velocity_norms(self) -> np.ndarray:
        return np.array(
            [np.sqrt(inner(s.u1, s.u1) + inner(s.u2, s.u2)) for s in self.slices]
        )


def interior_field(sol: StreamSolution, heights) -> InteriorField:
    hs = tuple(float(y) for y in heights)
    return InteriorField(hs, tuple(eval_fields(sol, y) for y in hs))


# -- Dirichlet-to-Neumann map ------------------------------------------------------------------

def _symbol(kappa: np.ndarray, paper_literal: bool = False) -> np.ndarray:
    kappa = np.asarray(kappa, dtype=float)
    a = np.abs(kappa)
    m = np.empty(kappa.shape + (2, 2), dtype=complex)
    if paper_literal:
        # the printed combination of the appendix displays
        m[..., 0, 0] = -2 * a - 2j * kappa
        m[..., 0, 1] = 2 * a - 1j * kappa
        m[..., 1, 0] = -1j * kappa
        m[..., 1, 1] = 0.0
    else:
        m[..., 0, 0] = 2 * a
        m[..., 0, 1] = 1j * kappa
        m[..., 1, 0] = -1j * kappa
        m[..., 1, 1] = 2 * a
    return m


def dtn_symbol(k: int, L: float = 2 * np.pi, paper_literal: bool = False) -> np.ndarray:
    """2x2 matrix sending ``fhat(k)`` to ``Lambda(f)^(k)`` for integer mode ``k``."""
    return _symbol(np.array(2 * np.pi * k / L), paper_literal)


def dtn_multiplier(paper_literal: bool = False) -> FourierMultiplier:
    name = "dtn-paper-literal" if paper_literal else "dtn"
    return FourierMultiplier(lambda k: _symbol(k, paper_literal), 2, name)


def apply_dtn(f: BoundaryField, paper_literal: bool = False) -> BoundaryField:
    return apply_multiplier(dtn_multiplier(paper_literal), f)


def conormal_derivative(sol: StreamSolution) -> BoundaryField:
    """``-du/dy - n q`` at ``y = 0`` assembled from the interior solution."""
    du1 = sol.u1.dy().spectra([0.0])[0]
    du2 = sol.u2.dy().spectra([0.0])[0]
    q0 = sol.q.spectra([0.0])[0]
    spec = np.array([-du1, -du2 + q0])
    spec[:, sol.grid.nyquist] = 0.0
    return from_spectrum(sol.grid, spec)


def dtn_energy_check(f: BoundaryField) -> tuple[float, float]:
    """``(int Lambda(f) . f dx, iint |grad u|^2)``, the second in closed form."""
    pairing = inner(apply_dtn(f), f)
    sol = solve_stream(f)
    (a, b), (c, d) = sol.gradient()
    return pairing, stack_square_integral([a, b, c, d])


# -- residuals ---------------------------------------------------------------------------------

class StokesResidual(NamedTuple):
    momentum: float
    divergence: float


def residual_stokes(sol: StreamSolution, points) -> StokesResidual:
    """Relative max residuals of ``Laplace u - grad q`` and ``div u`` at points ``(x, y)``.

    Each residual is divided by the largest magnitude of the terms it
    balances, so an exact solution returns round-off.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    if np.any(y <= 0):
        raise ConfigurationError("residual sample points must lie strictly inside the half-plane")
    lap = lambda f: f.dx().dx() + f.dy().dy()
    terms = [
        (lap(sol.u1), sol.q.dx()),
        (lap(sol.u2), sol.q.dy()),
    ]
    mom_res, mom_scale = 0.0, 0.0
    for lhs, rhs in terms:
        a, b = lhs(x, y), rhs(x, y)
        mom_res = max(mom_res, np.abs(a - b).max())
        mom_scale = max(mom_scale, np.abs(a).max(), np.abs(b).max())
    d1, d2 = sol.u1.dx()(x, y), sol.u2.dy()(x, y)
    div_res = np.abs(d1 + d2).max()
    div_scale = max(np.abs(d1).max(), np.abs(d2).max())
    rel = lambda r, s: float(r / s) if s > 0 else float(r)
    return StokesResidual(rel(mom_res, mom_scale), rel(div_res, div_scale))
