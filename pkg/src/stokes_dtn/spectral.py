"""Periodic boundary grids, Fourier multipliers and extensions into the half-plane.

The boundary line is modelled by a torus of period ``L``.  Fourier
coefficients are normalised so that

    g(x_j) = sum_k ghat(k) exp(i kappa_k x_j),   kappa_k = 2 pi k / L,

i.e. ``ghat = fft(g) / n``.  Spectra are stored in numpy FFT order.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DealiasingError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class BoundaryGrid:
    n: int
    L: float = TWO_PI

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 8 or self.n & (self.n - 1):
            raise ConfigurationError(f"n must be a power of two >= 8, got {self.n!r}")
        if not self.L > 0:
            raise ConfigurationError(f"L must be positive, got {self.L!r}")

    @property
    def h(self) -> float:
        return self.L / self.n

    @functools.cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    @functools.cached_property
    def modes(self) -> np.ndarray:
        """Integer mode indices in FFT order (Nyquist appears as -n/2)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)

    @functools.cached_property
    def wavenumbers(self) -> np.ndarray:
        return TWO_PI * self.modes / self.L

    @property
    def nyquist(self) -> int:
        return self.n // 2

    def refined(self, factor: int = 2) -> "BoundaryGrid":
        return BoundaryGrid(self.n * factor, self.L)


@dataclass(frozen=True, eq=False)
class BoundaryField:
    """Real samples of a scalar or vector field on a :class:`BoundaryGrid`.

    ``values`` has shape ``(components, n)``; a 1-d array is promoted to a
    single component.  The array is copied and made read-only.
    """

    grid: BoundaryGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] != self.grid.n:
            raise ConfigurationError(
                f"samples of shape {np.shape(self.values)} do not match grid with n={self.grid.n}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: BoundaryGrid, *funcs: Callable[[np.ndarray], np.ndarray]):
        return cls(grid, np.array([np.broadcast_to(fn(grid.x), grid.x.shape) for fn in funcs]))

    @property
    def components(self) -> int:
        return self.values.shape[0]

    @property
    def scalar(self) -> np.ndarray:
        if self.components != 1:
            raise ConfigurationError("expected a scalar field")
        return self.values[0]

    def component(self, i: int) -> "BoundaryField":
        return BoundaryField(self.grid, self.values[i])

    @functools.cached_property
    def spectrum(self) -> np.ndarray:
        spec = np.fft.fft(self.values, axis=-1) / self.grid.n
        spec.setflags(write=False)
        return spec

    def __add__(self, other):
        if isinstance(other, BoundaryField):
            _check_same_grid(self, other)
            return BoundaryField(self.grid, self.values + other.values)
        return BoundaryField(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, BoundaryField):
            _check_same_grid(self, other)
            return BoundaryField(self.grid, self.values - other.values)
        return BoundaryField(self.grid, self.values - other)

    def __neg__(self):
        return BoundaryField(self.grid, -self.values)

    def __mul__(self, scale):
        if isinstance(scale, BoundaryField):
            return product(self, scale)
        return BoundaryField(self.grid, self.values * scale)

    __rmul__ = __mul__

    def __repr__(self):
        return f"BoundaryField(n={self.grid.n}, L={self.grid.L:g}, components={self.components})"


def _check_same_grid(a: BoundaryField, b: BoundaryField):
    if a.grid != b.grid:
        raise ConfigurationError("fields live on different grids")


def to_spectrum(g: BoundaryField) -> np.ndarray:
    """Fourier coefficients of ``g``, shape ``(components, n)`` in FFT order."""
    return g.spectrum


def synthesize(grid: BoundaryGrid, spectrum: np.ndarray) -> np.ndarray:
    """Complex samples for a spectrum, without any reality check."""
    return np.fft.ifft(np.asarray(spectrum) * grid.n, axis=-1)


def from_spectrum(grid: BoundaryGrid, spectrum: np.ndarray, rtol: float = 1e-9) -> BoundaryField:
    """Real field with the given spectrum.

    Raises if the synthesis has an imaginary part larger than ``rtol`` times
    the l1 norm of the spectrum, which means the spectrum was not Hermitian.
    """
    samples = synthesize(grid, spectrum)
    scale = max(np.abs(spectrum).sum(axis=-1).max(initial=0.0), np.finfo(float).tiny)
    if np.abs(samples.imag).max(initial=0.0) > rtol * scale:
        raise ConfigurationError("spectrum is not Hermitian; synthesis is complex")
    return BoundaryField(grid, samples.real)


@dataclass(frozen=True)
class FourierMultiplier:
    """Map from wavenumber to a ``dim x dim`` complex matrix.

    ``symbol`` takes an array of wavenumbers ``kappa`` (shape ``(m,)``) and
    returns an array of shape ``(m, dim, dim)``; scalar multipliers may
    return shape ``(m,)``.
    """

    symbol: Callable[[np.ndarray], np.ndarray]
    dim: int = 1
    name: str = ""

    def matrices(self, kappa: np.ndarray) -> np.ndarray:
        kappa = np.asarray(kappa, dtype=float)
        m = np.asarray(self.symbol(kappa), dtype=complex)
        if m.shape == kappa.shape and self.dim == 1:
            m = m[:, None, None]
        if m.shape != kappa.shape + (self.dim, self.dim):
            raise ConfigurationError(f"symbol returned shape {m.shape}")
        return m

    def reality_defect(self, grid: BoundaryGrid) -> float:
        """max |M(-k) - conj(M(k))| over non-Nyquist modes."""
        k = grid.wavenumbers[1 : grid.nyquist]
        plus, minus = self.matrices(k), self.matrices(-k)
        return float(np.abs(minus - np.conj(plus)).max(initial=0.0))

    def compose(self, other: "FourierMultiplier") -> "FourierMultiplier":
        if self.dim != other.dim:
            raise ConfigurationError("multiplier dimensions differ")
        return FourierMultiplier(
            lambda k: self.matrices(k) @ other.matrices(k), self.dim, f"{self.name}*{other.name}"
        )


def apply_multiplier(M: FourierMultiplier, g: BoundaryField) -> BoundaryField:
    if M.dim != g.components:
        raise ConfigurationError(
            f"multiplier of dimension {M.dim} applied to a {g.components}-component field"
        )
    mats = M.matrices(g.grid.wavenumbers)
    out = np.einsum("kij,jk->ik", mats, g.spectrum)
    out[:, g.grid.nyquist] = 0.0
    return from_spectrum(g.grid, out)


HILBERT = FourierMultiplier(lambda k: -1j * np.sign(k), 1, "hilbert")
DERIVATIVE = FourierMultiplier(lambda k: 1j * k, 1, "d/dx")
ABS_DERIVATIVE = FourierMultiplier(lambda k: np.abs(k).astype(complex), 1, "|d/dx|")


def hilbert_transform(g: BoundaryField) -> BoundaryField:
    return apply_multiplier(HILBERT, g)


def tangential_derivative(g: BoundaryField) -> BoundaryField:
    return apply_multiplier(DERIVATIVE, g)


def apply_scalar_symbol(g: BoundaryField, values: np.ndarray) -> BoundaryField:
    """Multiply every component's spectrum by the same per-mode ``values``."""
    spec = g.spectrum * np.asarray(values)[None, :]
    spec[:, g.grid.nyquist] = 0.0
    return from_spectrum(g.grid, spec)


def harmonic_extension_sample(g: BoundaryField, y: float) -> BoundaryField:
    """Bounded harmonic (Poisson) extension of ``g`` evaluated at height ``y``."""
    if y < 0:
        raise ConfigurationError(f"height must be non-negative, got {y}")
    return apply_scalar_symbol(g, np.exp(-np.abs(g.grid.wavenumbers) * y))


# -- mollifier ---------------------------------------------------------------------------------

def _standard_profile(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(1.0 / (s[inside] ** 2 - 1.0))
    return out


# Gauss-Legendre rules for the bump transform; the fine rule resolves cos(xi*s)
# up to xi ~ 1.5e3, beyond which the standard bump transform is below 1e-16.
_COARSE_NODES = 256
_FINE_NODES = 1200
_COARSE_XI = 120.0
XI_CUTOFF = 1500.0


@functools.lru_cache(maxsize=None)
def _legendre(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


@dataclass(frozen=True)
class BumpSpec:
    """Compactly supported bump ``zeta(s) = scale * profile(s)`` on ``[-1, 1]``."""

    profile: Callable[[np.ndarray], np.ndarray] = _standard_profile
    scale: float = 1.0
    name: str = "bump"

    def __call__(self, s):
        return self.scale * self.profile(np.asarray(s, dtype=float))

    def moment(self, power: int, absolute: bool = False) -> float:
        s, w = _legendre(_COARSE_NODES)
        weight = np.abs(s) ** power if absolute else s**power
        return float(np.sum(w * weight * self(s)))

    @property
    def mass(self) -> float:
        return self.moment(0)

    def derivative_moment(self) -> float:
        """int |s| |zeta'(s)| ds, via a centred difference of the profile."""
        s, w = _legendre(_COARSE_NODES)
        eps = 1e-6
        d = (self(s + eps) - self(s - eps)) / (2 * eps)
        return float(np.sum(w * np.abs(s) * np.abs(d)))

    def validate(self, tol: float = 1e-10):
        if abs(self.mass - 1.0) > tol:
            raise ConfigurationError(f"bump mass is {self.mass!r}, expected 1 within {tol}")
        if abs(self.moment(1)) > tol:
            raise ConfigurationError("bump is not symmetric (non-zero first moment)")

    def transform(self, xi: np.ndarray, order: int = 0) -> np.ndarray:
        """d^order/dxi^order of int zeta(s) exp(-i xi s) ds for real ``xi``.

        The bump is even, so the result is real; values with ``|xi|`` above
        the cutoff are set to zero.
        """
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape)
        flat_xi, flat_out = xi.ravel(), out.ravel()
        for nodes, lo, hi in ((_COARSE_NODES, -1.0, _COARSE_XI), (_FINE_NODES, _COARSE_XI, XI_CUTOFF)):
            sel = np.flatnonzero((np.abs(flat_xi) > lo) & (np.abs(flat_xi) <= hi))
            if sel.size == 0:
                continue
            s, w = _legendre(nodes)
            weights = w * self(s) * s**order
            # (-i s)^order exp(-i xi s), real part for the even bump
            phase = {0: np.cos, 1: np.sin, 2: np.cos, 3: np.sin}[order % 4]
            sign = {0: 1.0, 1: -1.0, 2: -1.0, 3: 1.0}[order % 4]
            for start in range(0, sel.size, 4096):
                chunk = sel[start : start + 4096]
                flat_out[chunk] = sign * (phase(np.outer(flat_xi[chunk], s)) @ weights)
        return out


@functools.lru_cache(maxsize=None)
def standard_bump() -> BumpSpec:
    """The C-infinity bump exp(1/(s^2-1)), normalised to unit mass."""
    raw = BumpSpec(_standard_profile, 1.0, "standard")
    s, w = _legendre(_FINE_NODES)
    mass = float(np.sum(w * raw(s)))
    return BumpSpec(_standard_profile, 1.0 / mass, "standard")


@functools.lru_cache(maxsize=64)
def _bump_table(bump: BumpSpec, kappa_bytes: bytes, heights_bytes: bytes, order: int) -> np.ndarray:
    kappa = np.frombuffer(kappa_bytes)
    heights = np.frombuffer(heights_bytes)
    uniq, inverse = np.unique(np.abs(kappa), return_inverse=True)
    table = bump.transform(uniq[None, :] * heights[:, None], order)[:, inverse]
    table.setflags(write=False)
    return table


def bump_multiplier_table(bump: BumpSpec, kappa: np.ndarray, heights: np.ndarray, order: int = 0):
    """``|kappa|^order * zetahat^(order)(|kappa| t)`` on a (heights x modes) table.

    This is ``d^order/dt^order`` of the symbol of ``zeta_t *`` and is cached
    per (bump, grid, heights).
    """
    kappa = np.ascontiguousarray(kappa, dtype=float)
    heights = np.ascontiguousarray(np.atleast_1d(heights), dtype=float)
    table = _bump_table(bump, kappa.tobytes(), heights.tobytes(), order)
    return table * np.abs(kappa)[None, :] ** order


def mollifier_extension_sample(
    g: BoundaryField, t: float, bump: BumpSpec | None = None, method: str = "spectral"
) -> BoundaryField:
    """Periodic convolution ``zeta_t * g`` with ``zeta_t(x) = zeta(x/t)/t``.

    ``method="spectral"`` convolves the trigonometric interpolant of the
    samples (exact for band-limited ``g``).  ``method="direct"`` integrates
    the piecewise-linear interpolant against the bump by Gauss-Legendre
    quadrature, which reproduces affine stretches of ``g`` exactly.
    """
    bump = standard_bump() if bump is None else bump
    bump.validate()
    if not t > 0:
        raise ConfigurationError(f"mollifier height must be positive, got {t}")
    grid = g.grid
    if method == "spectral":
        return apply_scalar_symbol(g, bump.transform(grid.wavenumbers * t))
    if method == "direct":
        s, w = _legendre(_COARSE_NODES)
        weights = w * bump(s)
        xq = grid.x[:, None] - t * s[None, :]
        xp = np.append(grid.x, grid.L)
        out = [
            np.interp(np.mod(xq, grid.L), xp, np.append(comp, comp[0])) @ weights
            for comp in g.values
        ]
        return BoundaryField(grid, np.array(out))
    raise ConfigurationError(f"unknown convolution method {method!r}")


# -- norms and products ------------------------------------------------------------------------

def lipschitz_norm(g: BoundaryField) -> float:
    """Discrete ``sup|g| + max |g_{j+1} - g_j| / h`` with periodic wrap."""
    v = g.scalar
    return float(np.abs(v).max() + np.abs(np.diff(v, append=v[0])).max() / g.grid.h)


def lp_norm(g: BoundaryField, p: float = 2.0) -> float:
    """Riemann-sum ``L^p`` norm of the pointwise Euclidean length."""
    mag = np.sqrt(np.sum(g.values**2, axis=0))
    if np.isinf(p):
        return float(mag.max())
    return float((g.grid.h * np.sum(mag**p)) ** (1.0 / p))


def inner(f: BoundaryField, g: BoundaryField) -> float:
    """``int f . g dx`` over one period (exact for band-limited products)."""
    _check_same_grid(f, g)
    return float(g.grid.h * np.sum(f.values * g.values))


def product(a: BoundaryField, b: BoundaryField) -> BoundaryField:
    """Pointwise product computed on a 2x zero-padded grid, then truncated.

    One factor must be scalar; the result has the other's component count.
    """
    _check_same_grid(a, b)
    if a.components != 1 and b.components != 1 and a.components != b.components:
        raise ConfigurationError("cannot multiply fields with incompatible components")
    grid = a.grid
    n, big = grid.n, 2 * grid.n

    def pad(spec):
        out = np.zeros(spec.shape[:-1] + (big,), dtype=complex)
        half = n // 2
        out[..., :half] = spec[..., :half]
        out[..., big - half + 1 :] = spec[..., half + 1 :]
        return np.fft.ifft(out * big, axis=-1).real

    prod = pad(a.spectrum) * pad(b.spectrum)
    spec_big = np.fft.fft(prod, axis=-1) / big
    spec = np.zeros(prod.shape[:-1] + (n,), dtype=complex)
    half = n // 2
    spec[..., :half] = spec_big[..., :half]
    spec[..., half + 1 :] = spec_big[..., big - half + 1 :]
    return from_spectrum(grid, spec)


def bandwidth(g: BoundaryField, rtol: float = 1e-12) -> int:
    """Largest ``|k|`` whose coefficient exceeds ``rtol`` times the largest one."""
    mag = np.abs(g.spectrum).max(axis=0)
    if mag.max() == 0.0:
        return 0
    active = np.abs(g.grid.modes[mag > rtol * mag.max()])
    return int(active.max())


def require_headroom(*fields: BoundaryField, limit: int | None = None):
    """Raise :class:`DealiasingError` if any field is wider than ``n/4``."""
    for g in fields:
        cap = g.grid.n // 4 if limit is None else limit
        bw = bandwidth(g)
        if bw > cap:
            raise DealiasingError(f"field bandwidth {bw} exceeds n/4 = {cap}")


# -- field factories ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrigPolynomial:
    """Real trigonometric polynomial defined independently of any grid.

    ``cos_coeffs[c, k]`` and ``sin_coeffs[c, k]`` multiply ``cos(kappa_k x)``
    and ``sin(kappa_k x)`` for component ``c`` and mode ``k = 0..K``.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    L: float = TWO_PI
    scale: float = 1.0

    @property
    def band_limit(self) -> int:
        return self.cos_coeffs.shape[1] - 1

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = TWO_PI * np.arange(self.cos_coeffs.shape[1]) / self.L
        arg = np.multiply.outer(x, k)
        out = np.cos(arg) @ self.cos_coeffs.T + np.sin(arg) @ self.sin_coeffs.T
        return self.scale * np.moveaxis(out, -1, 0)

    def sample(self, grid: BoundaryGrid) -> BoundaryField:
        if grid.L != self.L:
            raise ConfigurationError("polynomial period differs from grid period")
        return BoundaryField(grid, self(grid.x))

    def scaled(self, factor: float) -> "TrigPolynomial":
        return TrigPolynomial(self.cos_coeffs, self.sin_coeffs, self.L, self.scale * factor)


def random_trig_polynomial(
    rng: np.random.Generator,
    band_limit: int,
    components: int = 1,
    L: float = TWO_PI,
    include_mean: bool = True,
) -> TrigPolynomial:
    cos_c = rng.standard_normal((components, band_limit + 1))
    sin_c = rng.standard_normal((components, band_limit + 1))
    sin_c[:, 0] = 0.0
    if not include_mean:
        cos_c[:, 0] = 0.0
    return TrigPolynomial(cos_c, sin_c, L)


def pure_mode(grid: BoundaryGrid, k: int, components: int = 1, which: int = 0) -> BoundaryField:
    """``cos(kappa_k x)`` in component ``which`` and zeros elsewhere."""
    vals = np.zeros((components, grid.n))
    vals[which] = np.cos(TWO_PI * k * grid.x / grid.L)
    return BoundaryField(grid, vals)
