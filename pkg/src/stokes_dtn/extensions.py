"""Extensions of a boundary function into the half-plane.

Each extension is ``Ghat(k, t) = ghat(k) m_k(t)`` for a height profile
``m_k``; derivatives act as ``(i kappa)^a`` in ``x`` and as derivatives of
the profile in ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .spectral import BoundaryField, BumpSpec, bump_multiplier_table, standard_bump
from .stokes import synthesize_rows

EXTENSION_KINDS = ("harmonic", "mollifier", "constant")


@dataclass(frozen=True, eq=False)
class SpectralExtension:
    boundary: BoundaryField
    kind: str = "harmonic"
    bump: BumpSpec | None = None
    order_x: int = 0
    order_t: int = 0

    def __post_init__(self):
        if self.kind not in EXTENSION_KINDS:
            raise ConfigurationError(f"unknown extension kind {self.kind!r}")
        if self.boundary.components != 1:
            raise ConfigurationError("extensions act on scalar fields")
        if self.kind == "mollifier":
            bump = self.bump or standard_bump()
            bump.validate()
            object.__setattr__(self, "bump", bump)

    @property
    def grid(self):
        return self.boundary.grid

    def derivative(self, dx: int = 0, dt: int = 0) -> "SpectralExtension":
        return SpectralExtension(
            self.boundary, self.kind, self.bump, self.order_x + dx, self.order_t + dt
        )

    def dx(self):
        return self.derivative(dx=1)

    def dy(self):
        return self.derivative(dt=1)

    def profile(self, heights) -> np.ndarray:
        """``d^j/dt^j m_k(t)`` for ``j = order_t``, shape ``(len(heights), n)``."""
        y = np.atleast_1d(np.asarray(heights, dtype=float))
        if np.any(y < 0):
            raise ConfigurationError("extension heights must be non-negative")
        a = np.abs(self.grid.wavenumbers)
        j = self.order_t
        if self.kind == "harmonic":
            return (-a[None, :]) ** j * np.exp(-np.outer(y, a))
        if self.kind == "constant":
            return np.full((y.size, a.size), 1.0 if j == 0 else 0.0)
        return bump_multiplier_table(self.bump, self.grid.wavenumbers, y, j)

    def spectra(self, heights) -> np.ndarray:
        kx = (1j * self.grid.wavenumbers) ** self.order_x
        return self.profile(heights) * (self.boundary.spectrum[0] * kx)[None, :]

    def on_grid(self, heights, shift: float = 0.0) -> np.ndarray:
        return synthesize_rows(self.grid, self.spectra(heights), shift)

    def slice(self, t: float) -> BoundaryField:
        return BoundaryField(self.grid, self.on_grid([t]))

    def __call__(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        keep = np.arange(self.grid.n) != self.grid.nyquist
        levels, inverse = np.unique(y.ravel(), return_inverse=True)
        spec = self.spectra(levels)[:, keep][inverse]
        phase = np.exp(1j * np.outer(x.ravel(), self.grid.wavenumbers[keep]))
        return np.einsum("pk,pk->p", spec, phase).real.reshape(x.shape)


def extend(eta: BoundaryField, kind: str = "harmonic", bump: BumpSpec | None = None) -> SpectralExtension:
    return SpectralExtension(eta, kind, bump)
