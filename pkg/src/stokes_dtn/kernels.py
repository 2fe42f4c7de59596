"""Stokes fundamental solution, the double-layer kernel and the pressure
field ``W_k`` built from a surface density."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, SingularityError


def sphere_area(d: int) -> float:
    """Surface area ``omega_d`` of the unit sphere in ``R^d``."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def _points(x, d: int | None = None) -> tuple[np.ndarray, int]:
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]
    if d is not None and d != dim:
        raise ConfigurationError(f"point has dimension {dim}, expected {d}")
    if dim < 3:
        raise ConfigurationError("the Stokeslet is implemented for d >= 3")
    if np.any(np.linalg.norm(x, axis=-1) == 0.0):
        raise SingularityError("kernel evaluated at the origin")
    return x, dim


class Stokeslet(NamedTuple):
    gamma: np.ndarray  # [..., i, j]
    pi: np.ndarray  # [..., i]


def fundamental_solution(x, d: int | None = None) -> Stokeslet:
    """``Gamma_ij = (delta_ij / ((d-2) r^(d-2)) + x_i x_j / r^d) / (2 omega_d)``
    and ``Pi^i = x_i / (omega_d r^d)``."""
    x, d = _points(x, d)
    w = sphere_area(d)
    r = np.linalg.norm(x, axis=-1)[..., None, None]
    eye = np.eye(d)
    gamma = (eye / ((d - 2) * r ** (d - 2)) + x[..., :, None] * x[..., None, :] / r**d) / (2 * w)
    pi = x / (w * r[..., 0] ** d)
    return Stokeslet(gamma, pi)


def stokeslet_gradient(x, d: int | None = None) -> np.ndarray:
    """``d Gamma_ij / d x_k`` with shape ``[..., i, j, k]``."""
    x, d = _points(x, d)
    w = sphere_area(d)
    r = np.linalg.norm(x, axis=-1)[..., None, None, None]
    eye = np.eye(d)
    xi = x[..., :, None, None]
    xj = x[..., None, :, None]
    xk = x[..., None, None, :]
    terms = (
        -eye[:, :, None] * xk
        + eye[:, None, :] * xj
        + eye[None, :, :] * xi
    ) / r**d - d * xi * xj * xk / r ** (d + 2)
    return terms / (2 * w)


class KernelResidual(NamedTuple):
    momentum: float
    divergence: float


def kernel_residual(x, h: float, d: int | None = None) -> KernelResidual:
    """Central-difference residuals of ``Laplace Gamma_.j - grad Pi^j`` and
    ``div Gamma_.j`` at ``x``, maximised over ``i, j``."""
    x, d = _points(x, d)
    if np.linalg.norm(x) < 10 * h:
        raise SingularityError("stencil too close to the origin; need |x| >= 10 h")
    eye = np.eye(d)
    g0 = fundamental_solution(x).gamma
    lap = np.zeros((d, d))
    grad_pi = np.zeros((d, d))  # [i, j] = d_i Pi^j
    div = np.zeros(d)
    for k in range(d):
        plus, minus = fundamental_solution(x + h * eye[k]), fundamental_solution(x - h * eye[k])
        lap += (plus.gamma - 2 * g0 + minus.gamma) / h**2
        grad_pi[k] = (plus.pi - minus.pi) / (2 * h)
        div += (plus.gamma[k] - minus.gamma[k]) / (2 * h)
    return KernelResidual(float(np.abs(lap - grad_pi).max()), float(np.abs(div).max()))


def residual_order(x, h: float, d: int | None = None) -> float:
    """Observed order ``log2(res(h) / res(h/2))`` of the momentum residual."""
    a = kernel_residual(x, h, d).momentum
    b = kernel_residual(x, h / 2, d).momentum
    return math.log2(a / b)


def double_layer_kernel(x, y, n) -> np.ndarray:
    """``d/dy_k {Gamma_ij(x - y)} n_k(y) - Pi^i(x - y) n_j(y)``."""
    x, y, n = (np.asarray(a, dtype=float) for a in (x, y, n))
    r = x - y
    if np.any(np.linalg.norm(r, axis=-1) == 0.0):
        raise SingularityError("double-layer kernel at coincident points")
    grad = stokeslet_gradient(r)
    pi = fundamental_solution(r).pi
    return -np.einsum("...ijk,...k->...ij", grad, n) - pi[..., :, None] * n[..., None, :]


# -- surface meshes ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Panels of a closed surface: centroids, areas and unit outward normals."""

    centroids: np.ndarray
    areas: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        c, a, n = (np.asarray(v, dtype=float) for v in (self.centroids, self.areas, self.normals))
        if c.ndim != 2 or n.shape != c.shape or a.shape != (c.shape[0],):
            raise ConfigurationError("mesh arrays have inconsistent shapes")
        object.__setattr__(self, "centroids", c)
        object.__setattr__(self, "areas", a)
        object.__setattr__(self, "normals", n)

    @property
    def size(self) -> int:
        return self.areas.size

    @property
    def dimension(self) -> int:
        return self.centroids.shape[1]

    @property
    def spacing(self) -> float:
        return float(np.sqrt(self.areas.max()))


def sphere_mesh(n_theta: int = 16, radius: float = 1.0) -> SurfaceMesh:
    """Latitude-longitude panels with exact spherical areas; ``2 n_theta`` longitudes."""
    n_phi = 2 * n_theta
    th = np.linspace(0.0, math.pi, n_theta + 1)
    ph = np.linspace(0.0, 2 * math.pi, n_phi + 1)
    tc, pc = 0.5 * (th[1:] + th[:-1]), 0.5 * (ph[1:] + ph[:-1])
    T, P = np.meshgrid(tc, pc, indexing="ij")
    normals = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], -1).reshape(-1, 3)
    band = (np.cos(th[:-1]) - np.cos(th[1:])) * (2 * math.pi / n_phi)
    areas = np.repeat(band, n_phi) * radius**2
    return SurfaceMesh(radius * normals, areas, normals)


def write_mesh(mesh: SurfaceMesh, path) -> None:
    """One panel per line: ``cx cy cz area nx ny nz``."""
    rows = np.column_stack([mesh.centroids, mesh.areas, mesh.normals])
    np.savetxt(path, rows, fmt="%.17g", header="cx cy cz area nx ny nz")


def read_mesh(path) -> SurfaceMesh:
    rows = np.loadtxt(Path(path), ndmin=2)
    if rows.shape[1] % 2 != 1:
        raise ConfigurationError("mesh rows must be centroid, area, normal")
    d = rows.shape[1] // 2
    return SurfaceMesh(rows[:, :d], rows[:, d], rows[:, d + 1 :])


# -- W_k field ---------------------------------------------------------------------------------

class WField(NamedTuple):
    W: np.ndarray  # [..., k]
    q: np.ndarray  # q~ = -sum_k dW_k/dx_k


def _offsets(mesh: SurfaceMesh, x: np.ndarray) -> np.ndarray:
    r = x[..., None, :] - mesh.centroids
    dist = np.linalg.norm(r, axis=-1)
    if np.any(dist < mesh.spacing):
        raise SingularityError("evaluation point too close to the surface for panel quadrature")
    return r


def w_field(mesh: SurfaceMesh, density, x) -> WField:
    """``W_k(x) = sum_panels (x_j - y_j) / (omega_d |x-y|^d) n_k phi_j A``.

    ``density`` has shape ``(panels, d)``.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(density, dtype=float)
    d = mesh.dimension
    if phi.shape != (mesh.size, d):
        raise ConfigurationError("density must have one d-vector per panel")
    r = _offsets(mesh, x)
    dist = np.linalg.norm(r, axis=-1)
    w = sphere_area(d)
    weight = mesh.areas / w
    rphi = np.einsum("...pj,pj->...p", r, phi)
    W = np.einsum("...p,pk->...k", rphi / dist**d * weight, mesh.normals)
    # d/dx_k [r_j / r^d] = delta_jk / r^d - d r_j r_k / r^(d+2)
    nphi = np.einsum("pk,pk->p", mesh.normals, phi)
    rn = np.einsum("...pk,pk->...p", r, mesh.normals)
    div = (nphi / dist**d - d * rphi * rn / dist ** (d + 2)) * weight
    return WField(W, -div.sum(axis=-1))


def w_laplacian_residual(mesh: SurfaceMesh, density, x, h: float) -> float:
    """Max over ``k`` of the central-difference Laplacian of ``W_k`` at ``x``."""
    x = np.asarray(x, dtype=float)
    d = mesh.dimension
    eye = np.eye(d)
    center = w_field(mesh, density, x).W
    lap = np.zeros_like(center)
    for k in range(d):
        lap += w_field(mesh, density, x + h * eye[k]).W - 2 * center + w_field(mesh, density, x - h * eye[k]).W
    return float(np.abs(lap / h**2).max())


def decay_exponent(mesh: SurfaceMesh, density, direction, radii=(10.0, 20.0)) -> float:
    """``-log(|W(r2 e)| / |W(r1 e)|) / log(r2 / r1)`` along a direction."""
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    a, b = (np.linalg.norm(w_field(mesh, density, r * e).W) for r in radii)
    return -math.log(b / a) / math.log(radii[1] / radii[0])
