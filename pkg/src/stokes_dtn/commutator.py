"""Commutators of the DtN map with multiplication operators, the Calderon
commutator, and seeded estimate-ratio harnesses."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, DegenerateRatioError
from .spectral import (
    TWO_PI,
    BoundaryField,
    BoundaryGrid,
    hilbert_transform,
    lipschitz_norm,
    lp_norm,
    product,
    pure_mode,
    random_trig_polynomial,
    tangential_derivative,
)
from .stokes import _symbol, apply_dtn


def commutator_apply(eta: BoundaryField, f: BoundaryField, paper_literal: bool = False) -> BoundaryField:
    """``Lambda(eta f) - eta Lambda(f)`` with dealiased products."""
    if eta.components != 1 or f.components != 2:
        raise ConfigurationError("need scalar eta and two-component f")
    if _is_constant(eta):
        return BoundaryField(f.grid, np.zeros_like(f.values))
    return apply_dtn(product(eta, f), paper_literal) - product(eta, apply_dtn(f, paper_literal))


def _is_constant(eta: BoundaryField) -> bool:
    # constants commute with every multiplier; skip the round-off of two FFT products
    return bool(np.all(eta.values == eta.values.flat[0]))


def _hd(g: BoundaryField) -> BoundaryField:
    return hilbert_transform(tangential_derivative(g))


def dtn_hilbert_form(f: BoundaryField, paper_literal: bool = False) -> BoundaryField:
    """The DtN map written with the Hilbert transform and ``d/dx``.

    ``paper_literal`` reproduces the uncorrected printed combination, which
    differs from the DtN map.
    """
    f1, f2 = f.component(0), f.component(1)
    d1, d2 = tangential_derivative(f1), tangential_derivative(f2)
    if paper_literal:
        first = -2 * _hd(f1) - d2 + 2 * _hd(f2) - d1
        second = -d1
    else:
        first = 2 * _hd(f1) + d2
        second = -d1 + 2 * _hd(f2)
    return BoundaryField(f.grid, np.vstack([first.values, second.values]))


# -- Calderon commutator -----------------------------------------------------------------------

def _ratio(num: float, eta: BoundaryField, g: BoundaryField, p: float = 2.0) -> float:
    den = lipschitz_norm(eta) * lp_norm(g, p)
    if den == 0.0:
        raise DegenerateRatioError("ratio denominator vanishes")
    return num / den


def calderon_commutator(eta: BoundaryField, g: BoundaryField) -> tuple[BoundaryField, float]:
    """``H d(eta g) - eta H dg`` and its size relative to ``||eta||_{C^{0,1}} ||g||_2``."""
    if lp_norm(g) == 0.0:
        raise DegenerateRatioError("g has zero L^2 norm")
    if _is_constant(eta):
        return BoundaryField(g.grid, np.zeros_like(g.values)), 0.0
    out = _hd(product(eta, g)) - product(eta, _hd(g))
    return out, _ratio(lp_norm(out), eta, g)


def calderon_decomposition(eta: BoundaryField, g: BoundaryField) -> BoundaryField:
    """``H((d eta) g) + H((eta - eta(x)) dg)``, assembled term by term."""
    dg = tangential_derivative(g)
    first = hilbert_transform(product(tangential_derivative(eta), g))
    second = hilbert_transform(product(eta, dg)) - product(eta, hilbert_transform(dg))
    return first + second


def commutator_ratio(eta: BoundaryField, f: BoundaryField, p: float = 2.0, paper_literal=False) -> float:
    """``||[Lambda, eta] f||_p / (||eta||_{C^{0,1}} ||f||_p)``."""
    if not 1.0 < p < math.inf:
        raise ConfigurationError(f"need 1 < p < inf, got {p}")
    return _ratio(lp_norm(commutator_apply(eta, f, paper_literal), p), eta, f, p)


# -- dense oracle ------------------------------------------------------------------------------

def dense_commutator_matrix(eta: BoundaryField) -> np.ndarray:
    """Real ``2n x 2n`` matrix of ``f -> [Lambda, eta] f`` built from explicit matrices.

    Multiplication is a Fourier-space convolution matrix truncated to
    ``|k| < n/2``; the DtN map is a block of DFT-conjugated diagonals.
    """
    grid = eta.grid
    n = grid.n
    k = np.arange(-n // 2 + 1, n // 2)
    dft = np.exp(-2j * np.pi * np.outer(k, np.arange(n)) / n) / n  # samples -> modes k
    idft = np.exp(2j * np.pi * np.outer(np.arange(n), k) / n)  # modes k -> samples
    eta_hat = dft @ eta.scalar
    diff = k[:, None] - k[None, :]
    conv = np.where(np.abs(diff) < n // 2, eta_hat[np.clip(diff + n // 2 - 1, 0, len(k) - 1)], 0.0)
    mult = idft @ conv @ dft
    sym = _symbol(TWO_PI * k / grid.L)
    dtn = np.block([[idft @ np.diag(sym[:, a, b]) @ dft for b in range(2)] for a in range(2)])
    mult2 = np.kron(np.eye(2), mult)
    return (dtn @ mult2 - mult2 @ dtn).real


# -- sweeps ------------------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    seed: int = 42
    trials: int = 100
    band_limit: int = 32
    n: int = 256
    L: float = TWO_PI
    p: float = 2.0
    eta_scale: float = 1.0
    workers: int = 1

    def __post_init__(self):
        problems = []
        if self.trials < 1:
            problems.append("trials must be at least 1")
        if not 1.0 < self.p < math.inf:
            problems.append("need 1 < p < inf")
        if self.band_limit < 1:
            problems.append("band_limit must be at least 1")
        elif self.band_limit > self.n // 4:
            problems.append("band_limit must not exceed n/4")
        if self.workers < 1:
            problems.append("workers must be at least 1")
        if problems:
            raise ConfigurationError("; ".join(problems))
        BoundaryGrid(self.n, self.L)


class SweepTrial(NamedTuple):
    eta: BoundaryField
    f: BoundaryField


def sweep_trial(cfg: SweepConfig, trial: int) -> SweepTrial:
    """Normalized ``(eta, f)`` for one trial; depends on ``(seed, trial)`` only."""
    rng = np.random.default_rng([cfg.seed, trial])
    grid = BoundaryGrid(cfg.n, cfg.L)
    eta = random_trig_polynomial(rng, cfg.band_limit, 1, cfg.L).sample(grid)
    f = random_trig_polynomial(rng, cfg.band_limit, 2, cfg.L).sample(grid)
    eta = eta * (cfg.eta_scale / lipschitz_norm(eta))
    f = f * (1.0 / lp_norm(f))
    return SweepTrial(eta, f)


@dataclass(frozen=True)
class SweepReport:
    config: SweepConfig
    ratios: tuple[float, ...]
    quantile_levels: tuple[float, ...] = (0.5, 0.9, 0.99)
    quantiles: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        q = np.quantile(np.array(self.ratios), self.quantile_levels)
        object.__setattr__(self, "quantiles", tuple(float(v) for v in q))

    @property
    def max(self) -> float:
        return max(self.ratios)

    @property
    def mean(self) -> float:
        return math.fsum(self.ratios) / len(self.ratios)

    def summary(self) -> dict:
        return {
            "config": asdict(self.config),
            "max": self.max,
            "mean": self.mean,
            "quantiles": dict(zip(map(str, self.quantile_levels), self.quantiles)),
        }


def ensemble_sweep(cfg: SweepConfig) -> SweepReport:
    def run(trial):
        eta, f = sweep_trial(cfg, trial)
        return commutator_ratio(eta, f, cfg.p)

    if cfg.workers == 1:
        ratios = [run(t) for t in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(cfg.workers) as pool:
            ratios = list(pool.map(run, range(cfg.trials)))
    return SweepReport(cfg, tuple(ratios))


class FrequencyScan(NamedTuple):
    modes: tuple[int, ...]
    ratios: tuple[float, ...]

    @property
    def plateau(self) -> float:
        """Max over the upper half of the range divided by max over the lower half."""
        r = np.array(self.ratios)
        half = len(r) // 2
        lo, hi = r[:half].max(initial=0.0), r[half:].max(initial=0.0)
        if lo == 0.0:
            return 0.0 if hi == 0.0 else math.inf
        return float(hi / lo)


def _check_kmax(grid: BoundaryGrid, k_max: int):
    if not 2 <= k_max <= grid.n // 4:
        raise ConfigurationError(f"k_max must lie in [2, n/4 = {grid.n // 4}]")


def frequency_scan(eta: BoundaryField, k_max: int, p: float = 2.0) -> FrequencyScan:
    """Commutator ratios for ``f = (cos(kappa_k x), 0)``, ``k = 1..k_max``."""
    _check_kmax(eta.grid, k_max)
    ks = tuple(range(1, k_max + 1))
    return FrequencyScan(ks, tuple(commutator_ratio(eta, pure_mode(eta.grid, k, 2), p) for k in ks))


def calderon_scan(eta: BoundaryField, k_max: int) -> FrequencyScan:
    """Calderon-commutator ratios for ``g = cos(kappa_k x)``, ``k = 1..k_max``."""
    _check_kmax(eta.grid, k_max)
    ks = tuple(range(1, k_max + 1))
    return FrequencyScan(ks, tuple(calderon_commutator(eta, pure_mode(eta.grid, k))[1] for k in ks))
