"""The seven verification suites behind the command line."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

import numpy as np

from . import commutator as cm
from . import geometry as geo
from . import identities as ids
from . import kernels as ker
from . import measures as ms
from . import stokes as st
from .config import ExperimentConfig
from .extensions import extend
from .reports import RunReport
from .spectral import (
    BoundaryField,
    BoundaryGrid,
    TrigPolynomial,
    inner,
    lipschitz_norm,
    lp_norm,
    random_trig_polynomial,
)

Runner = Callable[[ExperimentConfig, RunReport], list]
REGISTRY: dict[str, Runner] = {}


def experiment(name: str):
    def wrap(fn):
        REGISTRY[name] = fn
        return fn

    return wrap


def pmap(fn, items, workers: int):
    items = list(items)
    if workers == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def _rng(cfg: ExperimentConfig, *stream: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, *stream])


def _grid(cfg: ExperimentConfig, factor: int = 1) -> BoundaryGrid:
    return BoundaryGrid(cfg.n * factor, cfg.L)


def _graded(cfg: ExperimentConfig, grid: BoundaryGrid, factor: int = 1) -> ms.GradedGrid:
    return ms.GradedGrid(grid, cfg.y_levels * factor, Y=cfg.top)


def _normalized(poly: TrigPolynomial, grid: BoundaryGrid, norm) -> BoundaryField:
    g = poly.sample(grid)
    return g * (1.0 / norm(g))


def _cos_field(grid: BoundaryGrid) -> BoundaryField:
    kappa = 2 * math.pi / grid.L
    return BoundaryField(grid, np.vstack([np.cos(kappa * grid.x), np.zeros(grid.n)]))


# -- dtn-verify --------------------------------------------------------------------------------

@experiment("dtn-verify")
def dtn_verify(cfg: ExperimentConfig, rep: RunReport) -> list:
    grid = _grid(cfg)
    table = rep.table(
        "trials",
        ["trial", "momentum_residual", "divergence_residual", "trace_error",
         "energy_pairing", "energy_volume", "energy_gap", "hilbert_gap"],
    )

    def trial(t):
        rng = _rng(cfg, 1, t)
        f = _normalized(random_trig_polynomial(rng, cfg.band_limit, 2, cfg.L), grid, lp_norm)
        sol = st.solve_stream(f)
        pts = np.column_stack([rng.uniform(0, cfg.L, 64), rng.uniform(1e-3, cfg.L, 64)])
        res = st.residual_stokes(sol, pts)
        trace = st.eval_fields(sol, 0.0)
        tr = max(np.abs(trace.u1.scalar - f.values[0]).max(), np.abs(trace.u2.scalar - f.values[1]).max())
        pairing, volume = st.dtn_energy_check(f)
        lam = st.apply_dtn(f)
        hil = np.abs(cm.dtn_hilbert_form(f).values - lam.values).max() / np.abs(lam.values).max()
        lit = [
            np.abs(cm.dtn_hilbert_form(f, True).values - lam.values).max() / np.abs(lam.values).max(),
            np.abs(st.apply_dtn(f, True).values - lam.values).max() / np.abs(lam.values).max(),
        ]
        gap = abs(pairing - volume) / abs(volume)
        return (t, res.momentum, res.divergence, tr / np.abs(f.values).max(), pairing, volume, gap, hil), lit

    results = pmap(trial, range(cfg.trial_count), cfg.workers)
    for row, _ in results:
        table.add(*row)
    rows = [r for r, _ in results]
    rep.check("stokes residual (relative)", max(max(r[1], r[2]) for r in rows), "<=", 1e-10)
    rep.check("boundary trace error (relative)", max(r[3] for r in rows), "<=", 1e-10)
    rep.check("energy identity gap (relative)", max(r[6] for r in rows), "<=", 1e-10)
    rep.check("hilbert form vs DtN (relative)", max(r[7] for r in rows), "<=", 1e-12)
    rep.check("literal symbol forms disagree (relative)", min(min(l) for _, l in results), ">=", 1e-3)

    sym = rep.table("symbol", ["k", "kappa", "eig_low", "eig_high", "hermitian_defect", "eig_error"]
                    + (["literal_11", "literal_12", "literal_21", "literal_22"] if cfg.paper_literal_symbol else []))
    worst_eig = worst_herm = 0.0
    eigs = []
    for k in range(-cfg.n // 2, cfg.n // 2 + 1):
        m = st.dtn_symbol(k, cfg.L)
        kappa = 2 * math.pi * k / cfg.L
        herm = float(np.abs(m - m.conj().T).max())
        ev = np.linalg.eigvalsh(m)
        err = float(np.abs(ev - [abs(kappa), 3 * abs(kappa)]).max() / max(1.0, abs(kappa)))
        worst_eig, worst_herm = max(worst_eig, err), max(worst_herm, herm)
        extra = []
        if cfg.paper_literal_symbol:
            lm = st.dtn_symbol(k, cfg.L, paper_literal=True)
            extra = [repr(complex(v)) for v in lm.ravel()]
        sym.add(k, kappa, float(ev[0]), float(ev[1]), herm, err, *extra)
        eigs.append((k, ev[0], ev[1]))
    rep.check("symbol M(0) norm", float(np.abs(st.dtn_symbol(0)).max()), "<=", 0.0)
    rep.check("symbol Hermitian defect", worst_herm, "<=", 1e-12)
    rep.check("symbol eigenvalues {|k|, 3|k|} (relative)", worst_eig, "<=", 1e-12)

    pairing, volume = st.dtn_energy_check(_cos_field(grid))
    rep.check("cos example pairing - 2pi", abs(pairing - 2 * math.pi), "<=", 1e-10)
    rep.check("cos example volume energy - 2pi", abs(volume - 2 * math.pi), "<=", 1e-10)

    ks, lo, hi = zip(*eigs)
    return [("symbol_eigenvalues.svg", [("low", ks, lo), ("high", ks, hi)], "k", "eigenvalue", {})]


# -- commutator-sweep --------------------------------------------------------------------------

@experiment("commutator-sweep")
def commutator_sweep(cfg: ExperimentConfig, rep: RunReport) -> list:
    base = cm.SweepConfig(cfg.seed, cfg.trial_count, cfg.band_limit, cfg.n, cfg.L, cfg.p, 1.0, cfg.workers)
    fine = cm.SweepConfig(cfg.seed, cfg.trial_count, cfg.band_limit, 2 * cfg.n, cfg.L, cfg.p, 1.0, cfg.workers)
    coarse, refined = cm.ensemble_sweep(base), cm.ensemble_sweep(fine)
    header = ["trial", "ratio_n", "ratio_2n"]
    literal = None
    if cfg.paper_literal_symbol:
        header.append("ratio_paper_literal")

        def lit(t):
            eta, f = cm.sweep_trial(base, t)
            return cm.commutator_ratio(eta, f, cfg.p, paper_literal=True)

        literal = pmap(lit, range(cfg.trial_count), cfg.workers)
    tab = rep.table("trials", header)
    for t in range(cfg.trial_count):
        tab.add(t, coarse.ratios[t], refined.ratios[t], *([literal[t]] if literal else []))
    rep.check("max commutator ratio (finite)", coarse.max, "<", math.inf)
    rep.check("max ratio drift n -> 2n", abs(refined.max - coarse.max) / coarse.max, "<=", 0.10)

    grid = _grid(cfg)
    eta = BoundaryField(grid, np.cos(2 * math.pi * grid.x / cfg.L))
    scan = cm.frequency_scan(eta, cfg.scan_limit, cfg.p)
    cal = cm.calderon_scan(eta, cfg.scan_limit)
    scan_fine = cm.frequency_scan(BoundaryField(_grid(cfg, 2), np.cos(2 * math.pi * _grid(cfg, 2).x / cfg.L)),
                                  cfg.scan_limit, cfg.p)
    st_tab = rep.table("scan", ["k", "commutator_ratio", "commutator_ratio_2n", "calderon_ratio"])
    for k, a, b, c in zip(scan.modes, scan.ratios, scan_fine.ratios, cal.ratios):
        st_tab.add(k, a, b, c)
    rep.check("commutator plateau statistic", scan.plateau, "<=", 1.5)
    rep.check("commutator scan drift n -> 2n",
              max(abs(b / a - 1) for a, b in zip(scan.ratios, scan_fine.ratios)), "<=", 0.10)
    rep.check("calderon plateau statistic", cal.plateau, "<=", 1.5)
    const = BoundaryField(grid, np.full(grid.n, 0.75))
    rep.check("calderon ratio for constant eta", cm.calderon_commutator(const, _cos_field(grid).component(0))[1],
              "<=", 0.0)
    return [("frequency_scan.svg",
             [("[Lambda, eta]", scan.modes, scan.ratios), ("Calderon", cal.modes, cal.ratios)],
             "k", "ratio", {})]


# -- identity-check ----------------------------------------------------------------------------

def _identity_inputs(cfg: ExperimentConfig, grid: BoundaryGrid, t: int):
    rng = _rng(cfg, 3, t)
    band = max(1, min(cfg.band_limit, cfg.n // 8))
    f = _normalized(random_trig_polynomial(rng, band, 2, cfg.L), grid, lp_norm)
    g = _normalized(random_trig_polynomial(rng, band, 2, cfg.L), grid, lp_norm)
    eta = _normalized(random_trig_polynomial(rng, band, 1, cfg.L), grid, lipschitz_norm)
    w = _normalized(random_trig_polynomial(rng, band, 2, cfg.L), grid, lp_norm)
    phi = _normalized(random_trig_polynomial(rng, max(1, band // 2), 4, cfg.L), grid, lp_norm)
    return f, g, eta, w, phi


@experiment("identity-check")
def identity_check(cfg: ExperimentConfig, rep: RunReport) -> list:
    grid = _grid(cfg)
    gg = _graded(cfg, grid)
    cutoff = ids.SmoothCutoff(0.0, gg.Y / 4)
    tab = rep.table("trials", ["trial", "key_harmonic", "key_mollifier", "pressure", "pressure_paper_literal",
                               "dahlberg_product", "dahlberg_separable"])

    def trial(t):
        f, g, eta, w, phi = _identity_inputs(cfg, grid, t)
        kh = ids.key_identity_check(f, g, eta, "harmonic", gg)
        km = ids.key_identity_check(f, g, eta, "mollifier", gg)
        pr = ids.pressure_identity_check(f, g, eta, "harmonic", gg)
        dp = ids.dahlberg_identity_check(g, ids.ProductTestField(extend(eta), st.solve_stream(w)), gg)
        ds = ids.dahlberg_identity_check(g, ids.SeparableTestField(phi, cutoff), gg)
        return (t, kh.relative_residual, km.relative_residual, pr.relative_residual,
                pr.metadata["literal_relative_residual"], dp.relative_residual, ds.relative_residual)

    rows = pmap(trial, range(cfg.trial_count), cfg.workers)
    for r in rows:
        tab.add(*r)
    rep.check("key identity residual, harmonic extension", max(r[1] for r in rows), "<=", 1e-6)
    rep.check("key identity residual, mollifier extension", max(r[2] for r in rows), "<=", 1e-6)
    rep.check("pressure identity residual", max(r[3] for r in rows), "<=", 1e-6)
    rep.check("dahlberg identity residual, product field", max(r[5] for r in rows), "<=", 1e-6)
    rep.check("dahlberg identity residual, separable field", max(r[6] for r in rows), "<=", 1e-6)

    f, g, eta, _, _ = _identity_inputs(cfg, grid, 0)
    m0 = max(48, cfg.y_levels // 4)
    ref = rep.table("refinement", ["M", "levels", "key_residual"])
    res = []
    for M in (m0, 2 * m0, 4 * m0):
        r = ids.key_identity_check(f, g, eta, "harmonic", ms.GradedGrid(grid, M, Y=cfg.top))
        ref.add(M, r.metadata["levels"], r.relative_residual)
        res.append((M, r.relative_residual))
    rep.check("key identity residual order under M-doubling", math.log2(res[0][1] / res[1][1]), ">=", 2.0)

    one = BoundaryField(grid, np.ones(grid.n))
    pt = ids.pressure_identity_check(f, g, one, "harmonic", gg)
    rep.check("pressure identity, eta = 1 (max |term|)",
              max([abs(pt.lhs)] + [abs(v) for _, v in pt.terms]), "<=", 0.0)
    dz = ids.dahlberg_identity_check(g, ids.ZeroTestField(), gg)
    rep.check("dahlberg identity, v = 0 (max |term|)",
              max([abs(dz.lhs)] + [abs(v) for _, v in dz.terms]), "<=", 0.0)
    Ms, rs = zip(*res)
    return [("key_residual_vs_M.svg", [("key identity", Ms, rs)], "M", "relative residual",
             {"logx": True, "logy": True})]


# -- square-report -----------------------------------------------------------------------------

@experiment("square-report")
def square_report(cfg: ExperimentConfig, rep: RunReport) -> list:
    grid = _grid(cfg)
    gg = _graded(cfg, grid)
    cos = ms.square_bound_report(_cos_field(grid), gg, cfg.aperture)
    rep.check("cos example: iint |grad u|^2 t vs pi (relative)", abs(cos.grad_u_t - math.pi) / math.pi, "<=", 5e-3)
    rep.check("cos example: iint |q|^2 t vs pi (relative)", abs(cos.q_t - math.pi) / math.pi, "<=", 5e-3)
    rep.check("cos example: iint |q|^2 t / ||u||^2 vs 1",
              abs(cos.ratios["q_t/boundary_l2_sq"] - 1.0), "<=", 5e-3)

    tab = rep.table("trials", ["trial", "grad_u_t", "ntmax_sq", "grad_q_t3", "q_t", "boundary_l2_sq",
                               "grad_u_t/ntmax_sq", "grad_q_t3/q_t", "q_t/boundary_l2_sq"])

    def trial(t):
        rng = _rng(cfg, 4, t)
        f = _normalized(random_trig_polynomial(rng, cfg.band_limit, 2, cfg.L), grid, lp_norm)
        return ms.square_bound_report(f, gg, cfg.aperture)

    reports = pmap(trial, range(cfg.trial_count), cfg.workers)
    for t, r in enumerate(reports):
        ra = r.ratios
        tab.add(t, r.grad_u_t, r.ntmax_sq, r.grad_q_t3, r.q_t, r.boundary_l2_sq,
                ra["grad_u_t/ntmax_sq"], ra["grad_q_t3/q_t"], ra["q_t/boundary_l2_sq"])
    worst = max(max(r.ratios.values()) for r in reports)
    rep.check("all square-function ratios finite", worst, "<", math.inf)
    chain = max(r.ratios["grad_q_t3/q_t"] for r in reports)
    rep.check("chain iint |grad q|^2 t^3 / iint |q|^2 t (displayed chain needs <= 1)", chain, "<=", 1.0)
    rep.check("chain ratio vs half-plane value 3", max(abs(r.ratios["grad_q_t3/q_t"] - 3.0) for r in reports),
              "<=", 1e-6)
    zero = ms.square_bound_report(BoundaryField(grid, np.full((2, grid.n), 0.4)), gg, cfg.aperture)
    rep.check("constant data: square functions", max(zero.grad_u_t, zero.grad_q_t3, zero.q_t), "<=", 0.0)
    return []


# -- carleson-report ---------------------------------------------------------------------------

def _carleson_pair(f: BoundaryField, gg: ms.GradedGrid, depth: int):
    sol = st.solve_stream(f)
    (a, b), (c, d) = sol.gradient()
    t = gg.levels[:, None]
    du = ms.squared_magnitude([a, b, c, d], gg) * t
    q = ms.squared_magnitude(sol.q, gg) * t
    return ms.carleson_norm(du, gg, depth), ms.carleson_norm(q, gg, depth)


@experiment("carleson-report")
def carleson_report(cfg: ExperimentConfig, rep: RunReport) -> list:
    grid, fine = _grid(cfg), _grid(cfg, 2)
    gg, gf = _graded(cfg, grid), _graded(cfg, fine, 2)
    # the drift compares one functional (fixed tent family) on two discretizations
    depth = int(math.log2(cfg.n)) - 2
    tab = rep.table("trials", ["trial", "depth", "carleson_grad_u", "carleson_grad_u_2n",
                               "carleson_q", "carleson_q_2n", "carleson_grad_u_2n_next_level",
                               "carleson_q_2n_next_level"])

    def trial(t):
        rng = _rng(cfg, 5, t)
        poly = random_trig_polynomial(rng, cfg.band_limit, 2, cfg.L)
        poly = poly.scaled(1.0 / np.abs(poly.sample(grid).values).max())
        du, q = _carleson_pair(poly.sample(grid), gg, depth)
        du2, q2 = _carleson_pair(poly.sample(fine), gf, depth)
        du3, q3 = _carleson_pair(poly.sample(fine), gf, depth + 1)
        return (t, depth, du.norm, du2.norm, q.norm, q2.norm, du3.norm, q3.norm), du.table

    results = pmap(trial, range(cfg.trial_count), cfg.workers)
    for row, _ in results:
        tab.add(*row)
    rows = [r for r, _ in results]
    rep.check("carleson |grad u|^2 t finite", max(r[2] for r in rows), "<", math.inf)
    rep.check("carleson |grad u|^2 t drift n -> 2n", max(abs(r[3] / r[2] - 1) for r in rows), "<=", 0.10)
    rep.check("carleson |q|^2 t finite", max(r[4] for r in rows), "<", math.inf)
    rep.check("carleson |q|^2 t drift n -> 2n", max(abs(r[5] / r[4] - 1) for r in rows), "<=", 0.10)
    tents = rep.table("tents", ["level", "index", "measure", "measure_over_side"])
    for row in results[0][1]:
        tents.add(*row)

    eta = _normalized(random_trig_polynomial(_rng(cfg, 6), min(cfg.band_limit, 16), 1, cfg.L), grid, lipschitz_norm)
    _, base = geo.extension_lemma21(eta, gg)
    _, tripled = geo.extension_lemma21(eta * 3.0, gg)
    ext = rep.table("extension", ["scale", "lipschitz", "grad_sup", "carleson_first", "carleson_second"])
    for s, r in ((1.0, base), (3.0, tripled)):
        ext.add(s, r.lipschitz, r.grad_sup, r.carleson_first, r.carleson_second)
    rep.check("extension |grad^2 G| t norm: linear homogeneity",
              abs(tripled.carleson_first / (3 * base.carleson_first) - 1), "<=", 1e-10)
    rep.check("extension (|grad^2 G|^2 t norm)^1/2: linear homogeneity",
              abs(math.sqrt(tripled.carleson_second / base.carleson_second) / 3 - 1), "<=", 1e-10)
    rep.check("extension gradient constant finite", base.gradient_constant, "<", math.inf)
    levels = sorted({r[0] for r in results[0][1]})
    worst = [max(r[3] for r in results[0][1] if r[0] == j) for j in levels]
    return [("carleson_by_level.svg", [("|grad u|^2 t", levels, worst)], "tent level j",
             "max nu(T(Q))/|Q|", {})]


# -- kenig-stein-check -------------------------------------------------------------------------

@experiment("kenig-stein-check")
def kenig_stein_check(cfg: ExperimentConfig, rep: RunReport) -> list:
    grid = _grid(cfg)
    amplitudes = [0.5, 1.0, 2.0, 4.0, 8.0][: cfg.trial_count]
    tab = rep.table("graphs", ["amplitude", "c0", "doublings", "min_phi_t", "lower_bound", "upper_bound",
                               "carleson", "carleson_refined", "drift"])
    gg = _graded(cfg, grid)

    def run(a):
        psi = geo.smooth_sawtooth(16, a, cfg.L).sample(grid) if a else BoundaryField(grid, np.zeros(grid.n))
        m = geo.build_map(psi, c0=cfg.c0_policy, grid=gg)
        return a, m, geo.verify_map(m, cfg.y_levels)

    results = pmap(run, [0.0] + amplitudes, cfg.workers)
    for a, m, r in results:
        tab.add(a, r.c0, m.doublings, r.min_phi_t, r.lower_bound, r.upper_bound, r.carleson,
                r.carleson_refined, r.drift)
    rep.check("min phi_t over all graphs", min(r.min_phi_t for _, _, r in results), ">=", geo.TARGET_SLOPE)
    rep.check("worst Carleson drift under refinement", max(r.drift for _, _, r in results), "<=", 0.10)
    rep.check("largest Carleson norm |grad^2 phi|^2 t (finite)", max(r.carleson for _, _, r in results),
              "<", math.inf)
    rep.check("bi-Lipschitz lower bound", min(r.lower_bound for _, _, r in results), ">", 0.0)
    rep.check("zero graph: Hessian Carleson norm", results[0][2].carleson, "<=", 0.0)

    _, m, _ = results[-1]
    x = np.array([0.3, 1.7, 4.0])
    t = np.array([0.05, 0.3, 1.1])
    h = 1e-4
    d = m.derivatives(x, t)
    fd_t = (m.phi(x, t + h) - m.phi(x, t - h)) / (2 * h)
    fd_x = (m.phi(x + h, t) - m.phi(x - h, t)) / (2 * h)
    err = max(np.abs(fd_t - d.phi_t).max(), np.abs(fd_x - d.phi_x).max())
    rep.check("map derivatives vs central differences (h = 1e-4)", err, "<=", 1e-6)
    return []


# -- kernel-check ------------------------------------------------------------------------------

@experiment("kernel-check")
def kernel_check(cfg: ExperimentConfig, rep: RunReport) -> list:
    x = np.array([1.0, 0.0, 0.0])
    s = ker.fundamental_solution(x)
    rep.check("Gamma_11(1,0,0) - 1/(4 pi)", abs(s.gamma[0, 0] - 1 / (4 * math.pi)), "<=", 1e-12)
    rep.check("Gamma_22(1,0,0) - 1/(8 pi)", abs(s.gamma[1, 1] - 1 / (8 * math.pi)), "<=", 1e-12)
    rep.check("Pi_1(1,0,0) - 1/(4 pi)", abs(s.pi[0] - 1 / (4 * math.pi)), "<=", 1e-12)
    res = ker.kernel_residual(x, 1e-3)
    rep.check("Stokes residual at h = 1e-3", res.momentum, "<=", 1e-4)
    rep.check("divergence residual at h = 1e-3", res.divergence, "<=", 1e-4)

    hs = [2e-2 / 2**i for i in range(4)]
    pts = [x, np.array([0.3, -0.7, 0.5])]
    tab = rep.table("kernel_residual", ["point", "h", "momentum", "divergence"])
    curves = []
    for i, p in enumerate(pts):
        vals = [ker.kernel_residual(p, h) for h in hs]
        for h, v in zip(hs, vals):
            tab.add(i, h, v.momentum, v.divergence)
        curves.append((f"point {i}", hs, [v.momentum for v in vals]))
    rep.check("kernel residual order (min over points)",
              min(math.log2(ker.kernel_residual(p, 1e-2).momentum / ker.kernel_residual(p, 5e-3).momentum)
                  for p in pts), ">=", 1.9)

    y, nrm = np.array([0.2, 0.1, -0.3]), np.array([0.0, 0.6, 0.8])
    xp = np.array([0.9, -0.4, 0.5])
    h = 1e-5
    grad = ker.stokeslet_gradient(xp - y)
    fd = np.stack([(ker.fundamental_solution(xp - y + h * e).gamma - ker.fundamental_solution(xp - y - h * e).gamma)
                   / (2 * h) for e in np.eye(3)], -1)
    rep.check("Stokeslet gradient vs central differences", np.abs(grad - fd).max(), "<=", 1e-8)
    rep.check("double layer parity K(x,y) + K(y,x)",
              np.abs(ker.double_layer_kernel(xp, y, nrm) + ker.double_layer_kernel(y, xp, nrm)).max(), "<=", 1e-14)

    levels = [8 * 2**i for i in range(cfg.trial_count)]
    wt = rep.table("w_refinement", ["n_theta", "panels", "h", "laplacian_residual", "W1_far", "exp_const",
                                    "exp_normal"])
    lap, far = [], []
    point = np.array([2.0, 0.0, 0.0])
    for lv in levels:
        mesh = ker.sphere_mesh(lv)
        const = np.ones((mesh.size, 3))
        step = 0.8 / lv
        r = ker.w_laplacian_residual(mesh, const, point, step)
        w = ker.w_field(mesh, const, np.array([10.0, 0.0, 0.0])).W[0]
        e1 = ker.decay_exponent(mesh, const, [1.0, 0.5, 0.3])
        e2 = ker.decay_exponent(mesh, mesh.normals, [1.0, 0.5, 0.3])
        wt.add(lv, mesh.size, step, r, w, e1, e2)
        lap.append(r)
        far.append((w, e1, e2))
    rep.check("Laplace W_k residual reduction per doubling (min)",
              min(a / b for a, b in zip(lap, lap[1:])), ">=", 3.0)
    rep.check("Laplace W_k residual at |x| = 2, finest", lap[-1], "<=", 1e-3)
    rep.check("far-field W Cauchy gap, last refinement", abs(far[-1][0] / far[-2][0] - 1), "<=", 0.01)
    rep.check("decay exponent, constant density vs 3 (relative)", abs(far[-1][1] / 3 - 1), "<=", 0.10)
    rep.check("decay exponent, normal density vs 2 (relative)", abs(far[-1][2] / 2 - 1), "<=", 0.10)
    return [("kernel_residual_vs_h.svg", curves, "h", "Stokes residual", {"logx": True, "logy": True}),
            ("w_laplacian_vs_mesh.svg", [("Laplace W_1", levels, lap)], "n_theta", "residual",
             {"logx": True, "logy": True})]


# -- driver ------------------------------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None, plots: bool = False) -> RunReport:
    """Run one suite; write CSV/JSON (and SVG when ``plots``) into ``out_dir``."""
    rep = RunReport(cfg.experiment, cfg.to_dict())
    start = time.perf_counter()
    plot_specs = REGISTRY[cfg.experiment](cfg, rep)
    rep.wall_time = time.perf_counter() - start
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if plots:
            from .plotting import line_plot

            for name, series, xl, yl, opts in plot_specs:
                path = line_plot(out / f"{cfg.experiment}_{name}", series, xl, yl, cfg.experiment, **opts)
                rep.files.append(path.name)
        rep.write(out)
    return rep
