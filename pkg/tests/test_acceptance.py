"""The ten acceptance criteria, each at its stated tolerance.

Regression constants (C_SWEEP, GRAM_FLOOR, C_M) were measured once with the
seeds used here and frozen with margin; see the decisions ledger.
"""
import time

import numpy as np
import pytest

from halfinv import (BoundaryParams, EigenData, MomentSystem, Perturbation, ZeroProductFunction, aux_spectra,
                     cauchy_from_potential, char_value, decompose_spectrum, eigen_data_from_cauchy,
                     eigenvalues_full, extract_M, gelfand_levitan_reconstruct, moments_of, riesz_bounds,
                     solve_half_inverse, solve_moments, stability_sweep, synthesize_mixed_data)
from halfinv.grid import GridFunction, l2_distance
from halfinv.kernels import KernelFunction, TrigSeries
from halfinv.pipeline import random_problem
from halfinv.sl_direct import aux_spectra_lambda, choose_shift

from test_moments import perturbed_lattice

PI = np.pi
C_SWEEP = 1.5      # measured max 0.757 (both amplitudes)
GRAM_FLOOR = 0.1   # measured min 0.161
C_M = 150.0        # measured max 99.8


def rel_l2(q, f):
    true = GridFunction(q.a, q.b, f(q.nodes))
    return (q - true).l2_norm() / true.l2_norm()


def test_criterion_01_free_exactness(record_criterion):
    t = time.perf_counter()
    zero = GridFunction.constant(0.0, 0.0, 2 * PI)
    n = np.arange(1, 51)
    e_full = np.max(np.abs(eigenvalues_full(zero, BoundaryParams(0.0, 0.0), 50) - (n - 1) / 2))
    mus, nus = aux_spectra(zero.restrict(PI, 2 * PI), 0.0, 50)
    e_aux = max(np.max(np.abs(mus - (n - 0.5))), np.max(np.abs(nus - (n - 1))))
    dt = time.perf_counter() - t
    ok = e_full <= 1e-9 and e_aux <= 1e-9 and dt <= 10
    assert record_criterion(1, ok, f"max error {max(e_full, e_aux):.2e} <= 1e-9, {dt:.1f} s <= 10 s")


def test_criterion_02_cos_round_trip(cos_q, record_criterion):
    t = time.perf_counter()
    errs, herrs = [], []
    for N in (16, 32, 64):
        r = solve_half_inverse(synthesize_mixed_data(cos_q, 0.5, -0.3, N))
        errs.append(rel_l2(r.q_left, np.cos))
        herrs.append(abs(r.h - 0.5))
    dt = time.perf_counter() - t
    ok = errs[2] <= 0.05 and herrs[2] <= 1e-2 and errs[0] >= errs[1] >= errs[2] and dt <= 120
    assert record_criterion(2, ok, f"rel L2 {errs[0]:.4f}/{errs[1]:.4f}/{errs[2]:.4f} (N=16/32/64), "
                                   f"|h err| {herrs[2]:.1e}, {dt:.0f} s")


def test_criterion_03_constant_round_trip(record_criterion):
    one = GridFunction.constant(1.0, 0.0, 2 * PI)
    r = solve_half_inverse(synthesize_mixed_data(one, 0.0, 0.0, 32))
    e = rel_l2(r.q_left, np.ones_like)
    ok = e <= 0.02 and abs(r.h) <= 1e-2
    assert record_criterion(3, ok, f"rel L2 {e:.2e} <= 0.02, |h| {abs(r.h):.1e} <= 1e-2")


@pytest.mark.slow
def test_criterion_04_empirical_lipschitz(cos_q, record_criterion):
    t = time.perf_counter()
    base = (cos_q, 0.5, -0.3)
    rep0 = solve_half_inverse(synthesize_mixed_data(cos_q, 0.5, -0.3, 32))
    p = Perturbation(0.1, 0.05, 2024)
    rows_e, max_e = stability_sweep(base, p, 20, Q=5.0, base_report=rep0)
    rows_h, max_h = stability_sweep(base, p.scaled(0.5), 20, Q=5.0, base_report=rep0)
    rows = rows_e + rows_h
    dt = time.perf_counter() - t
    ok = (all(not r.error and r.in_ball and r.output_distance <= C_SWEEP * r.d for r in rows)
          and max_e / 3 <= max_h <= 3 * max_e and dt <= 900)
    assert record_criterion(4, ok, f"max ratio {max_e:.3f} (eps) / {max_h:.3f} (eps/2) <= C = {C_SWEEP}, "
                                   f"{len(rows)} trials, {dt:.0f} s")


def test_criterion_05_riesz_conditioning(record_criterion):
    smin = np.inf
    rng = np.random.default_rng(5)
    for seed in range(20):
        q, _, H = random_problem(np.random.default_rng(seed), 5.0)
        mu2, nu2 = aux_spectra_lambda(q.restrict(PI, 2 * PI), H, 32)
        s = choose_shift([mu2, nu2])
        mus, nus = np.sqrt(mu2 + s), np.sqrt(nu2 + s)
        smin = min(smin, riesz_bounds(mus, "sine").smallest_singular_value,
                   riesz_bounds(nus, "cosine").smallest_singular_value)
        # raises IllConditioned on failure
        solve_moments(MomentSystem(mus, "sine", rng.normal(size=32)))
        solve_moments(MomentSystem(nus, "cosine", rng.normal(size=32)))
    assert record_criterion(5, smin >= GRAM_FLOOR, f"smallest singular value {smin:.3f} >= {GRAM_FLOOR}")


def test_criterion_06_representation_identity(cos_q, record_criterion):
    bp = BoundaryParams(0.5, -0.3)
    z = ZeroProductFunction(eigenvalues_full(cos_q, bp, 48), 0.2 + 0.5 * cos_q.integral())
    rho = np.linspace(0.0, 10.0, 201)
    direct = np.array([char_value(cos_q, bp, r * r) for r in rho])
    worst = float(np.max(np.abs(z(rho**2) - direct) / (1e-3 * (1 + rho))))
    assert record_criterion(6, worst <= 1.0, f"sup |diff| / (1e-3 (1 + rho)) = {worst:.3f} <= 1")


def test_criterion_07_kernel_lipschitz(record_criterion):
    specs = []
    for seed in range(20):
        q, h, H = random_problem(np.random.default_rng(seed), 5.0)
        specs.append((eigenvalues_full(q, BoundaryParams(h, H), 32), h + H + 0.5 * q.integral()))
    worst = 0.0
    for i in range(20):
        (r1, o1), (r2, o2) = specs[i], specs[(i + 1) % 20]
        dM = (extract_M(ZeroProductFunction(r1, o1)) - extract_M(ZeroProductFunction(r2, o2))).l2_norm()
        d = abs(o1 - o2) + np.linalg.norm(decompose_spectrum(r1, o1).kappas - decompose_spectrum(r2, o2).kappas)
        worst = max(worst, dM / d)
    assert record_criterion(7, worst <= C_M, f"max ratio {worst:.1f} <= C = {C_M}")


def test_criterion_08_moment_exactness(record_criterion):
    rng = np.random.default_rng(8)
    worst = 0.0
    for i in range(100):
        kind = ("sine", "cosine")[i % 2]
        f = perturbed_lattice(rng, kind, int(rng.integers(4, 33)))
        m = rng.normal(size=len(f))
        K = solve_moments(MomentSystem(f, kind, m))
        worst = max(worst, np.linalg.norm(moments_of(K, f, kind) - m) / np.linalg.norm(m))
        g = KernelFunction.from_series(TrigSeries(f, rng.normal(size=len(f)), kind))
        back = solve_moments(MomentSystem(f, kind, moments_of(g, f, kind)))
        worst = max(worst, l2_distance(back, g) / g.l2_norm())
    assert record_criterion(8, worst <= 1e-8, f"worst relative round-trip error {worst:.1e} <= 1e-8")


def test_criterion_09_gelfand_levitan(record_criterion):
    q0, h0 = gelfand_levitan_reconstruct(EigenData.free(32), 256, reference_shift=0.0, F=np.zeros((257, 257)))
    exact = bool(np.all(q0.samples == 0.0) and h0 == 0.0)
    cd = cauchy_from_potential(GridFunction.constant(1.0, 0.0, PI), 0.0, 64)
    q1, h1 = gelfand_levitan_reconstruct(eigen_data_from_cauchy(cd, 32), reference_shift=2 * cd.omega_minus / PI)
    e = rel_l2(q1, np.ones_like)
    ok = exact and e <= 0.02
    assert record_criterion(9, ok, f"F = 0 exact: {exact}; shifted-free rel L2 {e:.1e} <= 0.02")


def test_criterion_10_shift_invariance(cos_q, record_criterion):
    s = 0.7
    r0 = solve_half_inverse(synthesize_mixed_data(cos_q, 0.5, -0.3, 32))
    r1 = solve_half_inverse(synthesize_mixed_data(cos_q + s, 0.5, -0.3, 32))
    d = (r1.q_left - s - r0.q_left).l2_norm()
    ok = d <= 1e-6 and abs(r1.h - r0.h) <= 1e-6
    assert record_criterion(10, ok, f"L2 change {d:.1e} <= 1e-6, |h change| {abs(r1.h - r0.h):.1e}")
