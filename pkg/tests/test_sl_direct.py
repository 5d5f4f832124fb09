import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import COS_DELTA, COS_LAMBDAS, COS_MU2, COS_NU2
from halfinv.errors import BracketFailure, NonFiniteState, WronskianMismatch
from halfinv.grid import GridFunction
from halfinv.sl_direct import (BoundaryParams, IntegratorConfig, _eigen_search, apply_shift, aux_spectra,
                               aux_spectra_lambda, char_value, choose_shift, eigenvalues_full, eigenvalues_lambda,
                               integrate_solution, n_steps, phi_boundary, psi_boundary, shift_spectrum)

PI = np.pi


def zero(a=0.0, b=PI):
    return GridFunction.constant(0.0, a, b)


# -- integrate_solution -------------------------------------------------------

def test_free_forward():
    r = integrate_solution(zero(), 1.0, 1.0, 0.0)
    assert r.value == pytest.approx(-1.0, abs=1e-13)
    assert r.derivative == pytest.approx(0.0, abs=1e-12)
    r0 = integrate_solution(zero(), 0.0, 1.0, 0.0)
    assert (r0.value, r0.derivative) == pytest.approx((1.0, 0.0), abs=1e-14)


def test_linear_potential_against_adaptive_oracle():
    # scipy DOP853 at rtol 1e-13 on q(x) = x, lam = 2, (1, 0)
    q = GridFunction.from_callable(lambda x: x, 0.0, PI)
    r = integrate_solution(q, 2.0, 1.0, 0.0)
    assert r.value == pytest.approx(-2.5272819712196446, abs=1e-8)
    assert r.derivative == pytest.approx(-2.3107282616796265, abs=1e-8)


def test_refined_step_self_convergence():
    q = GridFunction.from_callable(lambda x: x, 0.0, PI)
    fine = IntegratorConfig(steps_per_unit=2560, steps_per_phase=120)
    a = integrate_solution(q, 2.0, 1.0, 0.0)
    b = integrate_solution(q, 2.0, 1.0, 0.0, cfg=fine)
    assert abs(a.value - b.value) < 1e-10 and abs(a.derivative - b.derivative) < 1e-10


def test_backward_is_inverse_of_forward():
    q = GridFunction.from_callable(np.cos, 0.0, PI)
    f = integrate_solution(q, 3.3, 0.7, -0.2)
    b = integrate_solution(q, 3.3, f.value, f.derivative, direction="backward")
    assert (b.value, b.derivative) == pytest.approx((0.7, -0.2), abs=1e-11)


def test_overflow_is_reported():
    with pytest.raises(NonFiniteState):
        integrate_solution(zero(0, 2 * PI), -1e6, 1.0, 0.0)
    with pytest.raises(NonFiniteState):
        integrate_solution(zero(), math.nan, 1.0, 0.0)


def test_step_count_quantised():
    assert n_steps(PI, 0.0) % 64 == 0
    assert n_steps(PI, 1e4) > n_steps(PI, 1.0)


# -- boundary values ----------------------------------------------------------

def test_phi_free_values():
    r = phi_boundary(zero(), 0.0, 1.0)
    assert (r.value, r.derivative) == pytest.approx((-1.0, 0.0), abs=1e-12)
    r = phi_boundary(zero(), 0.0, 0.25)
    assert (r.value, r.derivative) == pytest.approx((0.0, -0.5), abs=1e-13)


def test_phi_constant_potential_closed_form():
    # q = 1, h = 0.3, lam = 2: phi = cos x + 0.3 sin x
    r = phi_boundary(GridFunction.constant(1.0, 0.0, PI), 0.3, 2.0)
    assert r.value == pytest.approx(-1.0, abs=1e-12)
    assert r.derivative == pytest.approx(-0.3, abs=1e-12)


def test_phi_at_interior_point():
    r = phi_boundary(zero(), 0.0, 1.0, at=PI / 2)
    assert (r.value, r.derivative) == pytest.approx((0.0, -1.0), abs=1e-12)


def test_psi_free_values():
    r = psi_boundary(zero(PI, 2 * PI), 0.0, 0.25)
    assert (r.value, r.derivative) == pytest.approx((0.0, 0.5), abs=1e-13)
    r = psi_boundary(zero(PI, 2 * PI), 0.0, 1.0)
    assert (r.value, r.derivative) == pytest.approx((-1.0, 0.0), abs=1e-12)


def test_psi_constant_potential_closed_form():
    # psi = cos k(2pi - x) + H sin k(2pi - x)/k with k = sqrt(lam - c)
    r = psi_boundary(GridFunction.constant(0.7, PI, 2 * PI), 0.2, 3.0)
    assert r.value == pytest.approx(-0.07964869524865892, abs=1e-10)
    assert r.derivative == pytest.approx(-1.5249291774682285, abs=1e-10)


# -- characteristic function --------------------------------------------------

def test_char_free_values():
    bp = BoundaryParams(0.0, 0.0)
    assert char_value(zero(0, 2 * PI), bp, 0.0625) == pytest.approx(-0.25, abs=1e-13)
    assert char_value(zero(0, 2 * PI), bp, 0.25) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("lam", sorted(COS_DELTA))
def test_char_against_oracle(cos_q, lam):
    assert char_value(cos_q, BoundaryParams(0.5, -0.3), lam) == pytest.approx(COS_DELTA[lam], abs=1e-9)


def test_wronskian_mismatch_detected(cos_q):
    with pytest.raises(WronskianMismatch):
        char_value(cos_q, BoundaryParams(0.5, -0.3), 1.0, IntegratorConfig(wronskian_tol=0.0, steps_per_unit=64))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1.5, 1.5), min_size=3, max_size=3), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(-3, 60))
def test_wronskian_constancy(coefs, h, H, lam):
    # char_value raises WronskianMismatch when the routes disagree beyond 1e-8 relative
    c = np.array(coefs)
    q = GridFunction.from_callable(lambda x: np.cos(np.multiply.outer(x, [0.0, 0.5, 1.5])) @ c, 0.0, 2 * PI, 513)
    char_value(q, BoundaryParams(h, H), lam)


def test_boundary_params_validation():
    with pytest.raises(ValueError):
        BoundaryParams(math.inf, 0.0)


# -- eigenvalues ----------------------------------------------------------------

def test_free_spectrum():
    rho = eigenvalues_full(zero(0, 2 * PI), BoundaryParams(0.0, 0.0), 5)
    assert np.allclose(rho, [0.0, 0.5, 1.0, 1.5, 2.0], atol=1e-12)


def test_constant_potential_spectrum():
    c = 0.8
    lam = eigenvalues_lambda(GridFunction.constant(c, 0, 2 * PI), BoundaryParams(0.0, 0.0), 3)
    assert np.allclose(lam, (np.arange(3) / 2) ** 2 + c, atol=1e-11)


def test_cos_spectrum_against_oracle(cos_q):
    lam = eigenvalues_lambda(cos_q, BoundaryParams(0.5, -0.3), 6)
    assert np.allclose(lam, COS_LAMBDAS, atol=1e-8)
    rho = eigenvalues_full(cos_q, BoundaryParams(0.5, -0.3), 6)
    assert rho[0] < 0 and rho[0] == pytest.approx(-math.sqrt(-COS_LAMBDAS[0]), abs=1e-8)


def test_residuals_and_omega_tail(cos_q):
    bp = BoundaryParams(0.5, -0.3)
    rho = eigenvalues_full(cos_q, bp, 32)
    lam = np.sign(rho) * rho**2
    # scale: |d Delta / d lam| ~ pi near the roots
    for r, l in zip(rho, lam):
        assert abs(char_value(cos_q, bp, l)) <= 1e-9 * max(1.0, abs(r))
    n = np.arange(1, 33)
    est = PI * n * (rho - (n - 1) / 2)
    omega = 0.5 - 0.3 + 0.5 * cos_q.integral()
    assert abs(est[-8:].mean() - omega) < abs(est[8:16].mean() - omega)
    assert abs(est[-8:].mean() - omega) < 0.01


def test_eigenvalue_shift_equivariance(cos_q):
    bp = BoundaryParams(0.5, -0.3)
    s = 0.37
    a = eigenvalues_lambda(cos_q, bp, 12)
    b = eigenvalues_lambda(apply_shift(cos_q, s), bp, 12)
    assert np.allclose(b, shift_spectrum(a, s), atol=1e-8)


def test_asymptotic_tail_partial_sums_decrease(cos_q):
    bp = BoundaryParams(0.5, -0.3)
    omega = 0.2 + 0.5 * cos_q.integral()

    def tail(N):
        rho = eigenvalues_full(cos_q, bp, N)
        n = np.arange(1, N + 1)
        k = n * (rho - (n - 1) / 2) - omega / PI
        return np.sum(k[N // 2 - 1:] ** 2)

    assert tail(32) < tail(16)


def test_bracket_failure_reports_index():
    q = zero()
    with pytest.raises(BracketFailure) as info:
        _eigen_search(q, 1.0, 0.0, PI / 2, [50.0, 80.0], [0.1, 0.1], IntegratorConfig(max_expansions=0))
    assert info.value.index == 1


# -- auxiliary spectra ----------------------------------------------------------

def test_free_aux():
    mu, nu = aux_spectra(zero(PI, 2 * PI), 0.0, 8)
    n = np.arange(1, 9)
    assert np.allclose(mu, n - 0.5, atol=1e-12)
    assert np.allclose(nu, n - 1.0, atol=1e-12)


def test_constant_aux():
    c = 0.6
    mu2, nu2 = aux_spectra_lambda(GridFunction.constant(c, PI, 2 * PI), 0.0, 5)
    n = np.arange(1, 6)
    assert np.allclose(mu2, (n - 0.5) ** 2 + c, atol=1e-11)
    assert np.allclose(nu2, (n - 1.0) ** 2 + c, atol=1e-11)


def test_cos_aux_against_oracle(cos_q):
    mu2, nu2 = aux_spectra_lambda(cos_q.restrict(PI, 2 * PI), -0.3, 4)
    assert np.allclose(mu2[:3], COS_MU2, atol=1e-8)
    assert np.allclose(nu2, COS_NU2, atol=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_aux_interlacing(seed):
    from halfinv.pipeline import random_problem

    q, _, H = random_problem(np.random.default_rng(seed), 5.0)
    mu2, nu2 = aux_spectra_lambda(q.restrict(PI, 2 * PI), H, 24)
    assert np.all(nu2 < mu2)
    assert np.all(mu2[:-1] < nu2[1:])


# -- shifts ---------------------------------------------------------------------

def test_shift_examples():
    q = zero(PI, 2 * PI)
    _, nu2 = aux_spectra_lambda(apply_shift(q, 1.0), 0.0, 2)
    assert nu2[0] == pytest.approx(1.0, abs=1e-12)
    mu, _ = aux_spectra(apply_shift(q, 2.0), 0.0, 1)
    assert mu[0] == pytest.approx(1.5, abs=1e-12)


def test_choose_shift():
    assert choose_shift([np.array([1.0, 4.0]), np.array([2.0])]) == 0.0
    s = choose_shift([np.array([-0.4, 3.0]), np.array([0.1])])
    assert s == pytest.approx(0.25 + 0.4 + 0.5)
    assert choose_shift([np.array([0.0])], margin=0.0) == pytest.approx(0.25)
