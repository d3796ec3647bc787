import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hitchin_lab.domain import QuarticInput, build_disk_background, build_torus_background
from hitchin_lab.metric import induced_metric
from hitchin_lab.solver import (BracketViolation, NonConvergence, SolverOptions, algebraic_solution,
                                cyclic_constant_oracle, flat_subsolution, psi_to_cyclic, residual,
                                solve_cyclic, solve_hitchin)
from hitchin_lab.verify import jacobian_fd_error


def _torus(n=16, sigma0=1.0, c=16.0):
    bg = build_torus_background(1.0, 1.0, n, sigma0)
    return bg, QuarticInput.constant(bg, c)


def test_torus_q16_closed_form():
    bg, q = _torus(32)
    sol = solve_hitchin(bg, q)
    assert np.max(np.abs(sol.psi1 - 3 * math.log(2))) <= 1e-12
    assert np.max(np.abs(sol.psi2 - math.log(2))) <= 1e-12
    assert sol.residual_inf <= 1e-10


@given(c=st.complex_numbers(min_magnitude=0.5, max_magnitude=200, allow_nan=False, allow_infinity=False),
       sigma0=st.floats(0.25, 4.0))
def test_flat_torus_matches_closed_form(c, sigma0):
    # with kappa = 0 the constant solution has e^{psi1-psi2} = e^{2 psi2} = |q|^{1/2} / sigma
    bg, q = _torus(8, sigma0, c)
    sol = solve_hitchin(bg, q)
    a = math.sqrt(abs(c)) / sigma0
    assert np.allclose(sol.psi2, 0.5 * math.log(a), rtol=0, atol=1e-9)
    assert np.allclose(sol.psi1, 1.5 * math.log(a), rtol=0, atol=1e-9)
    g = induced_metric(sol, bg, q).g
    assert np.allclose(g, 4 * math.sqrt(abs(c)), rtol=1e-9)


def test_fuchsian_constants_on_disk():
    bg = build_disk_background(0.5, 32)
    sol = solve_hitchin(bg, QuarticInput.constant(bg, 0.0))
    I = bg.interior
    assert np.max(np.abs(sol.psi2 - 0.5 * math.log(2))[I]) <= 1e-9
    assert np.max(np.abs(sol.psi1 - sol.psi2 - math.log(1.5))[I]) <= 1e-9


def test_algebraic_solution_residual():
    for kappa, Q in ((0.0, np.array([1e-3, 1.0, 16.0, 1e4])), (-2.0, np.array([0.0, 1.0, 16.0, 1e4]))):
        p1, p2 = algebraic_solution(Q, kappa)
        a = np.exp(p1 - p2)
        b = np.exp(2 * p2)
        assert np.allclose(b, a - kappa / 4)
        assert np.allclose(a + 0.75 * kappa, Q / (a * a * b), rtol=1e-10, atol=1e-12)


def test_sub_and_super_initializations_agree():
    bg = build_disk_background(0.5, 24)
    q = QuarticInput.polynomial(bg, [50, 0, 0, 0, 400])
    a = solve_hitchin(bg, q, SolverOptions(init="sub"))
    b = solve_hitchin(bg, q, SolverOptions(init="super"))
    assert np.max(np.abs(a.psi1 - b.psi1)) <= 1e-8
    assert np.max(np.abs(a.psi2 - b.psi2)) <= 1e-8
    assert a.bracket_margin >= -1e-6


def test_jacobian_matches_finite_differences():
    cases = []
    for bg, q in (_torus(12), (lambda b: (b, QuarticInput.polynomial(b, [10, 0, 200j, 0, 300])))(
            build_disk_background(0.5, 20))):
        cases.append((bg, q, solve_hitchin(bg, q), bg.kind))
    worst, where = jacobian_fd_error(cases, seed=3, total=20)
    assert worst <= 1e-6, where


@given(theta=st.floats(-math.pi, math.pi))
def test_phase_invariance_is_exact(theta):
    bg = build_disk_background(0.5, 16)
    q = QuarticInput.polynomial(bg, [3, 1j, 40, 0, 100])
    a = solve_hitchin(bg, q)
    b = solve_hitchin(bg, q.rotate(theta))
    assert np.array_equal(a.psi1, b.psi1) and np.array_equal(a.psi2, b.psi2)


def test_cyclic_system_reproduces_sp4_solution():
    bg = build_disk_background(0.5, 24)
    q = QuarticInput.polynomial(bg, [20, 0, 100, 0, 200])
    s = solve_hitchin(bg, q)
    w = psi_to_cyclic(bg, s.psi1, s.psi2)
    c = solve_cyclic(bg, [1, 1, q.values], SolverOptions(tolerance=1e-10), boundary=w,
                     init=psi_to_cyclic(bg, *flat_subsolution(bg, q)))
    for a, b in zip(c.w, w):
        assert np.max(np.abs(a - b)[bg.interior]) <= 1e-8


@pytest.mark.parametrize("g", [[1, 2, 3], [2, 1, 1, 5], [1, 1, 1, 1, 1]])
def test_cyclic_constant_oracle(g):
    bg = build_torus_background(1, 1, 8, 1.0)
    cs = solve_cyclic(bg, g)
    for wk, ok in zip(cs.w, cyclic_constant_oracle(np.abs(np.asarray(g, float)) ** 2)):
        assert np.max(np.abs(wk - ok)) <= 1e-10


def test_solution_residual_is_small_everywhere():
    bg = build_disk_background(0.5, 24)
    q = QuarticInput.polynomial(bg, [0, 0, 0, 0, 400])
    s = solve_hitchin(bg, q)
    r1, r2 = residual(bg, q, s.psi1, s.psi2)
    assert max(np.nanmax(np.abs(r1[bg.interior])), np.nanmax(np.abs(r2[bg.interior]))) <= 1e-8


def test_nonconvergence_is_reported():
    bg = build_disk_background(0.5, 24)
    q = QuarticInput.polynomial(bg, [0, 0, 0, 0, 1e6])
    with pytest.raises(NonConvergence):
        solve_hitchin(bg, q, SolverOptions(max_iterations=1, tolerance=1e-14))


def test_bad_options_rejected():
    with pytest.raises(ValueError):
        SolverOptions(tolerance=-1)
    with pytest.raises(ValueError):
        SolverOptions(init="nope")


def test_bracket_violation_names_node():
    exc = BracketViolation((3, 4), -0.5)
    assert "(3, 4)" in str(exc)
