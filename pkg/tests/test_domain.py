import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hitchin_lab.domain import (DomainError, QuarticInput, area_of, build_disk_background,
                                build_torus_background, cauchy_riemann_defect, curvature_conformal,
                                laplacian5, poincare_factor, qnorm_sq)


def test_torus_is_flat_and_periodic():
    bg = build_torus_background(2.0, 1.0, 16, 3.0)
    assert bg.periodic and bg.interior.all()
    assert np.max(np.abs(bg.kappa)) == 0.0
    assert area_of(bg.sigma, bg) == pytest.approx(6.0, rel=1e-14)


def test_discrete_hyperbolic_disk_has_constant_curvature():
    bg = build_disk_background(0.5, 32)
    assert np.max(np.abs(bg.kappa[bg.interior] + 2)) <= 1e-10
    assert bg.kappa_constant == pytest.approx(-2.0, abs=1e-10)


def test_sampled_poincare_curvature_converges():
    errs = []
    for n in (16, 32, 64):
        bg = build_disk_background(0.5, n, discrete_hyperbolic=False)
        errs.append(np.max(np.abs(bg.kappa[bg.interior] + 2)))
    assert errs[0] > errs[1] > errs[2]
    # second order: halving h divides the error by about four
    assert errs[1] / errs[2] > 3.0


def test_poincare_factor_at_origin():
    assert poincare_factor(0.0) == 2.0


@pytest.mark.parametrize("kw", [dict(lx=1, ly=1, n=4, sigma0=1), dict(lx=-1, ly=1, n=16, sigma0=1),
                                dict(lx=1, ly=1, n=16, sigma0=0)])
def test_invalid_torus_rejected(kw):
    with pytest.raises(DomainError):
        build_torus_background(**kw)


@pytest.mark.parametrize("rfrac,n", [(0.95, 32), (0.0, 32), (0.5, 8)])
def test_invalid_disk_rejected(rfrac, n):
    with pytest.raises(DomainError):
        build_disk_background(rfrac, n)


def test_nonconstant_polynomial_not_allowed_on_torus():
    bg = build_torus_background(1, 1, 8, 1)
    with pytest.raises(DomainError):
        QuarticInput.polynomial(bg, [0, 1])


def test_polynomial_zeros_and_holomorphy():
    bg = build_disk_background(0.5, 32)
    q = QuarticInput.polynomial(bg, [-0.01, 0, 1])
    assert sorted(z.real for z in q.zeros()) == pytest.approx([-0.1, 0.1])
    assert cauchy_riemann_defect(q.values, bg) < 1e-10
    rough = QuarticInput.sampled(bg, np.abs(bg.z) ** 2 + 0j)
    assert not rough.holomorphic


@given(theta=st.floats(-10, 10), t=st.floats(0.01, 100))
def test_rotation_and_scaling_of_modulus(theta, t):
    bg = build_torus_background(1, 1, 8, 1)
    q = QuarticInput.constant(bg, 3 - 4j)
    assert np.array_equal(q.rotate(theta).modulus, q.modulus)
    assert np.allclose(q.scaled(t).modulus, 5 * t, rtol=1e-15)


def test_qnorm_and_laplacian():
    bg = build_torus_background(1, 1, 16, 2.0)
    q = QuarticInput.constant(bg, 4.0)
    assert np.allclose(qnorm_sq(bg, q), 1.0)
    f = np.sin(2 * math.pi * bg.x)
    lap = laplacian5(f, bg)
    exact = -(2 * math.pi) ** 2 * f
    assert np.max(np.abs(lap - exact)) < 0.05 * (2 * math.pi) ** 2


def test_curvature_rejects_nonpositive_factor():
    bg = build_torus_background(1, 1, 8, 1)
    with pytest.raises(DomainError):
        curvature_conformal(-np.ones(bg.shape), bg)
