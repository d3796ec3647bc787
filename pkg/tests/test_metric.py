import math

import numpy as np
import pytest

from hitchin_lab.domain import QuarticInput, build_disk_background, build_torus_background
from hitchin_lab.metric import (LOG43, bound_report, far_mask, flat_area, flat_distance_to_zeros,
                                flat_segment_length, induced_metric, ray_sweep)
from hitchin_lab.solver import solve_hitchin
from hitchin_lab.verify import decay_experiment


@pytest.fixture(scope="module")
def disk_cases():
    out = {}
    for name, coeffs in {"q0": [0], "z4": [0, 0, 0, 0, 400], "poly": [120, 0, 300 + 100j, 0, 400]}.items():
        bg = build_disk_background(0.5, 48)
        q = QuarticInput.polynomial(bg, coeffs)
        out[name] = (bg, q, solve_hitchin(bg, q))
    return out


def test_bound_chain_and_dominations(disk_cases):
    for name, (bg, q, sol) in disk_cases.items():
        rep = bound_report(sol, bg, q)
        assert not rep.failures(1e-6), (name, rep.failures(1e-6))
        assert rep.kappa_g_max < 0
        assert rep.fsum_max < 2
        assert rep.dom_const_min >= 1 - 1e-6


def test_fuchsian_case_is_tight_at_log43(disk_cases):
    bg, q, sol = disk_cases["q0"]
    rep = bound_report(sol, bg, q)
    assert rep.three_min == pytest.approx(LOG43, abs=1e-9)
    assert rep.dom_flat_min is None


def test_torus_is_the_equality_case():
    bg = build_torus_background(1, 1, 16, 1.0)
    q = QuarticInput.constant(bg, 16.0)
    sol = solve_hitchin(bg, q)
    rep = bound_report(sol, bg, q)
    assert abs(rep.three_min) <= 1e-12 and abs(rep.three_max) <= 1e-12
    assert rep.dom_flat_min == pytest.approx(1.0, abs=1e-12)
    assert rep.fsum_max == pytest.approx(2.0, abs=1e-12)
    assert rep.dom_const_min is None
    assert rep.regions[0].asserted and rep.regions[0].holds


def test_curvature_two_routes_agree(disk_cases):
    bg, q, sol = disk_cases["poly"]
    im = induced_metric(sol, bg, q)
    assert im.two_route_gap <= 50 * bg.h**2


def test_flat_lengths_for_z4():
    bg = build_disk_background(0.5, 16)
    q = QuarticInput.polynomial(bg, [0, 0, 0, 0, 1])
    # |z^4|^{1/4} = |z| so the flat length of [0, r] is r^2 / 2
    assert float(flat_segment_length(q, 0.0, 0.4)) == pytest.approx(0.08, rel=1e-10)
    d = flat_distance_to_zeros(bg, q, np.array([0.3 + 0j]))
    assert d[0] == pytest.approx(0.045, rel=1e-8)
    assert flat_area(bg, q) > 0
    assert far_mask(bg, q).sum() < bg.interior.sum()


def test_ray_sweep_monotone():
    bg = build_disk_background(0.5, 32)
    q = QuarticInput.polynomial(bg, [0, 0, 0, 0, 1])
    rep = ray_sweep(bg, q, [1, 2, 4, 8])
    assert rep.ok and rep.increments_positive() and rep.deviation_shrinking()
    assert len(rep.rows()) == 4


def test_ray_sweep_parallel_matches_sequential(monkeypatch):
    monkeypatch.setenv("HITCHIN_LAB_THREADS", "3")
    bg = build_disk_background(0.5, 24)
    q = QuarticInput.polynomial(bg, [0, 0, 0, 0, 10])
    a = ray_sweep(bg, q, [1, 2, 4], warm_start=False)
    b = ray_sweep(bg, q, [1, 2, 4], warm_start=True)
    for ra, rb in zip(a.rows(), b.rows()):
        assert ra[0] == rb[0]
        for x, y in zip(ra[1:], rb[1:]):
            assert (math.isnan(x) and math.isnan(y)) or x == pytest.approx(y, rel=1e-6, abs=1e-9)


def test_ray_sweep_rejects_bad_input():
    bg = build_disk_background(0.5, 16)
    with pytest.raises(ValueError):
        ray_sweep(bg, QuarticInput.polynomial(bg, [1]), [2, 1])


def test_decay_rates_scale_with_root_norm():
    profs = decay_experiment(n=97, multipliers=(1, 16))
    r = (profs[1].rate / profs[0].rate) / math.sqrt(profs[1].qnorm / profs[0].qnorm)
    assert abs(r - 1) <= 0.2
    assert all(p.within_oracle for p in profs)
