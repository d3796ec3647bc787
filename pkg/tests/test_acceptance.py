"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints a single PASS/FAIL line; the lines are repeated in the
pytest terminal summary.  Run directly with ``python tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hitchin_lab import verify
from hitchin_lab.bessel import i0_asymptotic, i0_series
from hitchin_lab.entropy import count_closed_geodesics, entropy_fit
from hitchin_lab.flat.geodesic import CurveClass, geodesic_length, torus_word
from hitchin_lab.flat.saddles import systole_and_saddles
from hitchin_lab.flat.surface import regular_octagon, square_torus
from hitchin_lab.metric import LOG43, bound_report, induced_metric, ray_sweep
from hitchin_lab.solver import solve_hitchin
from hitchin_lab.verify import (case_disk_poly, case_disk_q0, case_disk_z4, case_torus16, decay_experiment,
                                jacobian_fd_error)

EPS = 1e-6
DISKS = ("disk_q0", "disk_z4", "disk_poly")


def record(k: int, title: str, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {k:>2}: {title} | {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


@pytest.fixture(scope="module")
def solved():
    cases = {"torus16": case_torus16(), "disk_q0": case_disk_q0(),
             "disk_z4": case_disk_z4(scale=400.0), "disk_poly": case_disk_poly()}
    return {name: (bg, q, solve_hitchin(bg, q)) for name, (bg, q) in cases.items()}


@pytest.fixture(scope="module")
def reports(solved):
    return {name: bound_report(sol, bg, q) for name, (bg, q, sol) in solved.items()}


def test_criterion_01_torus_exact_solution():
    t0 = time.perf_counter()
    bg, q = case_torus16()
    sol = solve_hitchin(bg, q)
    im = induced_metric(sol, bg, q)
    dt = time.perf_counter() - t0
    err = float(np.max(np.abs(sol.psi1 - 3 * math.log(2))) + np.max(np.abs(sol.psi2 - math.log(2))))
    eg = float(np.max(np.abs(im.g - 16)))
    ek = float(np.max(np.abs(im.kappa_g)))
    record(1, "torus exact solution", err <= 1e-8 and eg <= 1e-6 and ek <= 1e-6 and dt < 5.0,
           f"psi error {err:.2e} (<=1e-8), |g-16| {eg:.2e}, |kappa(g)| {ek:.2e} (<=1e-6), {dt:.2f} s (<5 s)")


def test_criterion_02_fuchsian_constants(solved):
    bg, q, sol = solved["disk_q0"]
    I = bg.interior
    e2 = float(np.max(np.abs(sol.psi2 - 0.5 * math.log(2))[I]))
    e12 = float(np.max(np.abs(sol.psi1 - sol.psi2 - math.log(1.5))[I]))
    ek = float(np.nanmax(np.abs(induced_metric(sol, bg, q).kappa_g[I] + 1 / 3)))
    record(2, "Fuchsian constants", e2 <= 1e-6 and e12 <= 1e-6 and ek <= 2e-3,
           f"|psi2-log2/2| {e2:.2e}, |psi1-psi2-log1.5| {e12:.2e} (<=1e-6), |kappa(g)+1/3| {ek:.2e} (<=2e-3)")


def test_criterion_03_bound_chain(reports):
    ok = all(r.three_min >= -EPS and r.three_max <= LOG43 + EPS for r in reports.values())
    rt, r0 = reports["torus16"], reports["disk_q0"]
    tight0 = max(abs(rt.three_min), abs(rt.three_max))
    tight43 = max(abs(r0.three_min - LOG43), abs(r0.three_max - LOG43))
    ok = ok and tight0 <= EPS and tight43 <= EPS
    ranges = ", ".join(f"{n} [{r.three_min:.6f}, {r.three_max:.6f}]" for n, r in reports.items())
    record(3, "0 <= 3psi2-psi1 <= log(4/3)", ok,
           f"{ranges}; torus tight at 0 ({tight0:.1e}), q=0 tight at log(4/3) ({tight43:.1e})")


def test_criterion_04_dominations(reports):
    flat = {n: r.dom_flat_min for n, r in reports.items() if r.dom_flat_min is not None}
    const = {n: reports[n].dom_const_min for n in DISKS}
    ok = all(v >= 1 - EPS for v in flat.values()) and all(v >= 1 - EPS for v in const.values())
    record(4, "g >= 4|q|^1/2 and g >= -3 kappa sigma", ok,
           "min g/4|q|^1/2: " + ", ".join(f"{n} {v:.6f}" for n, v in flat.items())
           + "; min g/(-3 kappa sigma): " + ", ".join(f"{n} {v:.6f}" for n, v in const.items()))


def test_criterion_05_negative_curvature(solved, reports):
    parts, ok = [], True
    for n in DISKS:
        bg = solved[n][0]
        r = reports[n]
        bound = -1e-8 + bg.h**2
        ok = ok and r.kappa_g_max <= bound and r.fsum_max < 2
        parts.append(f"{n} max kappa(g) {r.kappa_g_max:.4f} (<= {bound:.2e}), max f1+f2 {r.fsum_max:.6f}")
    rt = reports["torus16"]
    parts.append(f"torus16 flat equality case: kappa(g) {rt.kappa_g_max:.1e}, f1+f2 {rt.fsum_max!r}")
    record(5, "negative curvature on hyperbolic cases", ok, "; ".join(parts))


def test_criterion_06_jacobian(solved):
    cases = [(bg, q, sol, n) for n, (bg, q, sol) in solved.items() if n in ("torus16", "disk_z4", "disk_poly")]
    worst, where = jacobian_fd_error(cases, seed=0, total=100)
    record(6, "Jacobian vs finite differences", worst <= 1e-6,
           f"worst relative error {worst:.2e} over 100 nodes in 3 cases (<=1e-6) at {where}")


def test_criterion_07_decay_vs_bessel():
    profs = decay_experiment(multipliers=(1, 16, 256))
    rates = np.array([p.rate for p in profs])
    norms = np.array([p.qnorm for p in profs])
    dev = float(np.max(np.abs((rates / rates[0]) / np.sqrt(norms / norms[0]) - 1)))
    under = all(p.within_oracle for p in profs)
    rel = abs(i0_series(30.0) - i0_asymptotic(30.0)) / i0_series(30.0)
    record(7, "decay of u1+u2 vs Bessel", dev <= 0.2 and under and rel <= 1e-8,
           f"||q|| ratios {np.round(norms / norms[0], 3).tolist()}, rate deviation {dev:.3f} (<=0.2), "
           f"center <= oracle {under}, I0 routes at 30 {rel:.1e} (<=1e-8)")


def test_criterion_08_ray_monotonicity():
    bg, q = case_disk_z4(128)
    rep = ray_sweep(bg, q, [1, 2, 4, 8])
    inc = [s.min_increment for s in rep.steps[1:]]
    dev = [s.ratio_deviation for s in rep.steps]
    record(8, "ray monotonicity on q = z^4", rep.ok and rep.increments_positive() and rep.deviation_shrinking(),
           f"min increments {[f'{v:.2e}' for v in inc]} (>0), ratio deviation {[round(v, 3) for v in dev]} decreasing")


def test_criterion_09_flat_exactness():
    O = regular_octagon()
    T = square_torus()
    sysl = systole_and_saddles(O, 1.1).systole
    L34 = geodesic_length(T, torus_word(T, 3, 4)).length
    L34s = geodesic_length(T, CurveClass.from_torus(3, 4)).length
    ok = (O.genus == 2 and len(O.cone_angles) == 1 and abs(O.cone_angles[0] - 6 * math.pi) <= 1e-12
          and sum(O.cone_k) == 8 and abs(O.area - 2 * (1 + math.sqrt(2))) <= 1e-9
          and abs(sysl - 1) <= 1e-12 and L34 == 5.0 and L34s == 5.0)
    record(9, "flat surface exactness", ok,
           f"genus {O.genus}, cone {O.cone_angles[0] / math.pi:.12f} pi, sum k {sum(O.cone_k)}, "
           f"area err {abs(O.area - 2 * (1 + math.sqrt(2))):.1e}, systole {sysl!r}, (3,4) length {L34!r}")


def test_criterion_10_entropy_laws():
    O = regular_octagon()
    cut = [1 + 0.25 * k for k in range(25)]
    fit = entropy_fit(count_closed_geodesics(O, 7.0, cut))
    small = [c for c in cut if c <= 5.0]
    a = count_closed_geodesics(O, 5.0, small)
    b = count_closed_geodesics(O.scaled(2.0), 10.0, [2 * c for c in small])
    ea, eb = entropy_fit(a).headline, entropy_fit(b).headline
    ft = entropy_fit(count_closed_geodesics(square_torus(), 40.0, [float(k) for k in range(2, 41)]))
    ok = a.N == b.N and eb == ea / 2 and ft.headline <= 0.1 and fit.spread <= 0.10
    record(10, "entropy laws", ok,
           f"estimate(2S) - estimate(S)/2 = {eb - ea / 2!r}, torus at L=40 {ft.headline:.4f} (<=0.1), "
           f"octagon {fit.headline:.4f} spread {fit.spread:.3f} (<=0.10)")


def test_criterion_11_phase_invariance(solved):
    ok, parts = True, []
    for n in ("torus16", "disk_poly"):
        bg, q, sol = solved[n]
        for theta in (math.pi / 7, math.pi / 2):
            r = solve_hitchin(bg, q.rotate(theta))
            same = np.array_equal(r.psi1, sol.psi1) and np.array_equal(r.psi2, sol.psi2)
            ok = ok and same
            parts.append(f"{n} theta={theta:.4f} {'identical' if same else 'differs'}")
    record(11, "phase invariance", ok, ", ".join(parts))


def test_criterion_12_verify_gate():
    t0 = time.perf_counter()
    rep = verify.run("all")
    dt = time.perf_counter() - t0
    bad = [f"{c.suite}: {c.name}" for c in rep.failures]
    record(12, "full verify gate", rep.ok and dt < 120.0,
           f"{len(rep.checks) - len(bad)}/{len(rep.checks)} checks passed in {dt:.1f} s (<120 s)"
           + (f"; failed: {bad}" if bad else ""))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
