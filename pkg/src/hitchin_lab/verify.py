"""Invariant suites behind the ``verify`` gate.

Every check has a name that states the invariant, the measured value, the
threshold it was held to, and (on failure) the node or curve responsible.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import bessel
from .domain import QuarticInput, build_disk_background, build_torus_background
from .entropy import count_closed_geodesics, entropy_fit, flat_bound_curve
from .flat.geodesic import (CurveClass, edge_loop_word, geodesic_length, insert_backtrack, swing,
                            torus_word)
from .flat.mixed import MixedStructure, Piece, WeightedCurve, intersection_number, mixed_length
from .flat.saddles import systole_and_saddles
from .flat.surface import SurfaceError, build_flat_surface, regular_octagon, square_torus
from .metric import LOG43, bound_report, decay_compare, induced_metric, ray_sweep
from .solver import (SolverOptions, cyclic_constant_oracle,
                     flat_subsolution, jacobian, psi_to_cyclic, residual, solve_cyclic, solve_hitchin)

SUITE_NAMES = ("solver", "bounds", "metric", "flat", "entropy")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: object
    threshold: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        v = f"{self.value:.6g}" if isinstance(self.value, float) else str(self.value)
        extra = f"  [{self.detail}]" if self.detail and not self.ok else ""
        return f"{tag}  {self.suite:<8} {self.name}: {v} ({self.threshold}){extra}"

    def as_dict(self) -> dict:
        v = self.value
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        return {"suite": self.suite, "name": self.name, "value": v, "threshold": self.threshold,
                "ok": bool(self.ok), "detail": self.detail}


@dataclass
class Report:
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def as_dict(self) -> dict:
        return {"ok": self.ok, "n_checks": len(self.checks), "n_failed": len(self.failures),
                "timings": self.timings, "checks": [c.as_dict() for c in self.checks]}


# -- standard cases ----------------------------------------------------------

def case_torus16(n: int = 64):
    bg = build_torus_background(1.0, 1.0, n, 1.0)
    return bg, QuarticInput.constant(bg, 16.0)


def case_disk_q0(n: int = 64):
    bg = build_disk_background(0.5, n)
    return bg, QuarticInput.constant(bg, 0.0)


def case_disk_z4(n: int = 64, scale: float = 1.0):
    bg = build_disk_background(0.5, n)
    return bg, QuarticInput.polynomial(bg, [0, 0, 0, 0, scale])


def case_disk_poly(n: int = 64):
    bg = build_disk_background(0.5, n)
    return bg, QuarticInput.polynomial(bg, [120.0, 0, 300.0 + 100.0j, 0, 400.0])


def _node_label(bg, mask, arr, pick=np.argmin) -> str:
    vals = np.where(mask, arr, np.nan)
    k = int(pick(np.where(np.isnan(vals), np.inf if pick is np.argmin else -np.inf, vals)))
    j, i = np.unravel_index(k, bg.shape)
    return f"node ({j},{i}) at z={bg.x[j, i]:.4g}{bg.y[j, i]:+.4g}i"


def jacobian_fd_error(cases, seed: int = 0, total: int = 100, eps: float = 1e-6):
    """Worst relative error between analytic Jacobian columns and central differences.

    ``cases`` holds ``(bg, q, solution, name)``; ``total`` random interior
    nodes are split across them and both components are perturbed at each.
    Evaluation points are the solutions plus seeded noise so that the
    check does not sit on a special state.
    """
    rng = np.random.default_rng(seed)
    counts = [total // len(cases) + (1 if k < total % len(cases) else 0) for k in range(len(cases))]
    worst, where = 0.0, ""
    for (bg, q, s, name), count in zip(cases, counts):
        p1 = s.psi1 + 0.05 * rng.standard_normal(bg.shape)
        p2 = s.psi2 + 0.05 * rng.standard_normal(bg.shape)
        J = jacobian(bg, q, p1, p2).tocsc()
        idx = np.flatnonzero(bg.interior.ravel())
        m = len(idx)
        for k in rng.choice(m, count, replace=False):
            node = np.unravel_index(idx[k], bg.shape)
            for comp in (0, 1):
                a = [p1.copy(), p2.copy()]
                b = [p1.copy(), p2.copy()]
                a[comp][node] += eps
                b[comp][node] -= eps
                Ra, Rb = residual(bg, q, *a), residual(bg, q, *b)
                fd = np.concatenate([((Ra[i] - Rb[i]) / (2 * eps))[bg.interior] for i in (0, 1)])
                an = J[:, k + comp * m].toarray().ravel()
                rel = float(np.max(np.abs(fd - an)) / np.max(np.abs(an)))
                if rel > worst:
                    worst, where = rel, f"{name} node {tuple(int(v) for v in node)} component {comp + 1}"
    return worst, where


class _Suite:
    def __init__(self, name: str, report: Report):
        self.name = name
        self.report = report

    def add(self, name, value, ok, threshold, detail=""):
        self.report.checks.append(Check(self.name, name, value, threshold, bool(ok), detail))


# -- solver ------------------------------------------------------------------

def suite_solver(report: Report, cfg_case=None, seed: int = 0, tol: Optional[float] = None):
    S = _Suite("solver", report)
    opts = SolverOptions(tolerance=tol or 1e-10)

    # exact torus solution
    t0 = time.perf_counter()
    bg, q = case_torus16()
    sol = solve_hitchin(bg, q, opts)
    err = float(np.max(np.abs(sol.psi1 - 3 * math.log(2))) + np.max(np.abs(sol.psi2 - math.log(2))))
    S.add("torus q=16: max|psi1-3log2|+max|psi2-log2|", err, err <= 1e-8, "<= 1e-8")
    S.add("torus q=16: residual", sol.residual_inf, sol.residual_inf <= 1e-10, "<= 1e-10")
    im = induced_metric(sol, bg, q)
    S.add("torus q=16: max|g-16|", float(np.max(np.abs(im.g - 16))), np.max(np.abs(im.g - 16)) <= 1e-6, "<= 1e-6")
    S.add("torus q=16: max|kappa(g)|", float(np.max(np.abs(im.kappa_g))), np.max(np.abs(im.kappa_g)) <= 1e-6, "<= 1e-6")
    dt = time.perf_counter() - t0
    S.add("torus q=16: runtime [s]", dt, dt < 5.0, "< 5 s")
    for n in (16, 32, 128):
        b, qq = case_torus16(n)
        s = solve_hitchin(b, qq, opts)
        e = float(np.max(np.abs(s.psi1 - 3 * math.log(2))) + np.max(np.abs(s.psi2 - math.log(2))))
        S.add(f"torus q=16 n={n}: exact-solution error", e, e <= 1e-8, "<= 1e-8 at every resolution")

    # Fuchsian constants
    bg, q = case_disk_q0()
    sol = solve_hitchin(bg, q, opts)
    I = bg.interior
    e2 = float(np.max(np.abs(sol.psi2 - 0.5 * math.log(2))[I]))
    e12 = float(np.max(np.abs(sol.psi1 - sol.psi2 - math.log(1.5))[I]))
    S.add("disk q=0: max|psi2-log2/2|", e2, e2 <= 1e-6, "<= 1e-6", _node_label(bg, I, -np.abs(sol.psi2 - 0.5 * math.log(2))))
    S.add("disk q=0: max|psi1-psi2-log(3/2)|", e12, e12 <= 1e-6, "<= 1e-6")
    im = induced_metric(sol, bg, q)
    ek = float(np.nanmax(np.abs(im.kappa_g[I] + 1 / 3)))
    S.add("disk q=0: max|kappa(g)+1/3|", ek, ek <= 2e-3, "<= 2e-3")

    # bracketing and uniqueness
    cases = {"torus16": case_torus16(), "disk_z4": case_disk_z4(scale=400.0), "disk_poly": case_disk_poly()}
    if cfg_case is not None:
        cases["config"] = cfg_case
    sols = {}
    for name, (bg, q) in cases.items():
        a = solve_hitchin(bg, q, opts)
        sols[name] = a
        S.add(f"{name}: sub <= psi <= super", a.bracket_margin, a.bracket_margin >= -1e-6, ">= -1e-6")
        b = solve_hitchin(bg, q, SolverOptions(tolerance=opts.tolerance, init="super"))
        d = float(max(np.max(np.abs(a.psi1 - b.psi1)), np.max(np.abs(a.psi2 - b.psi2))))
        S.add(f"{name}: sub-init vs super-init", d, d <= 1e-8, "<= 1e-8")

    # Jacobian vs finite differences
    worst, where = jacobian_fd_error([(bg, q, sols[name], name) for name, (bg, q) in list(cases.items())[:3]], seed)
    S.add("Jacobian vs finite differences (100 nodes, 3 cases)", worst, worst <= 1e-6, "<= 1e-6", where)

    # phase invariance, bit for bit
    for name in ("disk_poly", "torus16"):
        bg, q = cases[name]
        for theta in (math.pi / 7, math.pi / 2):
            r = solve_hitchin(bg, q.rotate(theta), opts)
            same = np.array_equal(r.psi1, sols[name].psi1) and np.array_equal(r.psi2, sols[name].psi2)
            S.add(f"{name}: phase e^(i {theta:.4f}) bit-identical", same, same, "== True")

    # cyclic system cross-check
    bg, q = cases["disk_poly"]
    s = sols["disk_poly"]
    w = psi_to_cyclic(bg, s.psi1, s.psi2)
    c = solve_cyclic(bg, [1, 1, q.values], SolverOptions(tolerance=1e-9), boundary=w,
                     init=psi_to_cyclic(bg, *flat_subsolution(bg, q)))
    d = float(max(np.max(np.abs(a - b)[bg.interior]) for a, b in zip(c.w, w)))
    S.add("cyclic system (m=2) reproduces the Sp(4) solution", d, d <= 1e-8, "<= 1e-8")
    bt = build_torus_background(1, 1, 16, 1.0)
    for g in ([1, 2, 3], [1, 2, 0.5, 3]):
        cs = solve_cyclic(bt, g)
        oracle = cyclic_constant_oracle(np.abs(np.asarray(g, dtype=float)) ** 2)
        d = float(max(np.max(np.abs(wk - ok)) for wk, ok in zip(cs.w, oracle)))
        S.add(f"cyclic constant oracle m={len(g) - 1}", d, d <= 1e-10, "<= 1e-10")
    return sols


# -- bounds ----------------------------------------------------------------

def suite_bounds(report: Report, cfg_case=None, seed: int = 0, tol: Optional[float] = None):
    S = _Suite("bounds", report)
    opts = SolverOptions(tolerance=tol or 1e-10)
    eps = 1e-6
    cases = {"torus16": case_torus16(), "disk_q0": case_disk_q0(), "disk_z4": case_disk_z4(scale=400.0),
             "disk_poly": case_disk_poly()}
    if cfg_case is not None:
        cases = {"config": cfg_case}
    reports = {}
    for name, (bg, q) in cases.items():
        sol = solve_hitchin(bg, q, opts)
        rep = bound_report(sol, bg, q)
        reports[name] = rep
        for key, (val, ok) in rep.checks(eps).items():
            S.add(f"{name}: {key}", float(val), ok, f"eps = {eps:g}")
        # crude h^2 allowance for the curvature sign
        h = max(bg.hx, bg.hy)
        S.add(f"{name}: max interior kappa(g) <= -1e-8 + h^2", rep.kappa_g_max,
              rep.kappa_g_max <= -1e-8 + h * h, f"<= {-1e-8 + h * h:.3g}")
    if "torus16" in reports:
        r = reports["torus16"]
        t = max(abs(r.three_min), abs(r.three_max))
        S.add("torus16: 3psi2-psi1 tight at 0", t, t <= eps, "<= 1e-6")
    if "disk_q0" in reports:
        r = reports["disk_q0"]
        t = max(abs(r.three_min - LOG43), abs(r.three_max - LOG43))
        S.add("disk_q0: 3psi2-psi1 tight at log(4/3)", t, t <= eps, "<= 1e-6")
    return reports


# -- metric ------------------------------------------------------------------

def decay_experiment(n: int = 129, c0: float = 6.25e6, multipliers=(1, 16, 256),
                     d_near: float = 1.0, d_far: float = 4.0, samples: int = 32):
    """Decay of ``u1+u2`` for ``q = c z^4`` at several ``c``; returns the profiles."""
    bg = build_disk_background(0.5, n)
    out = []
    for k in multipliers:
        c = c0 * k
        q = QuarticInput.polynomial(bg, [0, 0, 0, 0, c])
        sol = solve_hitchin(bg, q)
        # a point at flat distance d from the zero of c z^4 sits at |z| = sqrt(2 d / c^{1/4})
        z1 = math.sqrt(2 * d_near / c ** 0.25)
        z2 = math.sqrt(2 * d_far / c ** 0.25)
        radii = np.linspace(0.0, z2 - z1, samples)
        out.append(decay_compare(sol, bg, q, z1, radii))
    return out


def suite_metric(report: Report, cfg_case=None, seed: int = 0, tol: Optional[float] = None):
    S = _Suite("metric", report)
    opts = SolverOptions(tolerance=tol or 1e-10)

    # two-route curvature
    gaps = []
    for n in (32, 64):
        bg, q = case_disk_poly(n)
        sol = solve_hitchin(bg, q, opts)
        im = induced_metric(sol, bg, q)
        g = float(np.nanmax(np.abs(im.kappa_g - im.kappa_g_operator)[bg.interior]))
        gaps.append((max(bg.hx, bg.hy), g))
    h, g = gaps[-1]
    C = 50.0
    S.add("two-route curvature gap <= C h^2 (C=50)", g, g <= C * h * h, f"<= {C * h * h:.3g}")

    # Bessel decay comparison
    profs = decay_experiment()
    rates = np.array([p.rate for p in profs])
    norms = np.array([p.qnorm for p in profs])
    ratio = (rates / rates[0]) / np.sqrt(norms / norms[0])
    dev = float(np.max(np.abs(ratio - 1)))
    S.add("decay rate of u1+u2 scales like ||q||^(1/2)", dev, dev <= 0.2, "relative deviation <= 0.2")
    for k, p in zip((1, 4, 16), profs):
        S.add(f"||q|| x{k}: center value <= Bessel oracle", p.center_value, p.within_oracle,
              f"<= {p.oracle_center:.4g}")
    rel = abs(bessel.i0_series(30.0) - bessel.i0_asymptotic(30.0)) / bessel.i0_series(30.0)
    S.add("I0 series vs asymptotic at x=30", rel, rel <= 1e-8, "<= 1e-8 relative")

    # ray monotonicity
    bg, q = case_disk_z4(128)
    rep = ray_sweep(bg, q, [1, 2, 4, 8], opts)
    S.add("ray t={1,2,4,8}: all solves converged", rep.ok, rep.ok, "== True")
    for st in rep.steps[1:]:
        S.add(f"ray t={st.t:g}: min increment of psi1-psi2", st.min_increment, st.min_increment > 0, "> 0")
    devs = [s.ratio_deviation for s in rep.steps]
    S.add("ray: far-mask conformal ratio deviation shrinking", devs, rep.deviation_shrinking(), "strictly decreasing")

    # torus: flat bound is an equality
    bg, q = case_torus16(32)
    rep = ray_sweep(bg, q, [1, 2, 4])
    d = max(s.ratio_deviation for s in rep.steps)
    S.add("torus ray: g_t = 4 t^(1/2)|q|^(1/2)", d, d <= 1e-10, "<= 1e-10")
    return profs


# -- flat surfaces -----------------------------------------------------------

def suite_flat(report: Report, cfg_case=None, seed: int = 0, tol: Optional[float] = None):
    S = _Suite("flat", report)
    O = regular_octagon()
    S.add("octagon genus", O.genus, O.genus == 2, "== 2")
    ang = O.cone_angles[0] if len(O.cone_angles) == 1 else float("nan")
    S.add("octagon cone angle / pi", ang / math.pi, len(O.cone_angles) == 1 and abs(ang - 6 * math.pi) <= 1e-9, "== 6")
    S.add("octagon sum k", int(sum(O.cone_k)), sum(O.cone_k) == 8, "== 8 = 4(2g-2)")
    ea = abs(O.area - 2 * (1 + math.sqrt(2)))
    S.add("octagon area - 2(1+sqrt2)", ea, ea <= 1e-9, "<= 1e-9")
    rep = systole_and_saddles(O, 1.1)
    S.add("octagon systole (L=1.1)", rep.systole, abs(rep.systole - 1) <= 1e-12, "1 +- 1e-12")
    S.add("octagon systole curves", len(rep.systole_curves), len(rep.systole_curves) == 4, "== 4")
    rep2 = systole_and_saddles(O.scaled(2), 2.2)
    S.add("octagon x2 systole (L=2.2)", rep2.systole, abs(rep2.systole - 2) <= 1e-12, "2 +- 1e-12")

    T = square_torus()
    S.add("torus genus / sum k", (T.genus, int(sum(T.cone_k))), T.genus == 1 and sum(T.cone_k) == 0, "== (1, 0)")
    r = geodesic_length(T, CurveClass.from_torus(3, 4))
    S.add("torus class (3,4) length (shorthand)", r.length, r.length == 5.0, "== 5 exactly")
    r2 = geodesic_length(T, torus_word(T, 3, 4))
    S.add("torus class (3,4) length (corridor)", r2.length, r2.length == 5.0, "== 5 exactly")
    r3 = geodesic_length(T, torus_word(T, 1, 0))
    S.add("torus class (1,0) length", r3.length, r3.length == 1.0, "== 1")
    trep = systole_and_saddles(T, 1.5)
    lens = sorted(round(s.length, 12) for s in trep.saddles)
    S.add("torus saddles L=1.5", lens, lens == sorted([1.0, 1.0, round(math.sqrt(2), 12), round(math.sqrt(2), 12)]),
          "== {1,1,sqrt2,sqrt2}")
    S.add("torus systole", trep.systole, abs(trep.systole - 1) <= 1e-12, "== 1")
    worst = max(abs(geodesic_length(O, edge_loop_word(O, e, ccw)).length - 1)
                for e in range(8) for ccw in (True, False))
    S.add("octagon side classes have length 1", worst, worst <= 1e-12, "<= 1e-12")
    try:
        build_flat_surface([[0, 1, 1 + 1j, 1j]], [(0, 2, 0), (1, 3, 1.0 / 3.0 * 2)])
        rejected = False
    except SurfaceError:
        rejected = True
    S.add("rotation by pi/3 rejected", rejected, rejected, "== True")

    # scaling and stability under corridor moves
    w = edge_loop_word(O, 0)
    for lam in (2.0, 0.5):
        a = geodesic_length(O.scaled(lam), w).length
        b = geodesic_length(O, w).length
        S.add(f"scaling by {lam:g}: length(lam S) == lam length(S)", a - lam * b, a == lam * b, "== 0 exactly")
    rng = np.random.default_rng(seed)
    worst, where = 0.0, ""
    for trial in range(40):
        if trial % 2 == 0:
            pq = [(1, 0), (1, 1), (2, 3), (3, -4), (1, -2)][trial // 2 % 5]
            surf, word, ref = T, torus_word(T, *pq), math.hypot(*pq)
        else:
            surf, word, ref = O, edge_loop_word(O, int(rng.integers(8))), 1.0
        for _ in range(int(rng.integers(1, 8))):
            j = int(rng.integers(len(word)))
            P, i = surf.local(word[j])
            if rng.random() < 0.5:
                m = len(surf.polygons[P])
                corner = (P, (i + 1) % m) if rng.random() < 0.5 else (P, i)
                word = swing(surf, word, j, j, corner)
            else:
                e = surf.edge_id(P, int(rng.integers(len(surf.polygons[P]))))
                word = insert_backtrack(surf, word, j, e)
        d = abs(geodesic_length(surf, word).length - ref)
        if d > worst:
            worst, where = d, f"corridor {word}"
    S.add("length invariant under corridor moves (40 classes)", worst, worst <= 1e-9, "<= 1e-9", where)

    # mixed structures
    mix = MixedStructure(pieces=(), multicurve=[WeightedCurve(CurveClass.from_torus(1, 0), 2.0)])
    v = mixed_length(mix, CurveClass.from_torus(0, 1)).total
    S.add("mixed: weight-2 (1,0), query (0,1)", v, v == 2.0, "== 2")
    mix1 = MixedStructure(pieces=(Piece(O),))
    v1 = mixed_length(mix1, CurveClass.from_word(w), piece=0).total
    S.add("mixed: single flat piece equals geodesic length", v1, v1 == geodesic_length(O, w).length, "== flat length")
    mix2 = MixedStructure(pieces=(Piece(O, boundary=(CurveClass.from_torus(1, 0),), disjoint_from=frozenset({0})),),
                          multicurve=[WeightedCurve(CurveClass.from_torus(1, 0), 3.0)], ambient=T)
    v2 = mixed_length(mix2, CurveClass.from_word(w), piece=0)
    S.add("mixed: flat piece + disjoint curve adds nothing", v2.total, v2.multicurve == 0 and v2.flat == v1, "== flat length")
    det_ok = all(intersection_number(T, CurveClass.from_word(torus_word(T, *a)), CurveClass.from_word(torus_word(T, *b)))
                 == abs(a[0] * b[1] - a[1] * b[0])
                 for a in [(1, 0), (1, 1), (2, 1)] for b in [(0, 1), (1, -1), (2, -3)])
    S.add("torus intersection: crossings == |ps'-qp'|", det_ok, det_ok, "== True")
    area = O.normalized().area_pairing()
    S.add("unit-area self pairing = pi/2", area, abs(area - math.pi / 2) <= 1e-12, "pi/2 +- 1e-12")


# -- entropy -----------------------------------------------------------------

def suite_entropy(report: Report, cfg_case=None, seed: int = 0, tol: Optional[float] = None):
    S = _Suite("entropy", report)
    O = regular_octagon()
    cut = [1.0 + 0.25 * k for k in range(25)]
    tab = count_closed_geodesics(O, 7.0, cut)
    fit = entropy_fit(tab)
    S.add("octagon entropy estimate (L=7)", fit.headline, fit.headline > 0, "> 0")
    S.add("octagon window spread", fit.spread, fit.spread <= 0.10, "<= 0.10")
    lam = 2.0
    tab2 = count_closed_geodesics(O.scaled(lam), lam * 5.0, [lam * c for c in cut if c <= 5.0])
    tab1 = count_closed_geodesics(O, 5.0, [c for c in cut if c <= 5.0])
    S.add("scaled surface: identical counts at lam L", tab2.N == tab1.N, tab2.N == tab1.N, "== True")
    f1, f2 = entropy_fit(tab1), entropy_fit(tab2)
    S.add("scaled surface: estimate(lam S) == estimate(S)/lam", f2.headline - f1.headline / lam,
          f2.headline == f1.headline / lam, "== 0 exactly")
    S.add("monotonicity: larger lengths give smaller estimate", f2.headline, f2.headline <= f1.headline, "<= estimate(S)")

    T = square_torus()
    tt = count_closed_geodesics(T, 40.0, [float(k) for k in range(2, 41)])
    ft = entropy_fit(tt)
    S.add("torus headline estimate (L=40)", ft.headline, ft.headline <= 0.1, "<= 0.1")
    small = count_closed_geodesics(T, 2.2, [1.5, 2.2])
    S.add("torus N(2.2)", small.N[1], small.N[1] == 4, "== 4")
    lattice = sum(1 for a in range(-3, 4) for b in range(0, 4)
                  if math.gcd(a, b) == 1 and (b > 0 or a > 0) and math.hypot(a, b) <= 1.5)
    S.add("torus N(1.5) matches coprime lattice count", small.N[0], small.N[0] == lattice, f"== {lattice}")
    curve = flat_bound_curve(fit.headline, [1, 4, 16])
    ok = all(abs(b - fit.headline / math.sqrt(t)) <= 1e-15 * fit.headline for t, b in curve)
    S.add("flat bound curve t^(-1/2) Ent", [b for _, b in curve], ok, "length-element convention")


SUITES: dict[str, Callable] = {
    "solver": suite_solver,
    "bounds": suite_bounds,
    "metric": suite_metric,
    "flat": suite_flat,
    "entropy": suite_entropy,
}


def run(suite: str = "all", cfg_case=None, seed: int = 0, tol: Optional[float] = None,
        progress: Optional[Callable[[Check], None]] = None) -> Report:
    names = SUITE_NAMES if suite == "all" else (suite,)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITE_NAMES)} or all")
    report = Report()
    t_all = time.perf_counter()
    for name in names:
        start = len(report.checks)
        t0 = time.perf_counter()
        try:
            SUITES[name](report, cfg_case, seed, tol)
        except Exception as exc:  # a crashing suite is a failed invariant, reported by name
            report.checks.append(Check(name, "suite completed", f"{type(exc).__name__}: {exc}",
                                       "no exception", False, repr(exc)))
        report.timings[name] = time.perf_counter() - t0
        if progress is not None:
            for c in report.checks[start:]:
                progress(c)
    report.timings["total"] = time.perf_counter() - t_all
    return report
