"""Induced metric of a solution and the estimates it satisfies.

The induced metric is ``g = 4 e^{psi1 - psi2} sigma``.  Comparisons with the
flat metric of ``q`` use the Euclidean factor ``4 |q|^{1/2}`` on the lattice
coordinate, so ``g / (4|q|^{1/2}) = e^{u1 - u2}`` with ``u_i`` the gaps to the
flat branch.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .bessel import bessel_oracle
from .domain import (ConformalBackground, DomainError, QuarticInput, area_of,
                     curvature_conformal, qnorm_sq)
from .solver import SolutionPair, SolverError, SolverOptions, solve_hitchin

log = logging.getLogger(__name__)

LOG43 = math.log(4.0 / 3.0)


@dataclass(frozen=True, eq=False)
class InducedMetric:
    g: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    kappa_g: np.ndarray
    kappa_g_operator: np.ndarray

    @property
    def two_route_gap(self) -> float:
        d = np.abs(self.kappa_g - self.kappa_g_operator)
        return float(np.nanmax(d))


def induced_metric(pair: SolutionPair, bg: ConformalBackground, q: QuarticInput) -> InducedMetric:
    """``g``, ``f1``, ``f2`` and the curvature of ``g`` by two routes.

    ``kappa_g = (f1 + f2 - 2) / 2`` uses the equations; ``kappa_g_operator``
    applies the discrete curvature operator to ``g`` directly.
    """
    Q = qnorm_sq(bg, q)
    e12 = np.exp(pair.psi1 - pair.psi2)
    g = 4.0 * e12 * bg.sigma
    f1 = np.exp(-2 * pair.psi1) * Q / e12
    f2 = np.exp(2 * pair.psi2) / e12
    kappa = 0.5 * (f1 + f2 - 2.0)
    kop = curvature_conformal(g, bg)
    if not bg.periodic:
        kappa = np.where(bg.interior, kappa, np.nan)
    return InducedMetric(g, f1, f2, kappa, kop)


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class RegionArea:
    name: str
    area_g: float
    area_flat: float
    ratio: float
    upper_bound: float
    asserted: bool

    @property
    def holds(self) -> bool:
        return self.area_flat <= self.area_g * (1 + 1e-12) and self.area_g <= self.upper_bound


@dataclass(frozen=True)
class BoundReport:
    """Margins of the pointwise and area estimates on the evaluated nodes.

    ``dom_flat_min`` is ``None`` when ``q`` vanishes identically and
    ``dom_const_min`` is ``None`` on flat backgrounds.
    """

    three_min: float
    three_max: float
    dom_flat_min: Optional[float]
    dom_const_min: Optional[float]
    kappa_g_max: float
    fsum_max: float
    regions: tuple = ()

    def checks(self, eps: float = 1e-6) -> dict:
        """Named invariant checks ``name -> (value, ok)``."""
        out = {
            "3psi2-psi1 >= 0": (self.three_min, self.three_min >= -eps),
            "3psi2-psi1 <= log(4/3)": (self.three_max, self.three_max <= LOG43 + eps),
            "kappa(g) < 0": (self.kappa_g_max, self.kappa_g_max < eps),
            "f1+f2 < 2": (self.fsum_max, self.fsum_max < 2 + eps),
        }
        if self.dom_flat_min is not None:
            out["g >= 4|q|^1/2"] = (self.dom_flat_min, self.dom_flat_min >= 1 - eps)
        if self.dom_const_min is not None:
            out["g >= -3 kappa sigma"] = (self.dom_const_min, self.dom_const_min >= 1 - eps)
        for r in self.regions:
            if r.asserted:
                out[f"area bound [{r.name}]"] = (r.ratio, r.holds)
        return out

    def failures(self, eps: float = 1e-6) -> list[str]:
        return [k for k, (_, ok) in self.checks(eps).items() if not ok]

    def as_dict(self) -> dict:
        return {
            "three_min": self.three_min,
            "three_max": self.three_max,
            "dom_flat_min": self.dom_flat_min,
            "dom_const_min": self.dom_const_min,
            "kappa_g_max": self.kappa_g_max,
            "fsum_max": self.fsum_max,
            "regions": [r.__dict__ | {"holds": r.holds} for r in self.regions],
        }


def bound_report(pair: SolutionPair, bg: ConformalBackground, q: QuarticInput,
                 regions: Optional[dict] = None, chi: Optional[int] = None) -> BoundReport:
    """Evaluate every pointwise and area estimate on the solution.

    ``regions`` maps names to boolean masks (default: the whole domain).  The
    area upper bound ``1.5 Area(R, 4|q|^1/2) + 6 pi |chi|`` is asserted only on
    closed (torus) backgrounds; on disk patches it is reported with the given
    ``chi`` surrogate (default 0, leaving the bare 3/2 factor).
    """
    nodes = bg.interior
    im = induced_metric(pair, bg, q)
    three = (3 * pair.psi2 - pair.psi1)[nodes]
    absq = q.modulus
    nz = nodes & (absq > 0)
    flat = 4.0 * np.sqrt(absq)
    dom_flat = float(np.min(im.g[nz] / flat[nz])) if nz.any() else None
    kc = bg.kappa_constant
    if bg.periodic and kc is not None and abs(kc) < 1e-12:
        dom_const = None
    else:
        kap = bg.kappa[nodes]
        dom_const = float(np.min(im.g[nodes] / (-3.0 * kap * bg.sigma[nodes])))
    chi_eff = bg.euler_characteristic if bg.periodic else (0 if chi is None else chi)
    regions = regions or {"domain": nodes}
    recs = []
    for name, mask in regions.items():
        mask = np.asarray(mask, dtype=bool) & nodes
        ag = area_of(im.g, bg, mask)
        af = area_of(flat, bg, mask)
        recs.append(RegionArea(name, ag, af, ag / af if af > 0 else math.inf,
                               1.5 * af + 6 * math.pi * abs(chi_eff), bg.periodic))
    return BoundReport(
        float(three.min()), float(three.max()), dom_flat, dom_const,
        float(np.nanmax(im.kappa_g[nodes])), float(np.max((im.f1 + im.f2)[nodes])),
        tuple(recs),
    )


# ---------------------------------------------------------------------------
# flat distances


def _poly(q: QuarticInput):
    if q.form == "constant":
        c = complex(q.coefficients[0]) * q.scale
        return lambda z: np.full(np.shape(z), c, dtype=complex)
    if q.form != "polynomial":
        raise DomainError("flat distances need a constant or polynomial differential")
    coeffs = np.asarray(q.coefficients, dtype=complex) * q.scale
    return lambda z: np.polynomial.polynomial.polyval(z, coeffs)


_GL_T, _GL_W = np.polynomial.legendre.leggauss(24)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


def flat_segment_length(q: QuarticInput, a: complex, z) -> np.ndarray:
    """``int |q|^{1/4} |dz|`` along straight segments from ``a`` to each ``z``."""
    f = _poly(q)
    z = np.asarray(z, dtype=complex)
    dz = z - a
    pts = a + dz[..., None] * _GL_T
    return np.abs(dz) * (np.abs(f(pts)) ** 0.25 @ _GL_W)


def flat_displacement(q: QuarticInput, a: complex, z) -> np.ndarray:
    """``|int_a^z q^{1/4} dz|`` along straight segments, branch followed continuously."""
    f = _poly(q)
    z = np.asarray(z, dtype=complex)
    dz = z - a
    n = 48
    t = (np.arange(n) + 0.5) / n
    pts = a + dz[..., None] * t
    roots = f(pts) ** 0.25
    # follow the branch of q^{1/4} continuously along the segment
    ref = complex(f(np.array([a]))[0]) ** 0.25
    prev = np.full(z.shape, ref, dtype=complex)
    out = np.empty_like(roots)
    rot = np.array([1, 1j, -1, -1j])
    for k in range(n):
        cand = roots[..., k, None] * rot
        pick = np.argmin(np.abs(cand - prev[..., None]), axis=-1)
        cur = np.take_along_axis(cand, pick[..., None], axis=-1)[..., 0]
        out[..., k] = cur
        prev = cur
    return np.abs(dz * out.mean(axis=-1))


def flat_distance_to_zeros(bg: ConformalBackground, q: QuarticInput, points=None) -> np.ndarray:
    """Straight-segment flat distance from the zeros of ``q`` (exact for monomials).

    Returns ``inf`` everywhere when ``q`` has no zeros.
    """
    pts = bg.z if points is None else np.asarray(points, dtype=complex)
    zs = q.zeros()
    if not zs:
        return np.full(np.shape(pts), np.inf)
    return np.min([flat_segment_length(q, z0, pts) for z0 in zs], axis=0)


def flat_area(bg: ConformalBackground, q: QuarticInput) -> float:
    """``||q|| = Area(|q|^{1/2})`` over the active lattice."""
    return area_of(np.sqrt(q.modulus), bg)


def far_mask(bg: ConformalBackground, q: QuarticInput, eps_frac: float = 0.15) -> np.ndarray:
    """Nodes at flat distance ``>= 2 eps`` from the zeros, ``eps = eps_frac * max distance``."""
    d = flat_distance_to_zeros(bg, q)
    if not np.isfinite(d).any():
        return bg.interior.copy()
    eps = eps_frac * float(np.max(d[bg.active]))
    return bg.interior & (d >= 2 * eps)


# ---------------------------------------------------------------------------
# decay near high energy


@dataclass(frozen=True, eq=False)
class DecayProfile:
    center: complex
    radii: np.ndarray
    points: np.ndarray
    values: np.ndarray
    flat_distance: np.ndarray
    unit_distance: np.ndarray
    qnorm: float
    rate: float
    rate_flat: float
    C: float
    a: float
    r: float
    center_value: float
    oracle_center: float
    oracle_values: np.ndarray

    @property
    def within_oracle(self) -> bool:
        return self.center_value <= self.oracle_center


def gap_fields(pair: SolutionPair, bg: ConformalBackground, q: QuarticInput):
    """``u1 = psi1 - log ||q||^{3/4}``, ``u2 = psi2 - log ||q||^{1/4}`` (NaN at zeros)."""
    Q = qnorm_sq(bg, q)
    with np.errstate(divide="ignore"):
        lq = np.where(Q > 0, 0.25 * np.log(np.where(Q > 0, Q, 1.0)), np.nan)
    return pair.psi1 - 1.5 * lq, pair.psi2 - 0.5 * lq


def _sample(field_, bg: ConformalBackground, pts):
    j = (pts.imag - bg.y.min()) / bg.hy
    i = (pts.real - bg.x.min()) / bg.hx
    return ndimage.map_coordinates(field_, [j, i], order=1, mode="nearest")


def decay_compare(pair: SolutionPair, bg: ConformalBackground, q: QuarticInput, center: complex,
                  radii: Sequence[float], ball_fraction: float = 0.5,
                  floor: float = 1e-13) -> DecayProfile:
    """Profile of ``u1 + u2`` along the ray from the nearest zero through ``center``.

    ``radii`` are lattice-coordinate offsets from ``center`` along that ray.
    The rate is the negative least-squares slope of ``log(u1+u2)`` against
    the unit-area flat distance over the inner half of the radii (values
    above ``floor`` only).  The comparison ball has flat radius
    ``ball_fraction`` times the distance to the zeros, capped by the distance
    to the boundary ring.
    """
    if not q.holomorphic:
        raise DomainError("decay comparison needs a holomorphic differential")
    zs = q.zeros()
    center = complex(center)
    if zs:
        d0 = [abs(center - z) for z in zs]
        if min(d0) < 1e-12:
            raise DomainError("center lies on a zero of q")
        z0 = zs[int(np.argmin(d0))]
        direction = (center - z0) / abs(center - z0)
    else:
        direction = 1.0
    radii = np.sort(np.asarray(radii, dtype=float))
    pts = center + radii * direction
    u1, u2 = gap_fields(pair, bg, q)
    s = u1 + u2
    vals = _sample(np.nan_to_num(s, nan=0.0), bg, pts)
    dist = flat_distance_to_zeros(bg, q, pts)
    qn = flat_area(bg, q)
    unit = dist / math.sqrt(qn)

    inner = np.arange(len(radii)) < max(2, len(radii) // 2)
    ok = inner & (vals > floor) & np.isfinite(unit)
    if ok.sum() >= 2:
        slope = np.polyfit(unit[ok], np.log(vals[ok]), 1)[0]
        rate = -float(slope)
    else:
        rate = float("nan")
    rate_flat = rate / math.sqrt(qn)

    # comparison ball around the center
    disp = flat_displacement(q, center, bg.z)
    dz = float(flat_distance_to_zeros(bg, q, np.array([center]))[0])
    ring = bg.active & ~bg.interior
    d_edge = float(np.min(disp[ring])) if ring.any() else math.inf
    r = min(ball_fraction * dz, 0.95 * d_edge)
    if not math.isfinite(r):
        # no zeros and no rim (torus): stay inside one fundamental domain
        r = 0.5 * ball_fraction * float(np.max(disp[bg.active]))
    cell = np.abs(_poly(q)(bg.z)) ** 0.25 * max(bg.hx, bg.hy)
    ball = bg.interior & (disp <= r)
    band_w = 2.0 * float(np.max(cell[ball])) if ball.any() else 0.0
    band = bg.interior & (np.abs(disp - r) <= band_w)
    C = float(np.max(s[band]))
    ext = bg.interior & (disp <= r + band_w)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(np.abs(s) > 1e-300, np.expm1(2 * s) / (2 * s), 1.0)
    a = float(np.min((np.exp(-2 * u1) * ratio)[ext]))
    center_value = float(_sample(np.nan_to_num(s, nan=0.0), bg, np.array([center]))[0])
    oracle_center = float(bessel_oracle(0.0, C, a, r))
    rho = flat_displacement(q, center, pts)
    ov = np.where(rho <= r, bessel_oracle(np.minimum(rho, r), C, a, r), np.nan)
    return DecayProfile(center, radii, pts, vals, dist, unit, qn, rate, rate_flat,
                        C, a, r, center_value, oracle_center, ov)


# ---------------------------------------------------------------------------
# ray sweep


@dataclass(frozen=True, eq=False)
class RayStep:
    t: float
    solution: Optional[SolutionPair]
    min_increment: float
    ratio_deviation: float
    area_ratio: float
    error: Optional[str] = None


@dataclass(frozen=True, eq=False)
class RaySweepReport:
    steps: tuple

    @property
    def t_values(self) -> list:
        return [s.t for s in self.steps]

    @property
    def ok(self) -> bool:
        return all(s.error is None for s in self.steps)

    def increments_positive(self) -> bool:
        return all(s.min_increment > 0 for s in self.steps[1:])

    def deviation_shrinking(self) -> bool:
        dev = [s.ratio_deviation for s in self.steps]
        return all(b < a for a, b in zip(dev, dev[1:]))

    def rows(self) -> list[tuple]:
        return [(s.t, s.min_increment, s.ratio_deviation, s.area_ratio) for s in self.steps]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HITCHIN_LAB_THREADS", "1")))
    except ValueError:
        return 1


def ray_sweep(bg: ConformalBackground, q: QuarticInput, t_list: Sequence[float],
              opts: Optional[SolverOptions] = None, eps_frac: float = 0.15,
              warm_start: bool = True, threads: Optional[int] = None) -> RaySweepReport:
    """Solve along ``t q`` and record monotonicity and flat-limit diagnostics.

    With ``warm_start`` the solves run sequentially, each initialized from
    the previous ``t``; otherwise they run on a thread pool capped by
    ``HITCHIN_LAB_THREADS``.
    """
    ts = [float(t) for t in t_list]
    if not ts or any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t values must be positive and strictly increasing")
    if q.is_zero:
        raise DomainError("ray sweep needs q != 0")
    opts = opts or SolverOptions()
    mask = far_mask(bg, q, eps_frac)
    nodes = bg.interior

    def one(t, init=None):
        try:
            return solve_hitchin(bg, q.scaled(t), opts, init=init), None
        except (SolverError, DomainError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    results = []
    if warm_start:
        prev = None
        for t in ts:
            sol, err = one(t, prev)
            results.append((sol, err))
            prev = sol if sol is not None else prev
    else:
        with ThreadPoolExecutor(max_workers=threads or _threads()) as ex:
            results = list(ex.map(one, ts))

    steps = []
    prev = None
    for t, (sol, err) in zip(ts, results):
        if sol is None:
            steps.append(RayStep(t, None, math.nan, math.nan, math.nan, err))
            prev = None
            continue
        d12 = sol.psi1 - sol.psi2
        inc = float(np.min((d12 - prev)[nodes])) if prev is not None else math.nan
        g = 4.0 * np.exp(d12) * bg.sigma
        flat = 4.0 * math.sqrt(t) * np.sqrt(q.modulus)
        m = mask & (flat > 0)
        dev = float(np.max(np.abs(g[m] / flat[m] - 1.0))) if m.any() else math.nan
        ar = area_of(g, bg, nodes) / area_of(flat, bg, nodes)
        steps.append(RayStep(t, sol, inc, dev, ar))
        prev = d12
    return RaySweepReport(tuple(steps))
