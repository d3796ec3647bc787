"""Saddle connections, closed geodesics and systoles on flat cone surfaces.

Saddle connections are found by unfolding: from every corner, the wedge of
directions is pushed through the polygon complex, narrowing at each edge,
and every vertex seen strictly inside the wedge within the length bound is
recorded.  Each corner owns the half-open range of directions
``[outgoing edge, incoming edge)`` so that every oriented connection is
produced exactly once.

Closed geodesics are cycles of saddle connections whose junction angles are
at least ``pi`` on both sides, plus the flat cylinders bounded by such
cycles.  A free homotopy class without cone points on its geodesic
representative sweeps a cylinder whose two boundary chains have all
junction angles equal to ``pi`` on the cylinder side; such chains are
counted with weight 1/2 per straight side so the cylinder counts once.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional

from .surface import FlatSurface, Frame, SurfaceError, cross

ANGLE_TOL = 1e-9
REL_EPS = 1e-12


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SaddleConnection:
    index: int
    start_class: int
    start_corner: tuple
    theta_start: float
    end_class: int
    end_corner: tuple
    theta_end: float
    vector: complex
    length: float

    @property
    def holonomy(self) -> complex:
        return self.vector


def _angle_from(ref: complex, d: complex) -> float:
    """Counterclockwise angle from ``ref`` to ``d`` in ``[0, 2 pi)``."""
    a = math.atan2(cross(ref, d), (ref.conjugate() * d).real)
    return a + 2 * math.pi if a < 0 else a


def _strictly_inside(R: complex, Lw: complex, d: complex) -> bool:
    return (cross(R, d) > REL_EPS * abs(R) * abs(d)
            and cross(d, Lw) > REL_EPS * abs(d) * abs(Lw))


def _seg_dist(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    t = ((p - a).conjugate() * ab).real / (abs(ab) ** 2)
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def saddle_connections(surface: FlatSurface, L: float, budget: int = 5_000_000) -> list[SaddleConnection]:
    """All oriented saddle connections of length ``<= L`` (relative slack 1e-12).

    Every vertex class counts as an endpoint, including marked points of
    angle ``2 pi``.  Sorted by length, then by start class and angle.
    """
    if not L > 0:
        raise ValueError("length bound must be positive")
    Lc = L * (1 + REL_EPS)
    found = []
    visits = 0

    def record(corner, d, end_corner, back_local):
        P, i = corner
        poly = surface.polygons[P]
        d_out = poly[(i + 1) % len(poly)] - poly[i]
        ts = surface.corner_offset[corner] + _angle_from(d_out, d)
        Q, m = end_corner
        qpoly = surface.polygons[Q]
        q_out = qpoly[(m + 1) % len(qpoly)] - qpoly[m]
        ec = surface.vertex_class[end_corner]
        a = _angle_from(q_out, back_local)
        if a > surface.corner_angle[end_corner] + ANGLE_TOL:
            # back direction sits on the outgoing edge from the far side (angle ~ 2 pi)
            a = 0.0
        te = (surface.corner_offset[end_corner] + a) % surface.cone_angles[ec]
        found.append((abs(d), surface.vertex_class[corner], ts, corner, ec, te, end_corner, d))

    for P, poly in enumerate(surface.polygons):
        m = len(poly)
        for i in range(m):
            corner = (P, i)
            v = poly[i]
            R = poly[(i + 1) % m] - v
            Lw = poly[i - 1] - v
            # the outgoing edge itself
            if abs(R) <= Lc:
                record(corner, R, (P, (i + 1) % m), -R)
            for j in range(m):
                if j in (i, (i + 1) % m, (i - 1) % m):
                    continue
                dv = poly[j] - v
                if abs(dv) <= Lc and _strictly_inside(R, Lw, dv):
                    record(corner, dv, (P, j), -dv)
            stack = []
            ident = Frame()
            for j in range(m):
                if j in (i, (i - 1) % m):
                    continue
                A, B = poly[j], poly[(j + 1) % m]
                if _seg_dist(v, A, B) > Lc:
                    continue
                stack.append((ident, P, j, R, Lw))
            while stack:
                F, Pc, j, R0, L0 = stack.pop()
                # narrow the wedge to edge j of polygon Pc (developed by F)
                pc = surface.polygons[Pc]
                A = F(pc[j]) - v
                B = F(pc[(j + 1) % len(pc)]) - v
                nR = A if cross(R0, A) > 0 else R0
                nL = B if cross(B, L0) > 0 else L0
                if cross(nR, nL) <= REL_EPS * abs(nR) * abs(nL):
                    continue
                visits += 1
                if visits > budget:
                    raise BudgetExceeded(f"saddle enumeration exceeded {budget} polygon visits")
                e = surface.edge_id(Pc, j)
                f = surface.partner[e]
                Q, jin = surface.local(f)
                G = F.compose(surface.transition(e))
                qpoly = surface.polygons[Q]
                mq = len(qpoly)
                W = [G(z) for z in qpoly]
                for k in range(mq):
                    if k in (jin, (jin + 1) % mq):
                        continue
                    dv = W[k] - v
                    if abs(dv) <= Lc and _strictly_inside(nR, nL, dv):
                        record(corner, dv, (Q, k), G.inverse().vec(-dv))
                for k in range(mq):
                    if k == jin:
                        continue
                    a, b = W[k], W[(k + 1) % mq]
                    if cross(b - a, v - a) <= 0:
                        continue
                    if _seg_dist(v, a, b) > Lc:
                        continue
                    stack.append((G, Q, k, nR, nL))
    found.sort(key=lambda t: (t[0], t[1], t[2]))
    return [SaddleConnection(n, c, corner, ts, ec, ecorner, te, d, ln)
            for n, (ln, c, ts, corner, ec, te, ecorner, d) in enumerate(found)]


# ---------------------------------------------------------------------------
# closed geodesics


@dataclass(frozen=True)
class ClosedGeodesic:
    saddles: tuple
    length: float
    right_straight: bool
    left_straight: bool

    @property
    def weight(self) -> float:
        """1 for an isolated geodesic, 1/2 per straight side bounding a cylinder."""
        s = int(self.right_straight) + int(self.left_straight)
        return 1.0 if s == 0 else 0.5 * s


class _Index:
    """Saddles grouped by start class and sorted by start angle."""

    def __init__(self, surface: FlatSurface, saddles):
        self.surface = surface
        self.by_class = {}
        for s in saddles:
            self.by_class.setdefault(s.start_class, []).append(s)
        self.angles = {}
        for c, lst in self.by_class.items():
            lst.sort(key=lambda s: s.theta_start)
            self.angles[c] = [s.theta_start for s in lst]

    def find(self, c: int, theta: float, tol: float = 1e-8) -> Optional[SaddleConnection]:
        lst = self.by_class.get(c, [])
        if not lst:
            return None
        T = self.surface.cone_angles[c]
        theta %= T
        angs = self.angles[c]
        k = bisect.bisect_left(angs, theta)
        for idx in (k - 1, k, (k + 1) % len(lst), 0, len(lst) - 1):
            if 0 <= idx < len(lst):
                d = abs(angs[idx] - theta)
                if min(d, T - d) <= tol:
                    return lst[idx]
        return None

    def successors(self, s: SaddleConnection) -> list:
        """Saddles leaving ``s``'s endpoint at junction angle ``>= pi`` on both sides."""
        c = s.end_class
        lst = self.by_class.get(c, [])
        T = self.surface.cone_angles[c]
        out = []
        lo = (s.theta_end + math.pi - ANGLE_TOL)
        width = T - 2 * math.pi + 2 * ANGLE_TOL
        if width < 0:
            return out
        for t in lst:
            d = (t.theta_start - lo) % T
            if d <= width:
                out.append(t)
        return out


def _junction(surface, s1, s2) -> float:
    """Right-side angle at the junction from ``s1`` into ``s2``."""
    T = surface.cone_angles[s1.end_class]
    return (s2.theta_start - s1.theta_end) % T


def _canonical(seq):
    n = len(seq)
    return min(tuple(seq[i:] + seq[:i]) for i in range(n))


def _is_primitive(seq) -> bool:
    n = len(seq)
    for p in range(1, n):
        if n % p == 0 and seq == seq[p:] + seq[:p]:
            return False
    return True


def closed_geodesics(surface: FlatSurface, L: float, saddles=None,
                     budget: int = 20_000_000) -> list[ClosedGeodesic]:
    """Primitive unoriented closed geodesics through cone points of length ``<= L``.

    Marked points of angle ``2 pi`` only allow straight junctions.
    """
    Lc = L * (1 + REL_EPS)
    if saddles is None:
        saddles = saddle_connections(surface, L)
    saddles = [s for s in saddles if s.length <= Lc]
    if not saddles:
        return []
    idx = _Index(surface, saddles)
    rev = reverse_map(surface, saddles, idx)
    pos = {s.index: n for n, s in enumerate(saddles)}
    lengths = [s.length for s in saddles]
    min_len = min(lengths)
    succ = {s.index: sorted((t.index for t in idx.successors(s)), key=lambda i: lengths[pos[i]])
            for s in saddles}
    closers = {i: frozenset(v) for i, v in succ.items()}
    seen = set()
    out = []
    steps = 0

    def close(path):
        # path returns to its first connection: record the cycle once
        if not _is_primitive(path):
            return
        key = _canonical(path)
        rkey = _canonical([rev[i] for i in reversed(path)])
        ck = min(key, rkey)
        if ck not in seen:
            seen.add(ck)
            out.append(_make_geodesic(surface, saddles, pos, list(ck)))

    # every cycle is generated from a rotation starting at its smallest index
    for s0 in saddles:
        i0 = s0.index
        path = [i0]
        total = lengths[pos[i0]]
        if i0 in closers[i0]:
            close(path)
        stack = [iter(succ[i0])]
        while stack:
            steps += 1
            if steps > budget:
                raise BudgetExceeded(f"closed geodesic search exceeded {budget} steps")
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                last = path.pop()
                total -= lengths[pos[last]]
                continue
            if nxt < i0:
                continue
            ln = lengths[pos[nxt]]
            if total + ln > Lc:
                # successors are sorted by length: nothing further fits
                stack[-1] = iter(())
                continue
            can_close = i0 in closers[nxt]
            if total + ln + min_len > Lc and not can_close:
                continue
            path.append(nxt)
            total += ln
            if can_close:
                close(path)
            stack.append(iter(succ[nxt]))
    out.sort(key=lambda g: (g.length, g.saddles))
    return out


def reverse_map(surface: FlatSurface, saddles, idx=None) -> dict:
    """``index -> index`` of the same connection traversed backwards."""
    idx = idx or _Index(surface, saddles)
    rev = {}
    for s in saddles:
        r = idx.find(s.end_class, s.theta_end)
        if r is None or abs(r.length - s.length) > 1e-9 * max(1.0, s.length):
            raise SurfaceError(f"no reverse for saddle connection {s.index}")
        rev[s.index] = r.index
    return rev


def _make_geodesic(surface, saddles, pos, seq) -> ClosedGeodesic:
    right_all = left_all = True
    for a, b in zip(seq, seq[1:] + seq[:1]):
        s1, s2 = saddles[pos[a]], saddles[pos[b]]
        T = surface.cone_angles[s1.end_class]
        d = _junction(surface, s1, s2)
        right_all &= abs(d - math.pi) <= 1e-7
        left_all &= abs((T - d) - math.pi) <= 1e-7
    length = sum(saddles[pos[i]].length for i in seq)
    return ClosedGeodesic(tuple(seq), length, right_all, left_all)


@dataclass(frozen=True)
class SaddleReport:
    L: float
    saddles: tuple          # unoriented representatives
    systole: float
    systole_curves: tuple


def unoriented(surface: FlatSurface, saddles) -> list[SaddleConnection]:
    """One representative per unoriented saddle connection (the lower index)."""
    rev = reverse_map(surface, saddles)
    return [s for s in saddles if s.index <= rev[s.index]]


def systole_and_saddles(surface: FlatSurface, L: float, budget: int = 5_000_000) -> SaddleReport:
    """Saddle connections up to ``L`` and the shortest closed geodesic among them.

    Raises ``ValueError`` when no closed geodesic of length ``<= L`` exists.
    """
    sc = saddle_connections(surface, L, budget)
    geos = closed_geodesics(surface, L, sc)
    if not geos:
        raise ValueError(f"no closed geodesic of length <= {L}; increase L")
    sys_len = geos[0].length
    short = tuple(g for g in geos if g.length <= sys_len * (1 + 1e-12))
    return SaddleReport(L, tuple(unoriented(surface, sc)), sys_len, short)
