"""Lengths of closed geodesics in combinatorially presented homotopy classes.

A class is a cyclic word of edge crossings: entry ``e`` means leaving the
polygon that owns ``e`` through ``e``.  The word is developed into the plane
over several periods, the shortest path through the resulting sleeve is
found with a funnel, and every bend at a cone point is tested.  A bend is
locally geodesic when the angles on both sides are at least ``pi``; the
sleeve side always satisfies this, so only the other side is checked.  When
it fails, the corridor is rerouted around the opposite side of the cone
point (which strictly shortens the representative) and the search repeats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .surface import FlatSurface, Frame, SurfaceError, cross

ANGLE_TOL = 1e-9
POINT_TOL = 1e-9


class CorridorError(SurfaceError):
    pass


class MoveBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CurveClass:
    """Closed corridor ``word`` or torus shorthand ``torus = (p, q)``."""

    word: Optional[tuple] = None
    torus: Optional[tuple] = None

    def __post_init__(self):
        if (self.word is None) == (self.torus is None):
            raise CorridorError("give exactly one of word or torus shorthand")
        if self.word is not None:
            object.__setattr__(self, "word", tuple(int(e) for e in self.word))
        else:
            p, q = self.torus
            if int(p) != p or int(q) != q or (p, q) == (0, 0):
                raise CorridorError("torus shorthand needs a nonzero integer pair")
            object.__setattr__(self, "torus", (int(p), int(q)))

    @classmethod
    def from_word(cls, word) -> "CurveClass":
        return cls(word=tuple(word))

    @classmethod
    def from_torus(cls, p: int, q: int) -> "CurveClass":
        return cls(torus=(p, q))


@dataclass(frozen=True)
class Bend:
    vertex_class: int
    point: complex          # developed coordinates
    sleeve_angle: float     # angle on the sleeve side
    other_angle: float      # total cone angle minus sleeve_angle


@dataclass
class GeodesicResult:
    length: float
    path: list              # developed vertices of one period (closed: last = image of first)
    bends: list             # Bend per cone point touched in one period
    word: tuple             # tightened corridor
    moves: int
    holonomy: Frame = field(default_factory=Frame)

    @property
    def incidences(self) -> list[int]:
        return [b.vertex_class for b in self.bends]


# -- corridor bookkeeping ------------------------------------------------

def check_corridor(surface: FlatSurface, word: Sequence[int]) -> tuple:
    word = tuple(int(e) for e in word)
    if not word:
        raise CorridorError("empty corridor (contractible class)")
    n = surface.n_edges
    for e in word:
        if not 0 <= e < n:
            raise CorridorError(f"edge {e} out of range")
    for a, b in zip(word, word[1:] + word[:1]):
        if surface.owner[surface.partner[a]] != surface.owner[b]:
            raise CorridorError(f"corridor not closed between crossings {a} and {b}")
    return word


def free_reduce(surface: FlatSurface, word: Sequence[int]) -> tuple:
    """Cancel crossings immediately undone (``e`` followed by its partner), cyclically."""
    out: list[int] = []
    for e in word:
        if out and surface.partner[out[-1]] == e:
            out.pop()
        else:
            out.append(e)
    while len(out) >= 2 and surface.partner[out[-1]] == out[0]:
        out = out[1:-1]
    return tuple(out)


def _rotate(surface: FlatSurface, corner, ccw: bool):
    """Step to the neighboring corner around the same vertex; returns (corner, crossed edge)."""
    P, i = corner
    if ccw:
        return surface.ccw_next(corner), surface.edge_id(P, i - 1)
    return surface.cw_next(corner), surface.edge_id(P, i)


def _fan_crossings(surface: FlatSurface, start, end, ccw: bool) -> list[int]:
    """Edges crossed rotating from corner ``start`` to corner ``end``."""
    out = []
    c = start
    for _ in range(len(surface.corner_angle) + 1):
        if c == end:
            return out
        c, e = _rotate(surface, c, ccw)
        out.append(e)
    raise CorridorError("corners do not share a vertex")


def _run_rotation(surface: FlatSurface, word, s: int, t: int, corner_s):
    """Rotation direction and end corner for the crossings ``word[s..t]`` around a vertex."""
    P, i = corner_s
    e = word[s % len(word)]
    if e == surface.edge_id(P, i - 1):
        ccw = True
    elif e == surface.edge_id(P, i):
        ccw = False
    else:
        raise CorridorError("run does not rotate around the vertex")
    c = corner_s
    for j in range(s, t + 1):
        c, crossed = _rotate(surface, c, ccw)
        if crossed != word[j % len(word)]:
            raise CorridorError("run does not rotate around the vertex")
    return ccw, c


def swing(surface: FlatSurface, word: Sequence[int], s: int, t: int, corner_s) -> tuple:
    """Reroute crossings ``s..t`` (cyclic indices) around the other side of their common vertex.

    ``corner_s`` is the corner at that vertex in the polygon before crossing
    ``s``.  The result is freely homotopic to the input.
    """
    word = list(word)
    n = len(word)
    if t - s + 1 > n:
        raise CorridorError("run wraps the whole corridor")
    ccw, end = _run_rotation(surface, word, s, t, corner_s)
    repl = _fan_crossings(surface, corner_s, end, not ccw)
    idx = [j % n for j in range(s, t + 1)]
    keep = [word[j] for j in range(n) if j not in set(idx)]
    # rotate so the run sits at the end, then splice
    start = (t + 1) % n
    rest = [word[(start + j) % n] for j in range(n - len(idx))]
    assert sorted(rest) == sorted(keep)
    return tuple(rest + repl)


def insert_backtrack(surface: FlatSurface, word: Sequence[int], pos: int, edge: int) -> tuple:
    """Insert the null pair (``edge``, partner) before position ``pos``."""
    word = list(word)
    P = surface.owner[word[pos % len(word)]]
    if surface.owner[edge] != P:
        raise CorridorError("backtrack edge must belong to the current polygon")
    return tuple(word[:pos] + [edge, surface.partner[edge]] + word[pos:])


# -- development and funnel ----------------------------------------------

def _develop(surface: FlatSurface, word, periods: int):
    """Frames of each visited polygon and the portals (left, right) in the plane."""
    frames = [Frame()]
    portals = []
    n = len(word)
    for j in range(periods * n):
        e = word[j % n]
        F = frames[-1]
        a, b = surface.edge_points(e)
        portals.append((F(b), F(a)))
        frames.append(F.compose(surface.transition(e)))
    return frames, portals


def _close(a: complex, b: complex, scale: float) -> bool:
    return abs(a - b) <= POINT_TOL * max(1.0, scale)


def _funnel(start: complex, portals, end: complex, scale: float):
    """Simple stupid funnel.  Returns list of (point, portal index or None, side)."""
    pts = list(portals) + [(end, end)]
    path = [(start, None, None)]
    apex, left, right = start, start, start
    ai = li = ri = -1
    i = 0
    guard = 0
    while i < len(pts):
        guard += 1
        if guard > 50 * len(pts) + 100:
            raise CorridorError("funnel failed to progress")
        L, R = pts[i]
        if ai >= 0 and (_close(L, apex, scale) or _close(R, apex, scale)):
            # still rotating around the apex vertex: the funnel restarts past it
            left = right = apex
            li = ri = i
            i += 1
            continue
        # right side
        if cross(right - apex, R - apex) >= 0:
            if _close(apex, right, scale) or cross(left - apex, R - apex) < 0:
                right, ri = R, i
            else:
                if _close(left, end, scale):
                    break
                if not _close(left, path[-1][0], scale):
                    path.append((left, li, "L"))
                apex, ai = left, li
                left = right = apex
                li = ri = ai
                i = ai + 1
                continue
        # left side
        if cross(left - apex, L - apex) <= 0:
            if _close(apex, left, scale) or cross(right - apex, L - apex) > 0:
                left, li = L, i
            else:
                if _close(right, end, scale):
                    break
                if not _close(right, path[-1][0], scale):
                    path.append((right, ri, "R"))
                apex, ai = right, ri
                left = right = apex
                li = ri = ai
                i = ai + 1
                continue
        i += 1
    path.append((end, None, None))
    return path


def _unwrapped_angle(dirs) -> float:
    tot = 0.0
    for u, v in zip(dirs, dirs[1:]):
        tot += math.atan2(cross(u, v), (u.conjugate() * v).real)
    return abs(tot)


def _bend_data(surface, word, frames, portals, path, k, scale):
    """Run of portals around the bend ``path[k]`` and its sleeve-side angle."""
    v, idx, side = path[k]
    sel = 0 if side == "L" else 1
    s = t = idx
    while s - 1 >= 0 and _close(portals[s - 1][sel], v, scale):
        s -= 1
    while t + 1 < len(portals) and _close(portals[t + 1][sel], v, scale):
        t += 1
    dirs = [path[k - 1][0] - v]
    dirs += [portals[j][1 - sel] - v for j in range(s, t + 1)]
    dirs.append(path[k + 1][0] - v)
    beta = _unwrapped_angle(dirs)
    # corner at v in the polygon before crossing s
    n = len(word)
    e = word[s % n]
    P, i = surface.local(e)
    corner = (P, (i + 1) % len(surface.polygons[P])) if side == "L" else (P, i)
    cls = surface.vertex_class[corner]
    return s, t, corner, cls, beta


def _straight_through(path, H: Frame, frames, portals, lo: int, hi: int, scale: float) -> bool:
    """True when one segment of ``path`` crosses portals ``lo..hi`` parallel to the holonomy."""
    for (a, ia, _), (b, ib, _) in zip(path, path[1:]):
        ia = -1 if ia is None else ia
        ib = len(portals) + 1 if ib is None else ib
        if ia < lo and ib > hi:
            d = b - a
            return abs(cross(d, H.trans)) <= 1e-9 * abs(d) * abs(H.trans)
    return False


def _period_length(path, runs: dict, H: Frame, n: int, lo: int, hi: int, scale: float):
    """Length between the first bend whose run starts in ``[lo, hi)`` and its image one period on."""
    for k in sorted(runs):
        s0 = runs[k][0]
        if lo <= s0 < hi:
            target = H(path[k][0])
            for m in sorted(runs):
                if m > k and runs[m][0] == s0 + n and _close(path[m][0], target, scale):
                    seg = sum(abs(path[j + 1][0] - path[j][0]) for j in range(k, m))
                    return k, m, seg
            return None
    return None


def _tight(surface: FlatSurface, word, half_periods: int):
    n = len(word)
    periods = 2 * half_periods + 1
    frames, portals = _develop(surface, word, periods + 1)
    H = frames[n]
    if H.k == 0 and abs(H.trans) <= POINT_TOL:
        raise CorridorError("corridor has trivial holonomy; cannot tighten")
    scale = max(abs(z) for p in portals for z in p)
    L0, R0 = portals[0]
    x0 = 0.5 * (L0 + R0)
    Hk = Frame()
    for _ in range(periods):
        Hk = H.compose(Hk)
    path = _funnel(x0, portals[1:periods * n], Hk(x0), scale)
    # portal indices in the funnel are offset by one
    path = [(p, None if idx is None else idx + 1, side) for p, idx, side in path]
    return frames, portals, H, path, scale


@dataclass
class _Settled:
    word: tuple
    frames: list
    portals: list
    H: Frame
    path: list
    runs: dict
    lo: int
    span: Optional[tuple]   # (k0, k1) bend indices of one period, None when straight
    length: float
    bends: list
    moves: int
    scale: float


def _settle(surface: FlatSurface, word, max_moves: int, half_periods: int) -> _Settled:
    """Tighten ``word`` until every bend in one period is locally geodesic."""
    word = free_reduce(surface, check_corridor(surface, word))
    moves = 0
    while True:
        word = check_corridor(surface, word)
        n = len(word)
        hp = half_periods
        while True:
            frames, portals, H, path, scale = _tight(surface, word, hp)
            lo, hi = hp * n, (hp + 1) * n
            runs = {k: _bend_data(surface, word, frames, portals, path, k, scale)
                    for k, (_, idx, _) in enumerate(path) if idx is not None}
            has_bend = any(lo <= r[0] < hi for r in runs.values())
            if has_bend:
                per = _period_length(path, runs, H, n, lo, hi, scale)
                if per is not None:
                    break
            elif H.k == 0 and _straight_through(path, H, frames, portals, lo, hi, scale):
                break
            hp += 1
            if hp > 8:
                raise CorridorError("taut path does not settle into a period")
        if not has_bend:
            return _Settled(word, frames, portals, H, path, runs, lo, None, abs(H.trans), [], moves, scale)
        k0, k1, length = per
        bad = None
        bends = []
        for k in range(k0, k1):
            s, t, corner, cls, beta = runs[k]
            theta = surface.cone_angles[cls]
            other = theta - beta
            bends.append(Bend(cls, path[k][0], beta, other))
            if theta >= 2 * math.pi - ANGLE_TOL and other < math.pi - ANGLE_TOL and bad is None:
                bad = (s, t, corner)
        if bad is None:
            return _Settled(word, frames, portals, H, path, runs, lo, (k0, k1), length, bends, moves, scale)
        moves += 1
        if moves > max_moves:
            raise MoveBudgetExceeded(f"no geodesic representative after {max_moves} moves")
        s, t, corner = bad
        word = free_reduce(surface, swing(surface, word, s, t, corner))
        if not word:
            raise CorridorError("class is contractible")


def geodesic_length(surface: FlatSurface, curve, max_moves: int = 10_000,
                    half_periods: int = 2, puncture_radius: float = 0.0) -> GeodesicResult:
    """Length of the flat geodesic representative of a closed corridor.

    ``curve`` is a :class:`CurveClass` or a word.  Torus shorthand is
    evaluated on a single-parallelogram torus as ``|p u + q v|``.
    Bends at punctures (cone angle below ``2 pi``) are never rerouted; with
    ``puncture_radius > 0`` the path is kept outside that disk around an
    isolated puncture bend.
    """
    if not isinstance(curve, CurveClass):
        curve = CurveClass.from_word(curve)
    if curve.torus is not None:
        return _torus_length(surface, *curve.torus)
    st = _settle(surface, curve.word, max_moves, half_periods)
    if st.span is None:
        p0 = 0.5 * (st.portals[st.lo][0] + st.portals[st.lo][1])
        return GeodesicResult(st.length, [p0, st.H(p0)], [], st.word, st.moves, st.H)
    k0, k1 = st.span
    length = st.length
    if puncture_radius > 0:
        length += _puncture_correction(surface, st.path, k0, k1, st.bends, puncture_radius)
    pts = [st.path[k][0] for k in range(k0, k1 + 1)]
    return GeodesicResult(length, pts, st.bends, st.word, st.moves, st.H)


def _puncture_correction(surface, path, k0, k1, bends, rho) -> float:
    extra = 0.0
    for off, b in enumerate(bends):
        if not _is_puncture(surface, b):
            continue
        k = k0 + off
        v = path[k][0]
        if off > 0 and _is_puncture(surface, bends[off - 1]) or \
                off + 1 < len(bends) and _is_puncture(surface, bends[off + 1]):
            raise CorridorError("puncture radius needs isolated puncture bends")
        a, c = abs(path[k - 1][0] - v), abs(path[k + 1][0] - v)
        if min(a, c) <= rho:
            raise CorridorError("puncture neighborhood overlaps the path")
        alpha_a, alpha_c = math.acos(rho / a), math.acos(rho / c)
        phi = b.sleeve_angle - alpha_a - alpha_c
        extra += (math.sqrt(a * a - rho * rho) + math.sqrt(c * c - rho * rho) + rho * phi) - (a + c)
    return extra


def _is_puncture(surface, bend) -> bool:
    return surface.cone_angles[bend.vertex_class] < 2 * math.pi - ANGLE_TOL


# -- geodesic representatives as local pieces ----------------------------------

@dataclass
class Representative:
    """One period of a geodesic representative in polygon-local coordinates.

    ``chords`` are ``(polygon, a, b)`` straight pieces; ``passages`` are
    ``(vertex_class, theta_in, theta_out)`` angular positions of the incoming
    and outgoing directions at each cone point touched.
    """

    chords: list
    passages: list
    straight: bool
    holonomy: Frame
    length: float


GENERIC_SHIFT = 0.3819660112501051   # offset inside a cylinder, away from its midline


def _segment_hit(a: complex, b: complex, L: complex, R: complex) -> complex:
    d, e = b - a, R - L
    den = cross(d, e)
    if den == 0:
        raise CorridorError("path runs along a portal")
    t = cross(L - a, e) / den
    return a + t * d


def _local_angle(surface: FlatSurface, corner, d: complex) -> float:
    P, i = corner
    poly = surface.polygons[P]
    d_out = poly[(i + 1) % len(poly)] - poly[i]
    a = math.atan2(cross(d_out, d), (d_out.conjugate() * d).real)
    if a < -ANGLE_TOL:
        a += 2 * math.pi
    return (surface.corner_offset[corner] + max(a, 0.0)) % surface.cone_angles[surface.vertex_class[corner]]


def representative(surface: FlatSurface, curve, max_moves: int = 10_000,
                   half_periods: int = 2, shift: float = GENERIC_SHIFT) -> Representative:
    """Geodesic representative broken into polygon chords and cone passages.

    For a class realized by a flat cylinder, the core is placed at relative
    position ``shift`` across the cylinder so that distinct curves avoid
    coincidences.
    """
    if not isinstance(curve, CurveClass):
        curve = CurveClass.from_word(curve)
    if curve.torus is not None:
        curve = CurveClass.from_word(torus_word(surface, *curve.torus))
    st = _settle(surface, curve.word, max_moves, half_periods)
    n = len(st.word)
    F, portals, H = st.frames, st.portals, st.H
    chords = []

    def add_chord(j, a, b):
        if abs(b - a) <= POINT_TOL * max(1.0, st.scale):
            return
        inv = F[j].inverse()
        chords.append((surface.owner[st.word[j % n]], inv(a), inv(b)))

    if st.span is None:
        u = H.trans / abs(H.trans)
        nrm = 1j * u
        x0 = 0.5 * (portals[st.lo][0] + portals[st.lo][1])
        lo_c, hi_c = -math.inf, math.inf
        for j in range(st.lo, st.lo + n):
            dl = (nrm.conjugate() * (portals[j][0] - x0)).real
            dr = (nrm.conjugate() * (portals[j][1] - x0)).real
            lo_c, hi_c = max(lo_c, min(dl, dr)), min(hi_c, max(dl, dr))
        if not hi_c > lo_c:
            raise CorridorError("straight class has no open cylinder")
        c = lo_c + shift * (hi_c - lo_c)
        base = x0 + c * nrm
        hits = [_segment_hit(base, base + u, *portals[j]) for j in range(st.lo, st.lo + n)]
        hits.append(H(hits[0]))
        for m in range(n):
            add_chord(st.lo + m + 1, hits[m], hits[m + 1])
        return Representative(chords, [], True, H, st.length)

    k0, k1 = st.span
    passages = []
    for k in range(k0, k1):
        s_k, t_k, corner, cls, _ = st.runs[k]
        s_n = st.runs[k + 1][0] if k + 1 in st.runs else None
        v, w = st.path[k][0], st.path[k + 1][0]
        # incoming / outgoing directions at the cone point
        _, end = _run_rotation(surface, st.word, s_k, t_k, corner)
        u_in = F[s_k].inverse().vec(st.path[k - 1][0] - v)
        u_out = F[t_k + 1].inverse().vec(w - v)
        passages.append((cls, _local_angle(surface, corner, u_in), _local_angle(surface, end, u_out)))
        # chords from v to the next bend
        pts = [v] + [_segment_hit(v, w, *portals[j]) for j in range(t_k + 1, s_n)] + [w]
        for m, j in enumerate(range(t_k + 1, s_n + 1)):
            add_chord(j, pts[m], pts[m + 1])
    return Representative(chords, passages, False, H, st.length)


# -- torus shorthand -------------------------------------------------------

def torus_basis(surface: FlatSurface) -> tuple[complex, complex]:
    """Side vectors ``(u, v)`` of a single-parallelogram torus glued by translations."""
    if surface.genus != 1 or len(surface.polygons) != 1 or len(surface.polygons[0]) != 4:
        raise CorridorError("torus shorthand needs a single parallelogram torus")
    p = surface.polygons[0]
    u, v = p[1] - p[0], p[3] - p[0]
    if any(t % 4 for t in surface.turn) or surface.partner[0] != 2 or surface.partner[1] != 3:
        raise CorridorError("torus shorthand needs opposite sides glued by translation")
    return u, v


def _torus_length(surface, p, q) -> GeodesicResult:
    u, v = torus_basis(surface)
    w = p * u + q * v
    x0 = 0.5 * (u + v)
    return GeodesicResult(abs(w), [x0, x0 + w], [], (), 0, Frame(0, w))


def torus_intersection(a: tuple, b: tuple) -> int:
    """Geometric intersection number ``|p q' - q p'|`` of torus classes."""
    return abs(a[0] * b[1] - a[1] * b[0])


def trace_word(surface: FlatSurface, direction: complex, length: float, polygon: int = 0,
               start: Optional[complex] = None) -> tuple:
    """Edges crossed by the straight segment of the given length and direction.

    ``direction`` is in the coordinates of ``polygon``; ``start`` defaults to
    a generic interior point of that polygon.
    """
    d = complex(direction)
    if d == 0 or length <= 0:
        raise CorridorError("tracing needs a nonzero direction and positive length")
    d /= abs(d)
    P = polygon
    poly = surface.polygons[P]
    if start is None:
        c = sum(poly) / len(poly)
        start = c + 1e-3 * math.sqrt(2) * (poly[1] - poly[0]) + 1e-3 * math.sqrt(3) * (poly[-1] - poly[0])
    x = complex(start)
    left = float(length)
    word = []
    entry = None
    for _ in range(10_000_000):
        poly = surface.polygons[P]
        m = len(poly)
        best = None
        for i in range(m):
            e = surface.edge_id(P, i)
            if e == entry:
                continue
            a, b = poly[i], poly[(i + 1) % m]
            den = cross(d, b - a)
            if abs(den) < 1e-15:
                continue
            t = cross(a - x, b - a) / den
            s = cross(a - x, d) / den
            if t > 1e-12 and -1e-12 <= s <= 1 + 1e-12 and (best is None or t < best[0]):
                best = (t, e)
        if best is None:
            raise CorridorError("ray left the polygon without crossing an edge")
        t, e = best
        if t >= left - 1e-9 * length:
            return tuple(word)
        left -= t
        word.append(e)
        T = surface.transition(e).inverse()
        x = T(x + t * d)
        d = T.vec(d)
        entry = surface.partner[e]
        P = surface.owner[entry]
    raise CorridorError("tracing did not terminate")


def torus_word(surface: FlatSurface, p: int, q: int) -> tuple:
    """Explicit corridor for the torus class ``(p, q)``."""
    u, v = torus_basis(surface)
    w = p * u + q * v
    return trace_word(surface, w, abs(w))


def edge_loop_word(surface: FlatSurface, e: int, ccw: bool = True) -> tuple:
    """Corridor of the closed edge path along ``e`` when both endpoints are the same point.

    The loop is pushed into the polygon of ``e`` and closed by rotating
    around the vertex from the far corner back to the near corner.
    """
    P, i = surface.local(e)
    m = len(surface.polygons[P])
    near, far = (P, i), (P, (i + 1) % m)
    if surface.vertex_class[near] != surface.vertex_class[far]:
        raise CorridorError("edge endpoints are different points")
    return tuple(_fan_crossings(surface, far, near, ccw))
