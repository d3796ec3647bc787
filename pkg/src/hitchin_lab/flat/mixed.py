"""Mixed length functionals: flat pieces plus a weighted multicurve.

The length of a curve is the flat geodesic length in the piece that
contains it plus ``sum_i w_i * i(curve, gamma_i)`` over the multicurve.
Intersection numbers use the determinant formula for torus shorthand and
otherwise count transverse crossings of geodesic representatives, which
are in minimal position on surfaces whose cone angles are at least ``2 pi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .geodesic import (CorridorError, CurveClass, Representative, geodesic_length,
                       representative, torus_intersection)
from .surface import FlatSurface, cross

CROSS_TOL = 1e-9
SHIFTS = (0.3819660112501051, 0.7071067811865476 - 0.0416)


class SupportError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedCurve:
    curve: CurveClass
    weight: float

    def __post_init__(self):
        if not (self.weight >= 0 and math.isfinite(self.weight)):
            raise SupportError("multicurve weights must be finite and nonnegative")


@dataclass(frozen=True)
class Piece:
    """Flat piece with its boundary curves (on the ambient surface) and the
    multicurve components declared disjoint from it."""

    surface: FlatSurface
    boundary: tuple = ()
    disjoint_from: frozenset = frozenset()


@dataclass
class MixedStructure:
    pieces: tuple
    multicurve: tuple = ()
    ambient: Optional[FlatSurface] = None
    validated: bool = field(default=False, init=False)

    def __post_init__(self):
        self.pieces = tuple(p if isinstance(p, Piece) else Piece(p) for p in self.pieces)
        self.multicurve = tuple(w if isinstance(w, WeightedCurve) else WeightedCurve(*w)
                                for w in self.multicurve)
        m = len(self.multicurve)
        for p in self.pieces:
            bad = [j for j in p.disjoint_from if not 0 <= j < m]
            if bad:
                raise SupportError(f"disjointness declared for unknown multicurve components {bad}")
        # the multicurve is a union of disjoint curves
        for a in range(m):
            for b in range(a + 1, m):
                if intersection_number(self.ambient, self.multicurve[a].curve,
                                       self.multicurve[b].curve) != 0:
                    raise SupportError(f"multicurve components {a} and {b} intersect")
        # declared disjointness is checked against each piece's boundary curves
        for k, p in enumerate(self.pieces):
            for j in p.disjoint_from:
                for c in p.boundary:
                    if intersection_number(self.ambient, c, self.multicurve[j].curve) != 0:
                        raise SupportError(f"piece {k} boundary meets multicurve component {j}")
        self.validated = True


@dataclass(frozen=True)
class MixedLength:
    flat: float
    multicurve: float

    @property
    def total(self) -> float:
        return self.flat + self.multicurve


def mixed_length(mix: MixedStructure, curve, piece: Optional[int] = None,
                 ambient_curve=None) -> MixedLength:
    """Length of ``curve`` under the mixed structure.

    With ``piece`` set, ``curve`` lives on that flat piece; components of the
    multicurve declared disjoint from the piece contribute nothing, and any
    other component needs ``ambient_curve`` (the same curve on the ambient
    surface) to measure the crossing.  Without ``piece`` the curve lives in
    the multicurve complement and only the multicurve part is nonzero.
    """
    flat = 0.0
    if piece is not None:
        flat = geodesic_length(mix.pieces[piece].surface, _as_class(curve)).length
        declared = mix.pieces[piece].disjoint_from
    else:
        declared = frozenset()
        ambient_curve = curve if ambient_curve is None else ambient_curve
    lam = 0.0
    for j, wc in enumerate(mix.multicurve):
        if j in declared:
            continue
        if ambient_curve is None:
            raise SupportError(f"curve crosses the support of multicurve component {j}, "
                               "which is not declared disjoint from the piece")
        lam += wc.weight * intersection_number(mix.ambient, ambient_curve, wc.curve)
    return MixedLength(flat, lam)


def _as_class(c) -> CurveClass:
    if isinstance(c, CurveClass):
        return c
    if isinstance(c, tuple) and len(c) == 2 and all(isinstance(x, int) for x in c):
        return CurveClass.from_torus(*c)
    return CurveClass.from_word(c)


def intersection_number(surface: Optional[FlatSurface], a, b) -> int:
    """Geometric intersection number of two closed curve classes."""
    a, b = _as_class(a), _as_class(b)
    if a.torus is not None and b.torus is not None:
        return torus_intersection(a.torus, b.torus)
    if surface is None:
        raise SupportError("intersection of corridor words needs an ambient surface")
    # distinct shifts keep two cylinder cores from meeting on a polygon edge
    ra = representative(surface, a, shift=SHIFTS[0])
    rb = representative(surface, b, shift=SHIFTS[1])
    return count_crossings(ra, rb, surface.cone_angles)


def _proper_cross(p1, p2, q1, q2) -> bool:
    d, e = p2 - p1, q2 - q1
    den = cross(d, e)
    scale = abs(d) * abs(e)
    if abs(den) <= CROSS_TOL * scale:
        return False
    t = cross(q1 - p1, e) / den
    s = cross(q1 - p1, d) / den
    return CROSS_TOL < t < 1 - CROSS_TOL and CROSS_TOL < s < 1 - CROSS_TOL


def _arc_contains(lo: float, hi: float, x: float, period: float) -> bool:
    """``x`` strictly inside the counterclockwise arc from ``lo`` to ``hi``."""
    span = (hi - lo) % period
    off = (x - lo) % period
    return CROSS_TOL < off < span - CROSS_TOL


def count_crossings(ra: Representative, rb: Representative, cone_angles: Sequence[float] = ()) -> int:
    """Transverse crossings of two representatives (chords and cone passages)."""
    if ra.straight and rb.straight and abs(cross(ra.holonomy.trans, rb.holonomy.trans)) <= \
            CROSS_TOL * abs(ra.holonomy.trans) * abs(rb.holonomy.trans) and ra.holonomy.k == rb.holonomy.k == 0:
        return 0
    n = 0
    for P, a1, a2 in ra.chords:
        for Q, b1, b2 in rb.chords:
            if P == Q and _proper_cross(a1, a2, b1, b2):
                n += 1
    by_class: dict = {}
    for cls, t_in, t_out in rb.passages:
        by_class.setdefault(cls, []).append((t_in, t_out))
    for cls, a_in, a_out in ra.passages:
        for b_in, b_out in by_class.get(cls, ()):
            period = _period_of(cls, ra, cone_angles)
            ends = [b_in, b_out]
            if any(min(abs(x - y) % period, period - abs(x - y) % period) <= CROSS_TOL
                   for x in (a_in, a_out) for y in ends):
                raise CorridorError("representatives share a saddle connection; crossing count is ambiguous")
            inside = sum(_arc_contains(a_in, a_out, y, period) for y in ends)
            if inside == 1:
                n += 1
    return n


def _period_of(cls, ra, cone_angles):
    if cone_angles:
        return cone_angles[cls]
    raise CorridorError("cone angles needed to compare passages")
