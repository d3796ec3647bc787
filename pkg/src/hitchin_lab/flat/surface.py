"""Flat cone surfaces glued from convex polygons.

Points and vectors are complex numbers.  Edges are numbered globally:
polygon ``P`` with ``m`` vertices owns edges ``offset[P] .. offset[P]+m-1``
and local edge ``i`` runs from vertex ``i`` to vertex ``i+1``.  Pairings
glue edge ``eb`` onto edge ``ea`` by a rotation through ``k * pi/2``
followed by a translation, reversing orientation along the edge so the two
polygons lie on opposite sides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

QUARTER = (1 + 0j, 1j, -1 + 0j, -1j)
TOL = 1e-9


class SurfaceError(ValueError):
    pass


def cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def unit(k: int) -> complex:
    return QUARTER[k % 4]


@dataclass(frozen=True)
class Frame:
    """Affine map ``z -> rot * z + trans`` with ``rot`` a quarter-turn unit."""

    k: int = 0
    trans: complex = 0j

    @property
    def rot(self) -> complex:
        return unit(self.k)

    def __call__(self, z):
        return self.rot * z + self.trans

    def vec(self, v):
        return self.rot * v

    def compose(self, other: "Frame") -> "Frame":
        """``self o other``."""
        return Frame((self.k + other.k) % 4, self.rot * other.trans + self.trans)

    def inverse(self) -> "Frame":
        r = unit(-self.k)
        return Frame((-self.k) % 4, -r * self.trans)


@dataclass(frozen=True, eq=False)
class FlatSurface:
    """Validated polygon complex.

    ``partner[e]`` is the edge glued to ``e``; ``turn[e]`` is the quarter-turn
    count of the map from the partner polygon into the polygon of ``e``.
    ``vertex_class[(P, i)]`` indexes the cone point at corner ``(P, i)``;
    ``cone_angles[c]`` is its total angle and ``cone_k[c]`` the integer with
    ``angle = 2 pi + k pi / 2``.
    """

    polygons: tuple
    pairings: tuple
    partner: tuple
    turn: tuple
    owner: tuple
    offset: tuple
    corner_angle: dict
    vertex_class: dict
    class_corners: tuple
    corner_offset: dict
    cone_angles: tuple
    cone_k: tuple
    euler_characteristic: int
    genus: int
    area: float
    allow_punctures: bool = False

    # -- basic lookups --------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.owner)

    def local(self, e: int) -> tuple[int, int]:
        P = self.owner[e]
        return P, e - self.offset[P]

    def edge_id(self, P: int, i: int) -> int:
        m = len(self.polygons[P])
        return self.offset[P] + (i % m)

    def edge_points(self, e: int) -> tuple[complex, complex]:
        P, i = self.local(e)
        poly = self.polygons[P]
        return poly[i], poly[(i + 1) % len(poly)]

    def transition(self, e: int) -> Frame:
        """Map from the partner polygon's coordinates into the coordinates of ``e``'s polygon."""
        a0, a1 = self.edge_points(e)
        b0, _ = self.edge_points(self.partner[e])
        r = unit(self.turn[e])
        return Frame(self.turn[e], a1 - r * b0)

    def ccw_next(self, corner: tuple[int, int]) -> tuple[int, int]:
        """Corner following ``corner`` counterclockwise around its vertex."""
        P, i = corner
        e = self.edge_id(P, i - 1)
        Q, j = self.local(self.partner[e])
        return Q, j

    def cw_next(self, corner: tuple[int, int]) -> tuple[int, int]:
        P, i = corner
        e = self.edge_id(P, i)
        Q, j = self.local(self.partner[e])
        return Q, (j + 1) % len(self.polygons[Q])

    @property
    def cone_points(self) -> list[int]:
        """Vertex classes with nonzero ``k`` (marked regular points excluded)."""
        return [c for c, k in enumerate(self.cone_k) if k != 0]

    @property
    def cone_table(self) -> list[dict]:
        return [{"class": c, "angle": a, "k": k, "corners": list(self.class_corners[c])}
                for c, (a, k) in enumerate(zip(self.cone_angles, self.cone_k))]

    # -- derived surfaces -------------------------------------------------

    def scaled(self, lam: float) -> "FlatSurface":
        if not lam > 0:
            raise SurfaceError("scale factor must be positive")
        return build_flat_surface([[complex(z) * lam for z in p] for p in self.polygons],
                                  self.pairings, allow_punctures=self.allow_punctures)

    def normalized(self) -> "FlatSurface":
        """Copy rescaled to unit area (lengths divided by sqrt(area))."""
        return self.scaled(1.0 / math.sqrt(self.area))

    def area_pairing(self) -> float:
        """Self-pairing ``(pi/2) * area`` of the flat length functional."""
        return 0.5 * math.pi * self.area

    def describe(self) -> dict:
        return {
            "genus": self.genus,
            "euler_characteristic": self.euler_characteristic,
            "area": self.area,
            "cones": [{"angle": a, "k": k} for a, k in zip(self.cone_angles, self.cone_k)],
            "sum_k": int(sum(self.cone_k)),
        }


def _polygon_area(poly) -> float:
    s = 0.0
    for a, b in zip(poly, poly[1:] + poly[:1]):
        s += cross(a, b)
    return 0.5 * s


def _as_points(poly) -> list[complex]:
    pts = []
    for v in poly:
        if isinstance(v, (complex, int, float, np.number)):
            pts.append(complex(v))
        else:
            x, y = v
            pts.append(complex(float(x), float(y)))
    return pts


def build_flat_surface(polygons: Sequence, pairings: Iterable, allow_punctures: bool = False,
                       tol: float = TOL) -> FlatSurface:
    """Validate a gluing of strictly convex counterclockwise polygons.

    ``pairings`` holds ``(ea, eb, k)`` triples over global edge ids; ``k`` is
    the rotation in quarter turns applied to ``eb``'s polygon.  A non-integer
    ``k`` or a ``k`` inconsistent with the edge directions is rejected.
    """
    polys = [_as_points(p) for p in polygons]
    if not polys:
        raise SurfaceError("no polygons")
    offset, owner = [], []
    for P, poly in enumerate(polys):
        if len(poly) < 3:
            raise SurfaceError(f"polygon {P} has fewer than 3 vertices")
        offset.append(len(owner))
        owner.extend([P] * len(poly))
        m = len(poly)
        scale = max(abs(b - a) for a, b in zip(poly, poly[1:] + poly[:1]))
        for i in range(m):
            a, b, c = poly[i - 1], poly[i], poly[(i + 1) % m]
            if cross(b - a, c - b) <= tol * scale * scale:
                raise SurfaceError(f"polygon {P} is not strictly convex and counterclockwise at vertex {i}")
    n = len(owner)

    def pts(e):
        P = owner[e]
        i = e - offset[P]
        poly = polys[P]
        return poly[i], poly[(i + 1) % len(poly)]

    partner = [-1] * n
    turn = [0] * n
    clean = []
    for trip in pairings:
        if len(trip) != 3:
            raise SurfaceError(f"pairing {trip!r} is not an (edge, edge, k) triple")
        ea, eb, k = int(trip[0]), int(trip[1]), trip[2]
        kf = float(k)
        if abs(kf - round(kf)) > tol:
            raise SurfaceError(f"illegal rotation {kf} * pi/2 in pairing ({ea}, {eb})")
        k = int(round(kf)) % 4
        for e in (ea, eb):
            if not 0 <= e < n:
                raise SurfaceError(f"edge {e} out of range")
            if partner[e] != -1:
                raise SurfaceError(f"edge {e} paired twice")
        if ea == eb:
            raise SurfaceError(f"edge {ea} paired with itself")
        p0, p1 = pts(ea)
        q0, q1 = pts(eb)
        la, lb = abs(p1 - p0), abs(q1 - q0)
        if abs(la - lb) > tol * max(1.0, la):
            raise SurfaceError(f"length mismatch between edges {ea} and {eb}: {la} vs {lb}")
        if abs(unit(k) * (q1 - q0) - (p0 - p1)) > tol * max(1.0, la):
            raise SurfaceError(f"pairing ({ea}, {eb}) is not a rotation by {k} * pi/2 plus translation")
        partner[ea], partner[eb] = eb, ea
        turn[ea], turn[eb] = k, (-k) % 4
        clean.append((ea, eb, k))
    unmatched = [e for e in range(n) if partner[e] == -1]
    if unmatched:
        raise SurfaceError(f"unmatched edge(s) {unmatched}")

    # corner angles
    corner_angle = {}
    for P, poly in enumerate(polys):
        m = len(poly)
        for i in range(m):
            d_out = poly[(i + 1) % m] - poly[i]
            d_in = poly[i - 1] - poly[i]
            corner_angle[(P, i)] = math.atan2(cross(d_out, d_in), (d_out.conjugate() * d_in).real)

    def ccw_next(corner):
        P, i = corner
        e = offset[P] + (i - 1) % len(polys[P])
        Q = owner[partner[e]]
        return Q, partner[e] - offset[Q]

    vertex_class, class_corners, corner_off = {}, [], {}
    for P, poly in enumerate(polys):
        for i in range(len(poly)):
            if (P, i) in vertex_class:
                continue
            c = len(class_corners)
            cyc, cur, acc = [], (P, i), 0.0
            while cur not in vertex_class:
                vertex_class[cur] = c
                corner_off[cur] = acc
                acc += corner_angle[cur]
                cyc.append(cur)
                cur = ccw_next(cur)
            if cur != (P, i):
                raise SurfaceError("inconsistent corner cycle")
            class_corners.append(tuple(cyc))
    angles, ks = [], []
    for c, cyc in enumerate(class_corners):
        theta = sum(corner_angle[x] for x in cyc)
        kf = (theta - 2 * math.pi) / (math.pi / 2)
        k = int(round(kf))
        if abs(kf - k) > 1e-7:
            raise SurfaceError(f"illegal cone angle {theta} at vertex class {c}")
        if k < 0 and not (allow_punctures and k >= -3):
            raise SurfaceError(f"illegal cone angle {theta} (k = {k}) at vertex class {c}")
        angles.append(theta)
        ks.append(k)
    V, E, F = len(class_corners), n // 2, len(polys)
    chi = V - E + F
    if chi % 2:
        raise SurfaceError(f"odd Euler characteristic {chi}")
    genus = (2 - chi) // 2
    if sum(ks) != -4 * chi:
        raise SurfaceError(f"Gauss-Bonnet failure: sum k = {sum(ks)} but 4(2g-2) = {-4 * chi}")
    area = sum(_polygon_area(p) for p in polys)
    return FlatSurface(
        tuple(tuple(p) for p in polys), tuple(clean), tuple(partner), tuple(turn),
        tuple(owner), tuple(offset), corner_angle, vertex_class, tuple(class_corners),
        corner_off, tuple(angles), tuple(ks), chi, genus, area, allow_punctures,
    )


def square_torus(side: float = 1.0) -> FlatSurface:
    """Square of the given side with opposite edges glued by translation.

    Edges: 0 bottom, 1 right, 2 top, 3 left.
    """
    s = float(side)
    return build_flat_surface([[0, s, s + s * 1j, s * 1j]], [(0, 2, 0), (1, 3, 0)])


def parallelogram_torus(u: complex, v: complex) -> FlatSurface:
    u, v = complex(u), complex(v)
    if cross(u, v) <= 0:
        raise SurfaceError("parallelogram sides must be positively oriented")
    return build_flat_surface([[0j, u, u + v, v]], [(0, 2, 0), (1, 3, 0)])


def regular_octagon(side: float = 1.0) -> FlatSurface:
    """Regular octagon with opposite sides glued by translation (genus 2, one 6 pi cone point)."""
    s = float(side)
    pts = [0j]
    for i in range(7):
        pts.append(pts[-1] + s * complex(math.cos(i * math.pi / 4), math.sin(i * math.pi / 4)))
    return build_flat_surface([pts], [(i, i + 4, 0) for i in range(4)])


def builtin_surface(name: str, **kw) -> FlatSurface:
    if name == "octagon":
        return regular_octagon(kw.get("side", 1.0))
    if name in ("square-torus", "square_torus"):
        return square_torus(kw.get("side", 1.0))
    raise SurfaceError(f"unknown built-in surface {name!r}")
