import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hitchin_lab.flat.geodesic import (CorridorError, CurveClass, check_corridor, edge_loop_word, free_reduce,
                                       geodesic_length, insert_backtrack, representative, swing,
                                       torus_intersection, torus_word, trace_word)
from hitchin_lab.flat.mixed import (MixedStructure, Piece, SupportError, WeightedCurve, intersection_number,
                                    mixed_length)
from hitchin_lab.flat.saddles import closed_geodesics, saddle_connections, systole_and_saddles
from hitchin_lab.flat.surface import (Frame, SurfaceError, build_flat_surface, builtin_surface,
                                      parallelogram_torus, regular_octagon, square_torus)

SQRT2 = math.sqrt(2)
coprime = st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(
    lambda v: v != (0, 0) and math.gcd(*v) == 1)


def two_square_torus():
    # 2 x 1 rectangle cut into two unit squares: two marked points of angle 2 pi
    return build_flat_surface([[0, 1, 1 + 1j, 1j], [1, 2, 2 + 1j, 1 + 1j]],
                              [(1, 7, 0), (5, 3, 0), (0, 2, 0), (4, 6, 0)])


def _random_moves(surface, word, rng, count):
    for _ in range(count):
        j = int(rng.integers(len(word)))
        P, i = surface.local(word[j])
        if rng.random() < 0.5:
            m = len(surface.polygons[P])
            corner = (P, (i + 1) % m) if rng.random() < 0.5 else (P, i)
            word = swing(surface, word, j, j, corner)
        else:
            e = surface.edge_id(P, int(rng.integers(len(surface.polygons[P]))))
            word = insert_backtrack(surface, word, j, e)
    return word


# -- surfaces ----------------------------------------------------------------

def test_octagon_invariants(octagon):
    assert octagon.genus == 2
    assert len(octagon.cone_angles) == 1
    assert octagon.cone_angles[0] == pytest.approx(6 * math.pi, abs=1e-12)
    assert sum(octagon.cone_k) == 8
    assert octagon.area == pytest.approx(2 * (1 + SQRT2), abs=1e-12)


def test_torus_invariants(torus):
    assert torus.genus == 1 and sum(torus.cone_k) == 0 and torus.area == 1.0


def test_quarter_turn_sphere_satisfies_gauss_bonnet():
    s = build_flat_surface([[0, 1, 1 + 1j, 1j]], [(0, 1, 1), (2, 3, 1)], allow_punctures=True)
    assert s.genus == 0
    assert sum(s.cone_k) == 4 * (2 * s.genus - 2)
    with pytest.raises(SurfaceError):
        build_flat_surface([[0, 1, 1 + 1j, 1j]], [(0, 1, 1), (2, 3, 1)])


@pytest.mark.parametrize("polys,pairs", [
    ([[0, 1, 1 + 1j, 1j]], [(0, 2, 0), (1, 3, 2.0 / 3.0)]),          # rotation by pi/3
    ([[0, 2, 2 + 1j, 1j]], [(0, 1, 0), (2, 3, 0)]),                  # mismatched lengths
    ([[0, 1, 1 + 1j, 1j]], [(0, 2, 0)]),                             # unpaired edges
    ([[0, 2, 1 + 0.2j, 2 + 2j, 2j]], [(0, 1, 0), (2, 3, 0)]),        # non-convex
    ([[0, 1j, 1 + 1j, 1]], [(0, 2, 0), (1, 3, 0)]),                  # clockwise
])
def test_invalid_gluings_rejected(polys, pairs):
    with pytest.raises(SurfaceError):
        build_flat_surface(polys, pairs)


def test_builtin_names():
    assert builtin_surface("octagon").genus == 2
    assert builtin_surface("square-torus", side=2.0).area == 4.0
    with pytest.raises(SurfaceError):
        builtin_surface("cube")


def test_frame_algebra():
    f = Frame(1, 2 + 1j)
    g = Frame(3, -1j)
    z = 0.3 - 0.7j
    assert f.compose(g)(z) == f(g(z))
    assert abs(f.inverse()(f(z)) - z) < 1e-15


# -- saddle connections and systoles ---------------------------------------

def test_torus_saddles_match_primitive_lattice_vectors(torus):
    L = 4.0
    sc = saddle_connections(torus, L)
    lattice = sorted(math.hypot(a, b) for a in range(-4, 5) for b in range(-4, 5)
                     if (a, b) != (0, 0) and math.gcd(a, b) == 1 and math.hypot(a, b) <= L)
    assert sorted(s.length for s in sc) == pytest.approx(lattice, abs=1e-12)


def test_octagon_systole(octagon):
    rep = systole_and_saddles(octagon, 1.1)
    assert rep.systole == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        systole_and_saddles(octagon, 0.5)


def test_octagon_closed_geodesic_lengths(octagon):
    # side, short diagonal, two sides, width
    lengths = sorted({round(g.length, 10) for g in closed_geodesics(octagon, 2.5)})
    assert lengths == pytest.approx([1.0, math.sqrt(2 + SQRT2), 2.0, 1 + SQRT2], abs=1e-9)


# -- geodesic lengths ---------------------------------------------------------

@given(v=coprime)
def test_torus_corridor_length_is_euclidean(v):
    T = square_torus()
    r = geodesic_length(T, torus_word(T, *v))
    assert r.length == pytest.approx(math.hypot(*v), rel=1e-13)
    assert r.bends == []


def test_torus_3_4_is_exactly_5(torus):
    assert geodesic_length(torus, torus_word(torus, 3, 4)).length == 5.0
    assert geodesic_length(torus, CurveClass.from_torus(3, 4)).length == 5.0


def test_parallelogram_torus_length():
    T = parallelogram_torus(2 + 0j, 0.5 + 1j)
    assert geodesic_length(T, torus_word(T, 1, 1)).length == pytest.approx(abs(2.5 + 1j), rel=1e-13)


def test_two_square_torus_classes():
    s = two_square_torus()
    assert geodesic_length(s, trace_word(s, 1, 2.0)).length == pytest.approx(2.0, rel=1e-14)
    assert geodesic_length(s, trace_word(s, 1j, 1.0)).length == pytest.approx(1.0, rel=1e-14)


def test_octagon_side_loops(octagon):
    for e in range(8):
        for ccw in (True, False):
            r = geodesic_length(octagon, edge_loop_word(octagon, e, ccw))
            assert r.length == pytest.approx(1.0, abs=1e-12)
            assert r.incidences == [0]


@given(seed=st.integers(0, 2**32 - 1), moves=st.integers(1, 10), e=st.integers(0, 7))
def test_length_invariant_under_corridor_moves(seed, moves, e):
    O = regular_octagon()
    rng = np.random.default_rng(seed)
    word = _random_moves(O, edge_loop_word(O, e), rng, moves)
    assert geodesic_length(O, word).length == pytest.approx(1.0, abs=1e-9)


@given(seed=st.integers(0, 2**32 - 1), v=coprime)
def test_torus_length_invariant_under_corridor_moves(seed, v):
    T = square_torus()
    rng = np.random.default_rng(seed)
    word = _random_moves(T, torus_word(T, *v), rng, 5)
    assert geodesic_length(T, word).length == pytest.approx(math.hypot(*v), rel=1e-12)


@given(k=st.integers(-3, 3), e=st.integers(0, 7))
def test_length_scales_exactly_by_powers_of_two(k, e):
    O = regular_octagon()
    w = edge_loop_word(O, e)
    lam = 2.0**k
    assert geodesic_length(O.scaled(lam), w).length == lam * geodesic_length(O, w).length


@given(lam=st.floats(0.1, 10.0))
def test_length_scales_linearly(lam):
    O = regular_octagon()
    w = edge_loop_word(O, 2)
    assert geodesic_length(O.scaled(lam), w).length == pytest.approx(lam, rel=1e-12)


def test_corridor_validation(octagon):
    with pytest.raises(CorridorError):
        check_corridor(octagon, ())
    with pytest.raises(CorridorError):
        check_corridor(octagon, (99,))
    w = edge_loop_word(octagon, 0)
    assert free_reduce(octagon, insert_backtrack(octagon, w, 0, 3)) == free_reduce(octagon, w)


# -- intersections and mixed lengths ----------------------------------------------

SMALL = [(a, b) for a in range(-3, 4) for b in range(-3, 4) if (a, b) != (0, 0) and math.gcd(a, b) == 1]


@given(a=st.sampled_from(SMALL), b=st.sampled_from(SMALL))
def test_torus_intersection_matches_determinant(a, b):
    T = square_torus()
    got = intersection_number(T, CurveClass.from_word(torus_word(T, *a)), CurveClass.from_word(torus_word(T, *b)))
    assert got == torus_intersection(a, b) == abs(a[0] * b[1] - a[1] * b[0])


def test_octagon_side_loops_intersect_once(octagon):
    loops = [CurveClass.from_word(edge_loop_word(octagon, e)) for e in range(4)]
    for i in range(4):
        for j in range(4):
            if i != j:
                assert intersection_number(octagon, loops[i], loops[j]) == 1


def test_representative_is_straight_for_torus_classes(torus):
    r = representative(torus, CurveClass.from_word(torus_word(torus, 1, 2)))
    assert r.straight and r.length == pytest.approx(math.sqrt(5), rel=1e-13)


def test_mixed_length_examples(octagon, torus):
    mix = MixedStructure(pieces=(), multicurve=[WeightedCurve(CurveClass.from_torus(1, 0), 2.0)])
    assert mixed_length(mix, CurveClass.from_torus(0, 1)).total == 2.0
    assert mixed_length(mix, (3, 5)).total == 2.0 * 5

    w = edge_loop_word(octagon, 0)
    alone = MixedStructure(pieces=(Piece(octagon),))
    assert mixed_length(alone, w, piece=0).total == geodesic_length(octagon, w).length

    decl = MixedStructure(
        pieces=(Piece(octagon, boundary=(CurveClass.from_torus(1, 0),), disjoint_from=frozenset({0})),),
        multicurve=[WeightedCurve(CurveClass.from_torus(1, 0), 3.0)], ambient=torus)
    m = mixed_length(decl, w, piece=0)
    assert m.multicurve == 0.0 and m.flat == pytest.approx(1.0, abs=1e-12)


def test_mixed_structure_rejects_bad_supports(octagon, torus):
    with pytest.raises(SupportError):
        WeightedCurve(CurveClass.from_torus(1, 0), -1.0)
    with pytest.raises(SupportError):
        MixedStructure(pieces=(), multicurve=[WeightedCurve(CurveClass.from_torus(1, 0), 1.0),
                                              WeightedCurve(CurveClass.from_torus(0, 1), 1.0)])
    with pytest.raises(SupportError):
        MixedStructure(pieces=(Piece(octagon, boundary=(CurveClass.from_torus(0, 1),), disjoint_from=frozenset({0})),),
                       multicurve=[WeightedCurve(CurveClass.from_torus(1, 0), 1.0)], ambient=torus)
    undeclared = MixedStructure(pieces=(Piece(octagon),),
                                multicurve=[WeightedCurve(CurveClass.from_torus(1, 0), 1.0)], ambient=torus)
    with pytest.raises(SupportError):
        mixed_length(undeclared, edge_loop_word(octagon, 0), piece=0)


def test_mixed_length_scales_with_weights(torus):
    for w in (0.5, 1.0, 4.0):
        mix = MixedStructure(pieces=(), multicurve=[WeightedCurve(CurveClass.from_torus(1, 1), w)])
        assert mixed_length(mix, CurveClass.from_torus(1, -1)).total == 2 * w
