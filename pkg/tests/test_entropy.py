import math

import pytest
from hypothesis import given, strategies as st

from hitchin_lab.entropy import CountTable, count_closed_geodesics, entropy_fit, flat_bound_curve
from hitchin_lab.flat.surface import regular_octagon, square_torus


def _primitive_count(L):
    # unoriented primitive lattice vectors of length <= L
    n = int(L) + 1
    return sum(1 for a in range(-n, n + 1) for b in range(0, n + 1)
               if (b > 0 or a > 0) and math.gcd(a, b) == 1 and math.hypot(a, b) <= L) if L >= 1 else 0


@pytest.mark.parametrize("L", [1.0, 1.5, 2.2, 3.0, 5.5])
def test_torus_counts_match_lattice(L):
    tab = count_closed_geodesics(square_torus(), L)
    assert tab.N[-1] == _primitive_count(L)


def test_torus_small_counts():
    tab = count_closed_geodesics(square_torus(), 2.2, [1.5, 2.2])
    assert tab.N == (4, 4)


def test_torus_entropy_is_small_at_40():
    tab = count_closed_geodesics(square_torus(), 40.0, [float(k) for k in range(2, 41)])
    assert entropy_fit(tab).headline <= 0.1


def test_octagon_windows_settle():
    tab = count_closed_geodesics(regular_octagon(), 7.0, [1 + 0.25 * k for k in range(25)])
    fit = entropy_fit(tab)
    assert fit.headline > 1.0
    assert fit.spread <= 0.10


def test_scaled_surface_has_scaled_estimate():
    cut = [1 + 0.25 * k for k in range(17)]
    O = regular_octagon()
    a = count_closed_geodesics(O, 5.0, cut)
    b = count_closed_geodesics(O.scaled(2.0), 10.0, [2 * c for c in cut])
    assert a.N == b.N
    assert entropy_fit(b).headline == entropy_fit(a).headline / 2


@given(h=st.floats(0.1, 3.0), c=st.floats(0.5, 50.0))
def test_fit_recovers_exact_exponential(h, c):
    L = [1 + 0.2 * k for k in range(30)]
    tab = CountTable(tuple(L), tuple(c * math.exp(h * x) for x in L))
    fit = entropy_fit(tab)
    assert fit.headline == pytest.approx(h, rel=1e-9)
    assert fit.spread <= 1e-9


def test_fit_rejects_degenerate_tables():
    with pytest.raises(ValueError):
        entropy_fit(CountTable((1, 2, 3), (1, 2, 3)))
    with pytest.raises(ValueError):
        entropy_fit(CountTable((1, 2, 3, 4), (5, 5, 5, 5)))
    with pytest.raises(ValueError):
        CountTable((1, 2), (3, 1))


def test_flat_bound_curve_conventions():
    assert flat_bound_curve(2.0, [4.0]) == [(4.0, 1.0)]
    assert flat_bound_curve(2.0, [16.0], convention="tensor") == [(16.0, 1.0)]
    with pytest.raises(ValueError):
        flat_bound_curve(1.0, [1.0], convention="other")
