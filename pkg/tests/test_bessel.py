import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from hitchin_lab.bessel import bessel_oracle, bessel_table, i0, i0_asymptotic, i0_series


@given(x=st.floats(0, 30))
def test_series_matches_scipy(x):
    assert i0_series(x) == pytest.approx(float(special.i0(x)), rel=1e-13)


@given(x=st.floats(25, 600))
def test_asymptotic_matches_scaled_scipy(x):
    # compare after removing e^x so large arguments stay finite
    ref = float(special.i0e(x))
    got = i0_asymptotic(x) * math.exp(-x)
    assert got == pytest.approx(ref, rel=1e-12)


def test_routes_agree_at_30():
    rel = abs(i0_series(30.0) - i0_asymptotic(30.0)) / i0_series(30.0)
    assert rel <= 1e-8


def test_known_values():
    assert i0(0.0) == 1.0
    assert i0(1.0) == pytest.approx(1.2660658777520082, rel=1e-15)
    assert np.allclose(i0(np.array([-2.0, 2.0])), 2.2795853023360673, rtol=1e-14)


def test_oracle_profile():
    rho = np.linspace(0, 1, 11)
    v = bessel_oracle(rho, 2.0, 3.0, 1.0)
    assert v[-1] == pytest.approx(2.0, rel=1e-14)
    assert np.all(np.diff(v) > 0)
    with pytest.raises(ValueError):
        bessel_oracle(rho, 1.0, 0.0, 1.0)


def test_table_rows():
    rows = bessel_table([0, 1])
    assert rows[0][0] == 0.0 and math.isnan(rows[0][2])
    assert rows[1][1] == pytest.approx(float(special.i0(1.0)), rel=1e-15)
