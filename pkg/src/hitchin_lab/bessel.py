"""Modified Bessel function I0 and the radial comparison profile built from it."""
from __future__ import annotations

import math

import numpy as np

SERIES_LIMIT = 30.0


def i0_series(x: float) -> float:
    """Power series sum_k (x/2)^{2k} / (k!)^2 with term recursion."""
    x = abs(float(x))
    y = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= y / (k * k)
        total += term
        if term < 1e-17 * total:
            return total


def i0_asymptotic(x: float, max_terms: int = 60) -> float:
    """Large-argument expansion e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! 8^k x^k).

    Summed until the terms stop shrinking or fall below double precision.
    """
    x = float(x)
    if x <= 0:
        raise ValueError("asymptotic expansion needs x > 0")
    term = 1.0
    total = 1.0
    for k in range(1, max_terms + 1):
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt >= term:
            break
        term = nxt
        total += term
        if term < 1e-17 * total:
            break
    return math.exp(x) / math.sqrt(2 * math.pi * x) * total


def i0(x) -> np.ndarray | float:
    """I0 by series below 30 and by the asymptotic expansion above."""
    if np.ndim(x) == 0:
        ax = abs(float(x))
        return i0_series(ax) if ax <= SERIES_LIMIT else i0_asymptotic(ax)
    return np.vectorize(lambda v: i0(v), otypes=[float])(np.asarray(x, dtype=float))


def bessel_oracle(rho, C: float, a: float, r: float):
    """Radial solution of dbar d eta = 2 a eta on the flat ball of radius r with eta = C on the rim."""
    if not (a > 0 and r > 0):
        raise ValueError("oracle needs a > 0 and r > 0")
    k = 2.0 * math.sqrt(2.0 * a)
    return C * np.asarray(i0(k * np.asarray(rho, dtype=float))) / i0(k * r)


def bessel_table(xs) -> list[tuple[float, float, float]]:
    """Rows (x, series, asymptotic); asymptotic is NaN at x = 0."""
    rows = []
    for x in xs:
        x = float(x)
        rows.append((x, i0_series(x), i0_asymptotic(x) if x > 0 else float("nan")))
    return rows
