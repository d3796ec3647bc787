"""Growth rate of closed geodesics on flat cone surfaces.

Counting convention: primitive, unoriented closed geodesics, with each flat
cylinder counted once.  Estimates are least-squares slopes of ``log N``
against ``L`` over windows ``[L/2, L]``.

Scaling convention: multiplying every length by ``lam`` divides the
estimate by ``lam``.  For the ray ``t -> 4 t^{1/2} |q|^{1/2}`` the flat bound
curve is ``t^{-1/2} Ent(4|q|^{1/2})`` when ``t^{1/2}`` is read as a scale
on the length element; reading it as a scale on the metric tensor gives
``t^{-1/4}`` instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .flat.saddles import REL_EPS, closed_geodesics, saddle_connections
from .flat.surface import FlatSurface


@dataclass(frozen=True)
class CountTable:
    L: tuple
    N: tuple
    lengths: tuple = ()

    def __post_init__(self):
        if any(b < a for a, b in zip(self.N, self.N[1:])):
            raise ValueError("counts must be nondecreasing in L")

    def rows(self) -> list[tuple]:
        return list(zip(self.L, self.N))


@dataclass(frozen=True)
class EntropyFit:
    windows: tuple          # (L, slope) per window
    headline: float
    spread: float
    tail: int               # number of windows entering the spread

    def as_dict(self) -> dict:
        return {"headline": self.headline, "spread": self.spread, "tail": self.tail,
                "windows": [{"L": L, "slope": s} for L, s in self.windows]}


def count_closed_geodesics(surface: FlatSurface, L: float, cutoffs: Optional[Sequence[float]] = None,
                           budget: int = 20_000_000) -> CountTable:
    """Counts ``N(L_j)`` for every cutoff (default: the single cutoff ``L``)."""
    cut = sorted(float(c) for c in (cutoffs if cutoffs is not None else [L]))
    if cut[-1] > L * (1 + REL_EPS):
        raise ValueError("cutoffs must not exceed L")
    sc = saddle_connections(surface, L)
    geos = closed_geodesics(surface, L, sc, budget=budget)
    lens = np.array([g.length for g in geos])
    wts = np.array([g.weight for g in geos])
    N = []
    for c in cut:
        sel = lens <= c * (1 + REL_EPS)
        N.append(float(wts[sel].sum()))
    N = [int(n) if float(n).is_integer() else n for n in N]
    return CountTable(tuple(cut), tuple(N), tuple(float(x) for x in lens))


def _slope(x, y) -> float:
    # closed form so that rescaling x by a power of two rescales the slope exactly
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    return float((dx * (y - y.mean())).sum() / (dx * dx).sum())


def entropy_fit(table: CountTable, tail_fraction: float = 0.25) -> EntropyFit:
    """Windowed slopes of ``log N`` vs ``L`` over ``[L_j/2, L_j]``.

    A window is formed for every cutoff whose half still lies in the table
    and holds at least three positive counts.  ``spread`` is
    ``(max - min) / |headline|`` over the windows with
    ``L_j >= (1 - tail_fraction) * L_max``.
    """
    L = np.asarray(table.L, dtype=float)
    N = np.asarray(table.N, dtype=float)
    if len(L) < 4:
        raise ValueError("entropy fit needs at least 4 cutoffs")
    if np.all(N == N[0]):
        raise ValueError("degenerate table: all counts equal")
    windows = []
    for Lj in L:
        if Lj / 2 < L[0]:
            continue
        sel = (L >= Lj / 2) & (L <= Lj) & (N > 0)
        if sel.sum() < 3:
            continue
        windows.append((float(Lj), _slope(L[sel], np.log(N[sel]))))
    if not windows:
        raise ValueError("no window [L/2, L] fits inside the table")
    head = windows[-1][1]
    lo = (1.0 - tail_fraction) * windows[-1][0]
    last = [s for Lj, s in windows if Lj >= lo]
    spread = (max(last) - min(last)) / abs(head) if head != 0 else math.inf
    return EntropyFit(tuple(windows), head, float(spread), len(last))


def flat_bound_curve(ent_flat: float, t_values: Sequence[float], convention: str = "length") -> list[tuple]:
    """``(t, bound)`` for ``0 <= Ent(g_t) <= Ent(4 t^{1/2} |q|^{1/2})``."""
    if convention == "length":
        p = -0.5
    elif convention == "tensor":
        p = -0.25
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return [(float(t), ent_flat * float(t) ** p) for t in t_values]
