"""Damped Newton solvers for the cyclic Sp(4,R) Hitchin system and its rank-2m cousin.

The Sp(4,R) system in background form reads

    Delta_sigma psi1 = e^{psi1 - psi2} - e^{-2 psi1} ||q||^2 + 3/4 kappa
    Delta_sigma psi2 = e^{2 psi2} - e^{psi1 - psi2} + 1/4 kappa

and residuals are taken as ``R = Delta_sigma psi - rhs`` so that sub-solutions
have ``R >= 0`` and super-solutions ``R <= 0``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import ndimage, optimize

from .domain import (ConformalBackground, DomainError, QuarticInput, delta_sigma,
                     laplacian5, laplacian_matrix, qnorm_sq)

log = logging.getLogger(__name__)

__all__ = [
    "SolverError", "NonConvergence", "BracketViolation", "SolverOptions", "SolutionPair",
    "CyclicSolution", "flat_subsolution", "constant_supersolution", "algebraic_solution",
    "residual", "jacobian", "solve_hitchin", "solve_cyclic", "cyclic_constant_oracle",
    "cyclic_residual", "psi_to_cyclic", "cyclic_to_psi", "boundary_values", "super_residuals",
]


class SolverError(RuntimeError):
    pass


class NonConvergence(SolverError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f"Newton did not converge after {iterations} iterations "
                         f"(last residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class BracketViolation(SolverError):
    def __init__(self, node, margin: float):
        super().__init__(f"iterate left the sub/super bracket at node {node} (margin {margin:.3e})")
        self.node = node
        self.margin = margin


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-10
    max_iterations: int = 60
    damping_floor: float = 1e-4
    clip_to_bracket: bool = True
    bracket_tolerance: float = 1e-6
    init: str = "sub"              # "sub" | "super" | "algebraic"
    boundary: str = "algebraic"    # "algebraic" | "subsolution"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 < self.damping_floor <= 1:
            raise ValueError("damping_floor must lie in (0, 1]")
        if self.init not in ("sub", "super", "algebraic"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.boundary not in ("subsolution", "algebraic"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")


@dataclass(frozen=True, eq=False)
class SolutionPair:
    """Fields ``psi1, psi2`` plus solve diagnostics.

    ``bracket`` holds ``(min psi1-sub1, min psi2-sub2, min super1-psi1,
    min super2-psi2)`` over interior nodes (``inf`` where no bound exists).
    """

    psi1: np.ndarray
    psi2: np.ndarray
    residual_inf: float = float("nan")
    iterations: int = 0
    bracket: tuple = (np.nan, np.nan, np.nan, np.nan)
    converged: bool = False
    history: tuple = ()

    def h1_inv(self, bg: ConformalBackground) -> np.ndarray:
        return np.exp(self.psi1) * bg.sigma**1.5

    def h2_inv(self, bg: ConformalBackground) -> np.ndarray:
        return np.exp(self.psi2) * bg.sigma**0.5

    @property
    def bracket_margin(self) -> float:
        return float(np.min(self.bracket))

    def summary(self) -> dict:
        return {
            "residual_inf": self.residual_inf,
            "iterations": self.iterations,
            "converged": self.converged,
            "bracket": {
                "psi1_minus_sub1": self.bracket[0],
                "psi2_minus_sub2": self.bracket[1],
                "super1_minus_psi1": self.bracket[2],
                "super2_minus_psi2": self.bracket[3],
            },
        }


@dataclass(frozen=True, eq=False)
class CyclicSolution:
    """``w[k] = log h_{k+1}`` for the rank-2m cyclic system."""

    w: tuple
    residual_inf: float
    iterations: int
    converged: bool = True

    @property
    def h(self) -> list:
        return [np.exp(wk) for wk in self.w]


# ---------------------------------------------------------------------------
# curvature helpers


def _kappa_field(bg: ConformalBackground) -> np.ndarray:
    """Curvature at every active node; non-interior nodes copy the nearest interior value."""
    kc = bg.kappa_constant
    if kc is not None:
        return np.full(bg.shape, kc)
    k = np.array(bg.kappa, dtype=float)
    inner = bg.interior
    if not np.all(inner):
        _, (jj, ii) = ndimage.distance_transform_edt(~inner, return_indices=True)
        k = k[jj, ii]
    return k


# ---------------------------------------------------------------------------
# residual and Jacobian


def residual(bg: ConformalBackground, q: QuarticInput, psi1, psi2):
    """Pointwise residuals ``(R1, R2)``; non-interior disk nodes are NaN."""
    Q = qnorm_sq(bg, q)
    kappa = bg.kappa
    e12 = np.exp(psi1 - psi2)
    R1 = delta_sigma(psi1, bg) - e12 + np.exp(-2 * psi1) * Q - 0.75 * kappa
    R2 = delta_sigma(psi2, bg) - np.exp(2 * psi2) + e12 - 0.25 * kappa
    if not bg.periodic:
        R1 = np.where(bg.interior, R1, np.nan)
        R2 = np.where(bg.interior, R2, np.nan)
    return R1, R2


def _reaction_blocks(psi1, psi2, Q):
    e12 = np.exp(psi1 - psi2)
    d11 = -e12 - 2 * np.exp(-2 * psi1) * Q
    d22 = -2 * np.exp(2 * psi2) - e12
    return d11, e12, e12, d22


def jacobian(bg: ConformalBackground, q: QuarticInput, psi1, psi2, nodes=None) -> sp.csr_matrix:
    """Linearization of ``(R1, R2)`` with respect to ``(psi1, psi2)`` at ``nodes``.

    Unknowns are ordered ``[psi1[nodes], psi2[nodes]]``.
    """
    nodes = bg.interior if nodes is None else nodes
    A, _ = laplacian_matrix(bg, nodes)
    L = sp.diags(1.0 / (4.0 * bg.sigma[nodes])) @ A
    d11, d12, d21, d22 = _reaction_blocks(psi1[nodes], psi2[nodes], qnorm_sq(bg, q)[nodes])
    return sp.bmat([[L + sp.diags(d11), sp.diags(d12)],
                    [sp.diags(d21), L + sp.diags(d22)]], format="csc")


# ---------------------------------------------------------------------------
# sub- and super-solutions


def flat_subsolution(bg: ConformalBackground, q: QuarticInput):
    """Pointwise max of the flat branch and the constant-curvature branch.

    The flat branch is ``(3/2, 1/2) * log ||q||^{1/2}``; the constant branch
    ``(3/2, 1/2) * log(-3 kappa / 4)`` is used only on hyperbolic backgrounds.
    """
    Q = qnorm_sq(bg, q)
    with np.errstate(divide="ignore"):
        flat = 0.25 * np.log(Q)          # log ||q||^{1/2}
    kappa = _kappa_field(bg)
    act = bg.active
    if np.all(np.abs(kappa[act]) == 0) or (bg.periodic and np.all(np.abs(kappa) < 1e-12)):
        if np.any(Q[act] == 0):
            raise DomainError("flat background with a vanishing differential has no sub-solution")
        return 1.5 * flat, 0.5 * flat
    if np.any(kappa[act] >= 0):
        raise DomainError("sub-solution needs a hyperbolic (kappa < 0) or flat background")
    const = np.log(-0.75 * kappa)
    level = np.maximum(flat, const)
    return 1.5 * level, 0.5 * level


def constant_supersolution(bg: ConformalBackground, q: QuarticInput) -> tuple[float, float]:
    """Constants ``(c1, c2)`` forming a super-solution.

    For constant ``kappa`` in (-4, 0): ``c1 = 3 c2 + log(1 + kappa/4)`` and
    ``c2 >= 0`` is the smallest value with
    ``e^{2c2} a - e^{-6c2} a^{-2} max||q||^2 + 3 kappa/4 >= 0``, ``a = 1 + kappa/4``.
    On a flat background ``c1 = 3 c2`` with ``e^{8 c2} = max ||q||^2``.
    """
    kappa = bg.kappa_constant
    if kappa is None:
        raise DomainError("constant super-solution needs constant background curvature")
    M = float(np.max(qnorm_sq(bg, q)[bg.active]))
    if abs(kappa) < 1e-12:
        if M <= 0:
            raise DomainError("flat background with q = 0 has no super-solution")
        c2 = np.log(M) / 8.0
        return _bump_super(3 * c2, c2, bg, q)
    if kappa <= -4:
        raise DomainError(f"kappa = {kappa} <= -4: log(1 + kappa/4) undefined")
    if kappa > 0:
        raise DomainError("positive background curvature is not supported")
    a = 1.0 + kappa / 4.0

    def phi(c2):
        return np.exp(2 * c2) * a - np.exp(-6 * c2) * M / a**2 + 0.75 * kappa

    if phi(0.0) >= 0:
        c2 = 0.0
    else:
        hi = 1.0
        while phi(hi) < 0:
            hi *= 2
        c2 = optimize.brentq(phi, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return _bump_super(3 * c2 + np.log(a), c2, bg, q)


def _super_ineqs(c1, c2, kappa, M):
    F1 = np.exp(c1 - c2) - np.exp(-2 * c1) * M + 0.75 * kappa
    F2 = np.exp(2 * c2) - np.exp(c1 - c2) + 0.25 * kappa
    return F1, F2


def _bump_super(c1, c2, bg, q):
    # nudge past the root until both inequalities hold in floating point
    kappa = bg.kappa_constant
    M = float(np.max(qnorm_sq(bg, q)[bg.active]))
    a_shift = c1 - 3 * c2
    for _ in range(64):
        F1, F2 = _super_ineqs(c1, c2, kappa, M)
        if F1 >= 0 and F2 >= 0:
            return float(c1), float(c2)
        c2 = np.nextafter(c2, np.inf) + 1e-15
        c1 = 3 * c2 + a_shift
    raise SolverError("could not certify the constant super-solution")


def super_residuals(bg, q, c1, c2):
    """Inequality residuals ``F1, F2`` of the constant pair at every active node."""
    Q = qnorm_sq(bg, q)
    kappa = _kappa_field(bg)
    F1 = np.exp(c1 - c2) - np.exp(-2 * c1) * Q + 0.75 * kappa
    F2 = np.full(bg.shape, np.exp(2 * c2) - np.exp(c1 - c2)) + 0.25 * kappa
    return F1, F2


def algebraic_solution(Q, kappa):
    """Pointwise constant solution of the system with the Laplacian dropped.

    With ``a = e^{psi1-psi2}`` and ``b = e^{2 psi2} = a - kappa/4`` the first
    equation becomes ``a + 3 kappa/4 = Q / (a^2 (a - kappa/4))``, monotone in
    ``a``; solved by vectorized bisection then Newton polishing.
    """
    Q = np.asarray(Q, dtype=float)
    kappa = np.broadcast_to(np.asarray(kappa, dtype=float), Q.shape)
    if np.any(kappa > 0):
        raise DomainError("positive curvature")
    if np.any((kappa == 0) & (Q == 0)):
        raise DomainError("flat point with q = 0 has no algebraic solution")

    def phi(a):
        return a + 0.75 * kappa - Q / (a * a * (a - 0.25 * kappa))

    lo = np.maximum(-0.75 * kappa, 0.0)
    lo = np.where(lo > 0, lo, np.minimum(Q ** 0.25, 1.0) * 1e-3)
    while True:
        bad = phi(lo) > 0
        if not bad.any():
            break
        lo = np.where(bad, lo * 0.5, lo)
    hi = lo + Q ** 0.25 + 1.0
    while True:
        bad = phi(hi) < 0
        if not bad.any():
            break
        hi = np.where(bad, hi * 2, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        neg = phi(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * hi):
            break
    a = 0.5 * (lo + hi)
    for _ in range(3):
        b = a - 0.25 * kappa
        dphi = 1 + Q * (3 * a * a - 0.5 * kappa * a) / (a * a * b) ** 2
        a = np.maximum(a - phi(a) / dphi, lo)
    b = a - 0.25 * kappa
    psi2 = 0.5 * np.log(b)
    return np.log(a) + psi2, psi2


# ---------------------------------------------------------------------------
# Newton core


def _newton(fun, jac, x0, opts: SolverOptions, lo=None, hi=None):
    """Damped Newton on ``fun(x) = 0`` with residual-norm halving line search.

    With bounds ``lo, hi`` each trial point is also tried clipped to the box
    and the better of the two is kept, so clipping steers early iterates
    without pinning the discrete solution when it sits a round-off or O(h^2)
    distance outside the continuum bracket.
    """
    x = x0.copy()
    if lo is not None:
        x = np.clip(x, lo, hi)
    F = fun(x)
    norm = float(np.max(np.abs(F)))
    history = [norm]
    it = 0

    def trial(xt):
        Ft = fun(xt)
        return xt, Ft, float(np.max(np.abs(Ft)))

    while norm > opts.tolerance:
        if it >= opts.max_iterations:
            raise NonConvergence(it, norm)
        it += 1
        step = spla.spsolve(jac(x), -F)
        lam = 1.0
        while True:
            cands = [trial(x + lam * step)]
            if lo is not None:
                cands.append(trial(np.clip(x + lam * step, lo, hi)))
            cands = [c for c in cands if np.isfinite(c[2])]
            best = min(cands, key=lambda c: c[2]) if cands else None
            if best is not None and best[2] < norm:
                break
            if lam <= opts.damping_floor:
                # no descent even at the smallest step: stagnated
                raise NonConvergence(it, norm)
            lam *= 0.5
        x, F, norm = best
        history.append(norm)
        log.debug("newton it=%d lambda=%.3g residual=%.3e", it, lam, norm)
    return x, norm, it, tuple(history)


def boundary_values(bg: ConformalBackground, q: QuarticInput, mode: str = "algebraic"):
    """Dirichlet data on the disk boundary ring.

    ``"algebraic"`` (default) takes the pointwise constant solution, which is
    exact for ``q = 0`` and keeps ``g >= -3 kappa sigma`` up to the ring.
    ``"subsolution"`` takes the flat sub-solution; it satisfies
    ``3 psi2 - psi1 = 0`` on the ring but lets ``g`` dip below ``-3 kappa sigma``
    near it.
    """
    if mode == "subsolution":
        return flat_subsolution(bg, q)
    if mode == "algebraic":
        return algebraic_solution(qnorm_sq(bg, q), _kappa_field(bg))
    raise ValueError(f"unknown boundary mode {mode!r}")


InitLike = Union[None, str, SolutionPair, tuple]


def solve_hitchin(bg: ConformalBackground, q: QuarticInput, opts: Optional[SolverOptions] = None,
                  init: InitLike = None, boundary=None) -> SolutionPair:
    """Solve the Sp(4,R) system on *bg* by damped Newton, bracketed by sub/super-solutions.

    ``init`` overrides ``opts.init`` and may be a previous ``SolutionPair``
    (warm start) or a ``(psi1, psi2)`` tuple.  ``boundary`` overrides the disk
    Dirichlet data with a ``(psi1, psi2)`` pair of full-lattice arrays.
    """
    opts = opts or SolverOptions()
    Q = qnorm_sq(bg, q)
    kappa = bg.kappa
    nodes = bg.interior
    m = int(nodes.sum())

    sub1, sub2 = flat_subsolution(bg, q)
    try:
        c1, c2 = constant_supersolution(bg, q)
        sup1, sup2 = np.full(bg.shape, c1), np.full(bg.shape, c2)
    except DomainError:
        sup1 = sup2 = np.full(bg.shape, np.inf)

    if bg.periodic:
        b1 = b2 = np.zeros(bg.shape)
    elif boundary is not None:
        b1, b2 = (np.asarray(b, dtype=float) for b in boundary)
    else:
        b1, b2 = boundary_values(bg, q, opts.boundary)

    init = opts.init if init is None else init
    if isinstance(init, SolutionPair):
        p1, p2 = init.psi1, init.psi2
    elif isinstance(init, tuple):
        p1, p2 = init
    elif init == "sub":
        p1, p2 = sub1, sub2
    elif init == "super":
        if not np.all(np.isfinite(sup1)):
            raise DomainError("no constant super-solution available for initialization")
        p1, p2 = sup1, sup2
    elif init == "algebraic":
        p1, p2 = algebraic_solution(Q, _kappa_field(bg))
    else:
        raise ValueError(f"unknown init {init!r}")

    psi1 = np.where(nodes, p1, b1).astype(float)
    psi2 = np.where(nodes, p2, b2).astype(float)

    A, B = laplacian_matrix(bg, nodes)
    inv4s = 1.0 / (4.0 * bg.sigma[nodes])
    fixed = ~nodes
    lap_b1 = B @ psi1[fixed] if fixed.any() else 0.0
    lap_b2 = B @ psi2[fixed] if fixed.any() else 0.0
    Qn, kn = Q[nodes], kappa[nodes]
    L = sp.diags(inv4s) @ A

    def fun(x):
        u1, u2 = x[:m], x[m:]
        e12 = np.exp(u1 - u2)
        r1 = inv4s * (A @ u1 + lap_b1) - e12 + np.exp(-2 * u1) * Qn - 0.75 * kn
        r2 = inv4s * (A @ u2 + lap_b2) - np.exp(2 * u2) + e12 - 0.25 * kn
        return np.concatenate([r1, r2])

    def jac(x):
        d11, d12, d21, d22 = _reaction_blocks(x[:m], x[m:], Qn)
        return sp.bmat([[L + sp.diags(d11), sp.diags(d12)],
                        [sp.diags(d21), L + sp.diags(d22)]], format="csc")

    x0 = np.concatenate([psi1[nodes], psi2[nodes]])
    lo = hi = None
    if opts.clip_to_bracket:
        lo = np.concatenate([sub1[nodes], sub2[nodes]])
        hi = np.concatenate([sup1[nodes], sup2[nodes]])
    x, norm, it, hist = _newton(fun, jac, x0, opts, lo, hi)
    psi1[nodes], psi2[nodes] = x[:m], x[m:]

    margins = (
        float(np.min((psi1 - sub1)[nodes])),
        float(np.min((psi2 - sub2)[nodes])),
        float(np.min((sup1 - psi1)[nodes])),
        float(np.min((sup2 - psi2)[nodes])),
    )
    if not opts.clip_to_bracket and min(margins) < -opts.bracket_tolerance:
        k = int(np.argmin(margins))
        field_ = [psi1 - sub1, psi2 - sub2, sup1 - psi1, sup2 - psi2][k]
        masked = np.where(nodes, field_, np.inf)
        node = np.unravel_index(int(np.argmin(masked)), bg.shape)
        raise BracketViolation(tuple(int(v) for v in node), margins[k])
    psi1.setflags(write=False)
    psi2.setflags(write=False)
    return SolutionPair(psi1, psi2, norm, it, margins, True, hist)


# ---------------------------------------------------------------------------
# general cyclic system


def _cyclic_terms(w, g2):
    """``T[0] = |g_n|^2 e^{2 w1}``, ``T[k] = |g_k|^2 e^{w_{k+1}-w_k}``, ``T[m] = |g_m|^2 e^{-2 w_m}``."""
    m = len(w)
    T = [g2[m] * np.exp(2 * w[0])]
    for k in range(m - 1):
        T.append(g2[k] * np.exp(w[k + 1] - w[k]))
    T.append(g2[m - 1] * np.exp(-2 * w[m - 1]))
    return T


def cyclic_residual(bg: ConformalBackground, w, gammas):
    """Coordinate residuals ``dbar d w_k + T_k - T_{k-1}`` of the rank-2m system."""
    g2 = [np.abs(np.asarray(g)) ** 2 for g in gammas]
    T = _cyclic_terms(w, g2)
    out = []
    for k in range(len(w)):
        r = laplacian5(w[k], bg) / 4.0 + T[k + 1] - T[k]
        if not bg.periodic:
            r = np.where(bg.interior, r, np.nan)
        out.append(r)
    return out


def cyclic_constant_oracle(g2: Sequence[float]) -> np.ndarray:
    """Constant solution for constant data by 1-d reduction and bisection.

    All coupling terms share a common value ``X``; given ``X`` the chain
    ``w_1 = log(X/|g_n|^2)/2, w_{k+1} = w_k + log(X/|g_k|^2)`` fixes every
    ``w_k`` and the last equation ``|g_m|^2 e^{-2 w_m} = X`` is monotone in ``X``.
    """
    g2 = [float(v) for v in g2]
    m = len(g2) - 1
    if m < 2:
        raise ValueError("need m >= 2")
    if min(g2) <= 0:
        raise ValueError("constant oracle needs non-vanishing data")

    def chain(lx):
        w = [0.5 * (lx - np.log(g2[m]))]
        for k in range(m - 1):
            w.append(w[-1] + lx - np.log(g2[k]))
        return w

    def gap(lx):
        return np.log(g2[m - 1]) - 2 * chain(lx)[-1] - lx

    lo, hi = -1.0, 1.0
    while gap(lo) < 0:
        lo *= 2
    while gap(hi) > 0:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return np.array(chain(0.5 * (lo + hi)))


def solve_cyclic(bg: ConformalBackground, gammas: Sequence, opts: Optional[SolverOptions] = None,
                 init=None, boundary=None) -> CyclicSolution:
    """Solve the rank-2m cyclic system for ``w_k = log h_k`` in the lattice coordinate.

    ``gammas`` lists ``gamma_1 .. gamma_m`` followed by ``gamma_n`` (scalars or
    complex lattice fields).  Disk runs need ``boundary``: a list of m arrays
    holding Dirichlet values for ``w_k``.
    """
    opts = opts or SolverOptions()
    m = len(gammas) - 1
    if m < 2:
        raise ValueError("the cyclic system needs m >= 2 (n = 2m >= 4)")
    g2 = [np.broadcast_to(np.abs(np.asarray(g, dtype=complex)) ** 2, bg.shape).astype(float)
          for g in gammas]
    nodes = bg.interior
    N = int(nodes.sum())
    if init is None:
        if all(np.ptp(g) == 0 for g in g2) and min(float(g.flat[0]) for g in g2) > 0:
            c = cyclic_constant_oracle([float(g.flat[0]) for g in g2])
            init = [np.full(bg.shape, ck) for ck in c]
        elif boundary is not None:
            init = [np.asarray(b, dtype=float) for b in boundary]
        else:
            init = [np.zeros(bg.shape) for _ in range(m)]
    w = [np.array(wk, dtype=float) for wk in init]
    if not bg.periodic:
        if boundary is None:
            raise ValueError("disk runs need Dirichlet boundary data for every w_k")
        w = [np.where(nodes, wk, np.asarray(b, dtype=float)) for wk, b in zip(w, boundary)]

    A, Bm = laplacian_matrix(bg, nodes)
    fixed = ~nodes
    lapb = [Bm @ wk[fixed] if fixed.any() else 0.0 for wk in w]
    gn = [g[nodes] for g in g2]
    L = A / 4.0

    def split(x):
        return [x[k * N:(k + 1) * N] for k in range(m)]

    def fun(x):
        ws = split(x)
        T = _cyclic_terms(ws, gn)
        return np.concatenate([(A @ ws[k] + lapb[k]) / 4.0 + T[k + 1] - T[k] for k in range(m)])

    def jac(x):
        ws = split(x)
        T = _cyclic_terms(ws, gn)
        blocks = [[None] * m for _ in range(m)]
        for k in range(m):
            # d/dw of T[k+1] - T[k]
            diag = np.zeros(N)
            if k < m - 1:
                diag -= T[k + 1]
                blocks[k][k + 1] = sp.diags(T[k + 1])
            else:
                diag -= 2 * T[m]
            if k == 0:
                diag -= 2 * T[0]
            else:
                diag -= T[k]
                blocks[k][k - 1] = sp.diags(T[k])
            blocks[k][k] = L + sp.diags(diag)
        return sp.bmat(blocks, format="csc")

    x0 = np.concatenate([wk[nodes] for wk in w])
    x, norm, it, _ = _newton(fun, jac, x0, opts)
    for k, part in enumerate(split(x)):
        w[k][nodes] = part
    return CyclicSolution(tuple(w), norm, it, True)


def psi_to_cyclic(bg: ConformalBackground, psi1, psi2):
    """``(w1, w2) = (log h1, log h2)`` from ``h1^{-1} = e^{psi1} sigma^{3/2}``, ``h2^{-1} = e^{psi2} sigma^{1/2}``."""
    ls = np.log(bg.sigma)
    return [-np.asarray(psi1) - 1.5 * ls, -np.asarray(psi2) - 0.5 * ls]


def cyclic_to_psi(bg: ConformalBackground, w):
    ls = np.log(bg.sigma)
    return -w[0] - 1.5 * ls, -w[1] - 0.5 * ls
