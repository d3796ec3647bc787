"""Discretized domains, conformal backgrounds and quartic-differential data.

Conventions
-----------
A background is a conformal factor ``sigma`` on a rectangular node lattice;
the Riemannian background metric is ``2 sigma |dz|^2``.  All second-order
operators use the 5-point Laplacian ``L5`` and the complex Laplacian
``dbar d = L5 / 4``.  The curvature of a conformal factor ``rho`` (metric
``rho |dz|^2``) is ``kappa(rho) = -(2/rho) dbar d log rho``, so the Poincare
factor ``2/(1-|z|^2)^2`` has ``kappa = -2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "DomainError",
    "ConformalBackground",
    "QuarticInput",
    "build_torus_background",
    "build_disk_background",
    "poincare_factor",
    "laplacian5",
    "delta_sigma",
    "curvature_conformal",
    "qnorm_sq",
    "area_of",
    "laplacian_matrix",
]

# spread below which an interior curvature field is treated as a constant
KAPPA_CONSTANT_RTOL = 1e-9


class DomainError(ValueError):
    """Invalid domain, background or field."""


@dataclass(frozen=True, eq=False)
class ConformalBackground:
    """Conformal factor and curvature sampled on a node lattice.

    Arrays are indexed ``[j, i]`` with ``x`` varying along axis 1.  For disks,
    ``active`` marks nodes inside the closed disk, ``boundary`` the outermost
    ring of active nodes (those with a neighbour outside) and ``interior`` the
    remaining active nodes.  On a torus every node is interior.
    """

    kind: str
    hx: float
    hy: float
    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray
    kappa: np.ndarray
    active: np.ndarray
    boundary: np.ndarray
    radius: Optional[float] = None
    lx: Optional[float] = None
    ly: Optional[float] = None

    def __post_init__(self):
        for name in ("x", "y", "sigma", "kappa", "active", "boundary"):
            arr = getattr(self, name)
            arr.setflags(write=False)
            if arr.shape != self.shape:
                raise DomainError(f"field {name!r} has shape {arr.shape}, expected {self.shape}")
        if not np.all(self.sigma > 0):
            raise DomainError("sigma must be positive at every node")

    @property
    def shape(self):
        return self.x.shape

    @property
    def periodic(self) -> bool:
        return self.kind == "torus"

    @property
    def h(self) -> float:
        return self.hx

    @property
    def z(self) -> np.ndarray:
        return self.x + 1j * self.y

    @property
    def interior(self) -> np.ndarray:
        return self.active & ~self.boundary

    @property
    def kappa_constant(self) -> Optional[float]:
        """The interior curvature as a scalar when it is constant, else None."""
        k = self.kappa[self.interior]
        scale = max(1.0, float(np.max(np.abs(k))))
        if np.ptp(k) <= KAPPA_CONSTANT_RTOL * scale:
            return float(np.mean(k))
        return None

    @property
    def euler_characteristic(self) -> int:
        # torus: 0; disk patches carry no closed-surface chi
        return 0 if self.periodic else 1

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "n": int(self.shape[1])}
        if self.periodic:
            d.update(lx=self.lx, ly=self.ly, sigma0=float(self.sigma.flat[0]))
        else:
            d.update(rfrac=self.radius)
        return d


def laplacian5(f: np.ndarray, bg: ConformalBackground) -> np.ndarray:
    """Euclidean 5-point Laplacian.  Non-interior disk nodes get NaN."""
    f = np.asarray(f, dtype=float)
    if bg.periodic:
        return ((np.roll(f, 1, 1) - 2 * f + np.roll(f, -1, 1)) / bg.hx**2
                + (np.roll(f, 1, 0) - 2 * f + np.roll(f, -1, 0)) / bg.hy**2)
    out = np.full(f.shape, np.nan)
    c = f[1:-1, 1:-1]
    lap = ((f[1:-1, 2:] - 2 * c + f[1:-1, :-2]) / bg.hx**2
           + (f[2:, 1:-1] - 2 * c + f[:-2, 1:-1]) / bg.hy**2)
    out[1:-1, 1:-1] = lap
    out[~bg.interior] = np.nan
    return out


def delta_sigma(f: np.ndarray, bg: ConformalBackground) -> np.ndarray:
    """``Delta_sigma f = L5 f / (4 sigma)``."""
    return laplacian5(f, bg) / (4.0 * bg.sigma)


def _curvature(factor: np.ndarray, bg: ConformalBackground) -> np.ndarray:
    return -laplacian5(np.log(factor), bg) / (2.0 * factor)


def curvature_conformal(factor, bg: ConformalBackground) -> np.ndarray:
    """Curvature of the conformal metric ``factor |dz|^2`` on the lattice of *bg*.

    Disk boundary and exterior nodes are not evaluated (NaN).
    """
    factor = np.asarray(factor, dtype=float)
    if factor.shape != bg.shape:
        raise DomainError("factor shape does not match background lattice")
    if not np.all(factor[bg.active] > 0):
        raise DomainError("conformal factor must be positive")
    safe = np.where(bg.active, factor, 1.0)
    return _curvature(safe, bg)


def laplacian_matrix(bg: ConformalBackground, nodes: np.ndarray) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Sparse 5-point Laplacian restricted to ``nodes`` (boolean mask).

    Returns ``(A, B)`` with ``L5 f = A f[nodes] + B f[~nodes]`` at the masked
    nodes (``B`` couples to the fixed Dirichlet values; empty on a torus).
    """
    ny, nx = bg.shape
    idx = -np.ones(bg.shape, dtype=np.int64)
    idx[nodes] = np.arange(nodes.sum())
    fixed = ~nodes
    fidx = -np.ones(bg.shape, dtype=np.int64)
    fidx[fixed] = np.arange(fixed.sum())
    jj, ii = np.nonzero(nodes)
    rows, cols, vals = [idx[jj, ii]], [idx[jj, ii]], [np.full(jj.size, -2 / bg.hx**2 - 2 / bg.hy**2)]
    brows, bcols, bvals = [], [], []
    for dj, di, w in ((0, 1, bg.hx), (0, -1, bg.hx), (1, 0, bg.hy), (-1, 0, bg.hy)):
        nj, ni = jj + dj, ii + di
        if bg.periodic:
            nj %= ny
            ni %= nx
        elif nj.min() < 0 or ni.min() < 0 or nj.max() >= ny or ni.max() >= nx:
            raise DomainError("masked node touches the lattice edge")
        inside = nodes[nj, ni]
        rows.append(idx[jj, ii][inside])
        cols.append(idx[nj, ni][inside])
        vals.append(np.full(inside.sum(), 1 / w**2))
        brows.append(idx[jj, ii][~inside])
        bcols.append(fidx[nj, ni][~inside])
        bvals.append(np.full((~inside).sum(), 1 / w**2))
    m = int(nodes.sum())
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m))
    B = sp.csr_matrix((np.concatenate(bvals), (np.concatenate(brows), np.concatenate(bcols))),
                      shape=(m, int(fixed.sum())))
    return A, B


def build_torus_background(lx: float, ly: float, n: int, sigma0: float) -> ConformalBackground:
    """Flat doubly periodic background with constant factor ``sigma0``."""
    if int(n) != n or n < 8:
        raise DomainError("resolution too small: need n >= 8")
    if not (lx > 0 and ly > 0 and sigma0 > 0):
        raise DomainError("lx, ly and sigma0 must be positive")
    n = int(n)
    hx, hy = lx / n, ly / n
    x, y = np.meshgrid(np.arange(n) * hx, np.arange(n) * hy)
    sigma = np.full(x.shape, float(sigma0))
    mask = np.ones(x.shape, dtype=bool)
    proto = ConformalBackground("torus", hx, hy, x, y, sigma, np.zeros(x.shape), mask,
                                np.zeros(x.shape, dtype=bool), lx=float(lx), ly=float(ly))
    kappa = _curvature(sigma, proto)
    return ConformalBackground("torus", hx, hy, x, y, sigma, kappa, mask,
                               np.zeros(x.shape, dtype=bool), lx=float(lx), ly=float(ly))


def poincare_factor(z) -> np.ndarray:
    """``2 / (1 - |z|^2)^2``; the metric ``2 sigma |dz|^2`` has curvature -1."""
    r2 = np.abs(np.asarray(z)) ** 2
    return 2.0 / (1.0 - r2) ** 2


def _disk_masks(r: np.ndarray, rfrac: float, h: float):
    active = r <= rfrac + 1e-12 * h
    nb = np.zeros_like(active)
    nb[1:-1, 1:-1] = (active[1:-1, 2:] & active[1:-1, :-2] & active[2:, 1:-1] & active[:-2, 1:-1])
    boundary = active & ~nb
    return active, boundary


def build_disk_background(rfrac: float, n: int, discrete_hyperbolic: bool = True,
                          tol: float = 1e-13) -> ConformalBackground:
    """Square lattice over the disk ``|z| <= rfrac`` with a hyperbolic factor.

    With ``discrete_hyperbolic`` (default) the factor solves the discrete
    Liouville equation ``L5 log sigma = 4 sigma`` at interior nodes with
    Poincare values on the boundary ring, so the stored curvature is -2 to
    round-off and constant solutions of the Hitchin system are exact on the
    lattice.  Otherwise the Poincare factor is sampled directly and the
    curvature is -2 only up to O(h^2).
    """
    if not (0 < rfrac <= 0.9):
        raise DomainError("rfrac must lie in (0, 0.9]; the factor blows up near the ideal boundary")
    if int(n) != n or n < 16:
        raise DomainError("resolution too small: need n >= 16")
    n = int(n)
    # symmetric lattice with a node at z = 0 and one ghost column on each side
    m = n // 2
    h = rfrac / m
    coords = np.arange(-m - 1, m + 2) * h
    x, y = np.meshgrid(coords, coords)
    r = np.hypot(x, y)
    active, boundary = _disk_masks(r, rfrac, h)
    # exterior nodes carry the factor at the radial projection (never used in equations)
    rc = np.minimum(r, rfrac)
    sigma = poincare_factor(rc)
    proto = ConformalBackground("disk", h, h, x, y, sigma, np.zeros(x.shape), active, boundary,
                                radius=float(rfrac))
    if discrete_hyperbolic:
        sigma = _discrete_liouville(proto, tol)
        proto = ConformalBackground("disk", h, h, x, y, sigma, np.zeros(x.shape), active, boundary,
                                    radius=float(rfrac))
    kappa = curvature_conformal(sigma, proto)
    return ConformalBackground("disk", h, h, x, y, sigma, kappa, active, boundary, radius=float(rfrac))


def _discrete_liouville(bg: ConformalBackground, tol: float, max_iter: int = 50) -> np.ndarray:
    """Newton solve of ``L5 s = 4 exp(s)`` on interior nodes, ``s = log sigma``."""
    inner = bg.interior
    A, B = laplacian_matrix(bg, inner)
    s = np.log(bg.sigma).copy()
    sb = s[~inner]
    rhs_fixed = B @ sb
    u = s[inner]
    for _ in range(max_iter):
        F = A @ u + rhs_fixed - 4.0 * np.exp(u)
        J = A - sp.diags(4.0 * np.exp(u))
        step = spla.spsolve(J.tocsc(), F)
        u = u - step
        # the curvature defect F/(4 sigma) bottoms out at round-off ~1e-11/h^2 scale,
        # so convergence is judged on the Newton step
        if np.max(np.abs(step)) < tol:
            break
    else:
        raise DomainError("discrete hyperbolic factor did not converge")
    s[inner] = u
    return np.exp(s)


# ---------------------------------------------------------------------------
# quartic differentials


@dataclass(frozen=True, eq=False)
class QuarticInput:
    """A quartic differential sampled on a background lattice.

    ``form`` is ``"constant"``, ``"polynomial"`` (coefficients in increasing
    degree of ``z``) or ``"sampled"``.  The circle action ``q -> e^{i theta} q``
    is carried by ``phase`` so that the modulus, the only quantity the Hitchin
    system sees, is computed from the unrotated values.
    """

    form: str
    base: np.ndarray
    holomorphic: bool
    coefficients: Optional[tuple] = None
    phase: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        self.base.setflags(write=False)

    @property
    def values(self) -> np.ndarray:
        return self.scale * np.exp(1j * self.phase) * self.base

    @property
    def modulus(self) -> np.ndarray:
        return self.scale * np.abs(self.base)

    def rotate(self, theta: float) -> "QuarticInput":
        return QuarticInput(self.form, self.base, self.holomorphic, self.coefficients,
                            self.phase + float(theta), self.scale)

    def scaled(self, t: float) -> "QuarticInput":
        """The differential ``t q`` for real ``t > 0``."""
        if not t > 0:
            raise DomainError("ray parameter must be positive")
        return QuarticInput(self.form, self.base, self.holomorphic, self.coefficients,
                            self.phase, self.scale * float(t))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.base)

    def zeros(self) -> list[complex]:
        """Zeros of a polynomial/constant differential (empty for sampled fields)."""
        if self.form == "constant" or self.coefficients is None:
            return []
        c = np.trim_zeros(np.asarray(self.coefficients, dtype=complex), "b")
        if c.size <= 1:
            return []
        return [complex(r) for r in np.roots(c[::-1])]

    @classmethod
    def constant(cls, bg: ConformalBackground, c: complex) -> "QuarticInput":
        base = np.full(bg.shape, complex(c))
        return cls("constant", base, True, (complex(c),))

    @classmethod
    def polynomial(cls, bg: ConformalBackground, coefficients: Sequence[complex]) -> "QuarticInput":
        coefficients = tuple(complex(c) for c in coefficients)
        if not coefficients:
            raise DomainError("empty coefficient list")
        if bg.periodic and any(coefficients[1:]):
            raise DomainError("non-constant polynomial is not doubly periodic")
        base = np.polynomial.polynomial.polyval(bg.z, np.array(coefficients))
        return cls("polynomial", np.asarray(base, dtype=complex), True, coefficients)

    @classmethod
    def sampled(cls, bg: ConformalBackground, values, cr_tol: float = 1e-6) -> "QuarticInput":
        values = np.asarray(values, dtype=complex)
        if values.shape != bg.shape:
            raise DomainError("sampled field shape does not match background")
        return cls("sampled", values.copy(), cauchy_riemann_defect(values, bg) < cr_tol)


def cauchy_riemann_defect(values: np.ndarray, bg: ConformalBackground) -> float:
    """Max-norm of the centred difference ``d/dzbar`` relative to the field scale."""
    if bg.periodic:
        dx = (np.roll(values, -1, 1) - np.roll(values, 1, 1)) / (2 * bg.hx)
        dy = (np.roll(values, -1, 0) - np.roll(values, 1, 0)) / (2 * bg.hy)
        mask = np.ones(bg.shape, dtype=bool)
    else:
        dx = np.zeros_like(values)
        dy = np.zeros_like(values)
        dx[:, 1:-1] = (values[:, 2:] - values[:, :-2]) / (2 * bg.hx)
        dy[1:-1, :] = (values[2:, :] - values[:-2, :]) / (2 * bg.hy)
        mask = bg.interior
    dzbar = 0.5 * (dx + 1j * dy)
    scale = max(1.0, float(np.max(np.abs(values[mask]))))
    return float(np.max(np.abs(dzbar[mask]))) / scale


def qnorm_sq(bg: ConformalBackground, q: QuarticInput) -> np.ndarray:
    """``||q||_sigma^2 = |q|^2 / sigma^4`` pointwise."""
    if q.base.shape != bg.shape:
        raise DomainError("quartic input shape does not match background")
    return q.modulus**2 / bg.sigma**4


def area_of(factor, bg: ConformalBackground, region: Optional[np.ndarray] = None) -> float:
    """Riemann-sum area ``sum factor * hx * hy`` of a conformal metric over a region.

    The default region is the active node set.
    """
    factor = np.asarray(factor, dtype=float)
    region = bg.active if region is None else np.asarray(region, dtype=bool) & bg.active
    if not region.any():
        raise DomainError("empty region")
    vals = factor[region]
    if np.any(vals < 0):
        raise DomainError("metric factor must be non-negative")
    return float(vals.sum() * bg.hx * bg.hy)
