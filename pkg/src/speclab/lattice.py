"""Lattices, finite discrete domains and the geometric quantities attached to them.

A lattice is ``A Z^d`` for an invertible generator ``A``.  Domains store integer
(lattice) coordinates ``k``; the ambient point is ``A @ k``.  A domain may also
live on a discrete torus, in which case ``period`` gives the number of lattice
steps along each axis before wrapping (only diagonal generators are supported
there).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np
import shapely
from scipy.spatial import cKDTree

from .errors import InputError, SingularGenerator

DET_TOL = 1e-12
# relative slack on distance thresholds (d <= 2^n); absorbs sqrt roundoff only
_DIST_RTOL = 1e-12


def singular_data(A):
    """Return ``(sigma, norm, cond, covolume)`` for a square generator.

    ``sigma`` is sorted ascending, ``norm = sigma[-1]``, ``cond = sigma[-1]/sigma[0]``
    and ``covolume = prod(sigma) = |det A|``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"generator must be square, got shape {A.shape}")
    if abs(np.linalg.det(A)) <= DET_TOL:
        raise SingularGenerator(f"|det A| <= {DET_TOL}")
    sigma = np.sort(np.linalg.svd(A, compute_uv=False))
    return sigma, float(sigma[-1]), float(sigma[-1] / sigma[0]), float(np.prod(sigma))


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    generator: np.ndarray
    singular_values: np.ndarray = field(init=False)
    norm: float = field(init=False)
    cond: float = field(init=False)
    covolume: float = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.generator, dtype=float))
        sigma, norm, cond, covol = singular_data(A)
        A.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "generator", A)
        object.__setattr__(self, "singular_values", sigma)
        object.__setattr__(self, "norm", norm)
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "covolume", covol)

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d))

    @classmethod
    def diagonal(cls, *steps):
        return cls(np.diag(np.asarray(steps, dtype=float)))

    @property
    def dim(self):
        return self.generator.shape[0]

    @property
    def fineness(self):
        return isotropic_fineness(self)

    @cached_property
    def inverse(self):
        return np.linalg.inv(self.generator)

    def is_diagonal(self):
        A = self.generator
        return bool(np.all(A == np.diag(np.diag(A))))

    def scaled(self, eps):
        return LatticeSpec(eps * self.generator)

    def ambient(self, k):
        return np.asarray(k, dtype=float) @ self.generator.T

    def __repr__(self):
        return f"LatticeSpec({self.generator.tolist()})"


def isotropic_fineness(lattice):
    """``cond(A)^(2d) * max(1, ||A||^d)``."""
    d = lattice.dim
    return lattice.cond ** (2 * d) * max(1.0, lattice.norm**d)


def _row_major(points):
    if len(points) == 0:
        return np.arange(0)
    return np.lexsort(points.T[::-1])


@dataclass(frozen=True, eq=False)
class DiscreteDomain:
    """Finite set of lattice points with a uniform point mass or per-point weights.

    Use :meth:`from_points` to build one; it sorts points row-major and rejects
    duplicates.
    """

    lattice: LatticeSpec
    points: np.ndarray
    mass: float
    weights: np.ndarray | None = None
    period: tuple[int, ...] | None = None

    @classmethod
    def from_points(cls, lattice, points, mass=None, weights=None, period=None):
        d = lattice.dim
        pts = np.asarray(points, dtype=np.int64).reshape(-1, d)
        if period is not None:
            period = tuple(int(p) for p in period)
            if len(period) != d or min(period) < 1:
                raise InputError(f"bad period {period}")
            if not lattice.is_diagonal():
                raise InputError("torus domains need a diagonal generator")
            pts = np.mod(pts, np.asarray(period))
        order = _row_major(pts)
        pts = pts[order]
        if len(pts) > 1 and np.any(np.all(pts[1:] == pts[:-1], axis=1)):
            raise InputError("duplicate points in domain")
        if weights is not None:
            weights = np.asarray(weights, dtype=float).reshape(-1)[order]
            if weights.shape[0] != pts.shape[0]:
                raise InputError("one weight per point required")
            if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
                raise InputError("weights must be positive and finite")
            weights.setflags(write=False)
        mass = lattice.covolume if mass is None else float(mass)
        if not mass > 0:
            raise InputError("point mass must be positive")
        pts.setflags(write=False)
        return cls(lattice, pts, mass, weights, period)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.lattice.dim

    @property
    def point_masses(self):
        if self.weights is not None:
            return self.weights
        return np.full(len(self), self.mass)

    def measure(self):
        return float(self.point_masses.sum())

    @cached_property
    def ambient(self):
        return self.lattice.ambient(self.points)

    @cached_property
    def ambient_period(self):
        if self.period is None:
            return None
        return np.diag(self.lattice.generator) * np.asarray(self.period)

    @cached_property
    def _index(self):
        return {tuple(p): i for i, p in enumerate(self.points.tolist())}

    def index_of(self, k):
        return self._index.get(tuple(int(v) for v in k))

    def contains(self, k):
        return self.index_of(self._wrap(np.asarray(k))) is not None

    def _wrap(self, k):
        if self.period is None:
            return k
        return np.mod(k, np.asarray(self.period))

    def membership(self, ks):
        """Boolean mask: which rows of ``ks`` (integer coords) lie in the domain."""
        ks = self._wrap(np.asarray(ks, dtype=np.int64).reshape(-1, self.dim))
        if len(self) == 0 or len(ks) == 0:
            return np.zeros(len(ks), dtype=bool)
        lo = np.minimum(self.points.min(0), ks.min(0))
        span = np.maximum(self.points.max(0), ks.max(0)) - lo + 1
        return np.isin(_encode(ks - lo, span), _encode(self.points - lo, span))

    def subset(self, keep):
        keep = np.asarray(keep, dtype=bool)
        w = None if self.weights is None else self.weights[keep]
        return DiscreteDomain(self.lattice, self.points[keep], self.mass, w, self.period)

    def translate(self, shift):
        pts = self.points + np.asarray(shift, dtype=np.int64)
        return DiscreteDomain.from_points(self.lattice, pts, self.mass, self.weights, self.period)

    def with_lattice(self, lattice, mass=None):
        return DiscreteDomain.from_points(lattice, self.points, mass, self.weights, self.period)

    def diameter(self):
        return _diameter(self.ambient, self.ambient_period)

    def __repr__(self):
        return f"DiscreteDomain(n={len(self)}, d={self.dim}, mass={self.mass:g})"


def _encode(ks, span):
    key = np.zeros(len(ks), dtype=np.int64)
    for j in range(ks.shape[1]):
        key = key * int(span[j]) + ks[:, j]
    return key


def wrapped_difference(diff, period):
    if period is None:
        return diff
    period = np.asarray(period, dtype=float)
    return diff - period * np.round(diff / period)


def _diameter(x, period=None, chunk=2048):
    if len(x) < 2:
        return 0.0
    best = 0.0
    for i in range(0, len(x), chunk):
        diff = wrapped_difference(x[i : i + chunk, None, :] - x[None, :, :], period)
        best = max(best, float(np.sqrt((diff**2).sum(-1)).max()))
    return best


# --------------------------------------------------------------------------
# continuous shapes


@dataclass(frozen=True)
class ContinuousDomain:
    """Rectangle, disk or simple polygon in R^1 or R^2 (closed).

    ``kappa_reg`` and ``eta`` are regularity parameters supplied by the user when a
    bound needs them; nothing here estimates them.
    """

    kind: str
    params: tuple
    dim: int = 2
    kappa_reg: float | None = None
    eta: float | None = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InputError("only dimensions 1 and 2 are supported")
        if self.kind == "rect":
            lo, hi = (np.asarray(p, dtype=float).reshape(self.dim) for p in self.params)
            if np.any(hi <= lo):
                raise InputError("degenerate rectangle")
        elif self.kind == "disk":
            _, r = self.params
            if not r > 0:
                raise InputError("disk radius must be positive")
        elif self.kind == "poly":
            if self.dim != 2:
                raise InputError("polygons need d = 2")
            verts = np.asarray(self.params[0], dtype=float)
            if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
                raise InputError("polygon needs at least 3 vertices in the plane")
            if not shapely.LinearRing(verts).is_simple:
                raise InputError("polygon is not simple")
        else:
            raise InputError(f"unknown shape kind {self.kind!r}")
        for name in ("kappa_reg", "eta"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InputError(f"{name} must be positive")

    @cached_property
    def _polygon(self):
        return shapely.Polygon(np.asarray(self.params[0], dtype=float))

    def bbox(self):
        if self.kind == "rect":
            lo, hi = self.params
            return np.asarray(lo, float).reshape(self.dim), np.asarray(hi, float).reshape(self.dim)
        if self.kind == "disk":
            c, r = self.params
            c = np.asarray(c, float).reshape(self.dim)
            return c - r, c + r
        v = np.asarray(self.params[0], float)
        return v.min(0), v.max(0)

    def contains(self, x, tol=1e-9):
        """Closed membership for an ``(n, d)`` array of ambient points."""
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        if self.kind == "rect":
            lo, hi = self.bbox()
            return np.all((x >= lo - tol) & (x <= hi + tol), axis=1)
        if self.kind == "disk":
            c, r = self.params
            c = np.asarray(c, float).reshape(self.dim)
            return np.sqrt(((x - c) ** 2).sum(1)) <= r + tol
        if len(x) == 0:
            return np.zeros(0, dtype=bool)
        return shapely.dwithin(self._polygon, shapely.points(x), tol)

    def centroid(self):
        if self.kind == "disk":
            return np.asarray(self.params[0], float).reshape(self.dim)
        if self.kind == "rect":
            lo, hi = self.bbox()
            return (lo + hi) / 2
        c = self._polygon.centroid
        return np.array([c.x, c.y])

    def dilated(self, R):
        """``R * Omega`` taken about the shape's centroid."""
        c = self.centroid()
        if self.kind == "rect":
            lo, hi = self.bbox()
            params = (c + R * (lo - c), c + R * (hi - c))
        elif self.kind == "disk":
            params = (self.params[0], R * self.params[1])
        else:
            params = (c + R * (np.asarray(self.params[0], float) - c),)
        if self.dim == 1:
            params = tuple(p.item() if isinstance(p, np.ndarray) else p for p in params)
        return ContinuousDomain(self.kind, params, self.dim, self.kappa_reg, self.eta)

    def area(self):
        if self.kind == "rect":
            lo, hi = self.bbox()
            return float(np.prod(hi - lo))
        if self.kind == "disk":
            r = self.params[1]
            return 2.0 * r if self.dim == 1 else math.pi * r**2
        return float(self._polygon.area)


def rectangle(lo, hi, **kw):
    lo, hi = np.atleast_1d(lo).astype(float), np.atleast_1d(hi).astype(float)
    return ContinuousDomain("rect", (tuple(lo), tuple(hi)), len(lo), **kw)


def disk(center, radius, **kw):
    c = np.atleast_1d(center).astype(float)
    return ContinuousDomain("disk", (tuple(c), float(radius)), len(c), **kw)


def polygon(vertices, **kw):
    v = tuple(tuple(float(t) for t in p) for p in vertices)
    return ContinuousDomain("poly", (v,), 2, **kw)


def continuous_perimeter(domain):
    """Codimension-one measure of the boundary (for d = 1: number of endpoints)."""
    if domain.dim == 1:
        return 2.0
    if domain.kind == "rect":
        lo, hi = domain.bbox()
        return float(2 * (hi - lo).sum())
    if domain.kind == "disk":
        return 2 * math.pi * domain.params[1]
    v = np.asarray(domain.params[0], float)
    return float(np.sqrt(((np.roll(v, -1, axis=0) - v) ** 2).sum(1)).sum())


def integer_box(lattice, lo, hi):
    """All integer ``k`` whose image ``A k`` can fall inside the ambient box [lo, hi]."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    corners = np.array(list(product(*zip(lo, hi))))
    pre = corners @ lattice.inverse.T
    kmin = np.floor(pre.min(0) - 1e-9).astype(np.int64)
    kmax = np.ceil(pre.max(0) + 1e-9).astype(np.int64)
    axes = [np.arange(a, b + 1) for a, b in zip(kmin, kmax)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return grid.reshape(-1, lattice.dim)


def discretize(domain, lattice):
    """``Omega ∩ Lambda`` as a DiscreteDomain with mass ``|Lambda|`` per point."""
    if domain.dim != lattice.dim:
        raise InputError("shape and lattice dimensions differ")
    lo, hi = domain.bbox()
    ks = integer_box(lattice, lo, hi)
    keep = domain.contains(lattice.ambient(ks))
    return DiscreteDomain.from_points(lattice, ks[keep])


# --------------------------------------------------------------------------
# boundaries and perimeters


def _unit_steps(d):
    eye = np.eye(d, dtype=np.int64)
    return np.concatenate([eye, -eye])


def discrete_boundary(domain):
    """Points of the domain with a unit-distance integer neighbour outside it."""
    if len(domain) == 0:
        return domain
    outside = np.zeros(len(domain), dtype=bool)
    for step in _unit_steps(domain.dim):
        outside |= ~domain.membership(domain.points + step)
    return domain.subset(outside)


def lattice_perimeter(domain):
    """``||A||^-1 * mu(boundary)``."""
    bd = discrete_boundary(domain)
    return bd.measure() / domain.lattice.norm


def edge_perimeter(domain):
    """Unit-neighbour pairs (x in Omega, y outside) weighted by ``mass / ||A||``.

    This is the interaction integral of the unit-step kernel across the boundary
    and serves as the independent proxy in :func:`perimeter_sandwich_check`.
    """
    if len(domain) == 0:
        return 0.0
    count = 0
    for step in _unit_steps(domain.dim):
        count += int((~domain.membership(domain.points + step)).sum())
    return count * domain.mass / domain.lattice.norm


@dataclass(frozen=True)
class SandwichReport:
    lower: float
    upper: float
    lattice_perimeter: float
    proxy: float
    slack: float

    @property
    def within(self):
        return self.lower / self.slack <= self.proxy <= self.upper * self.slack

    @property
    def ratio(self):
        return self.proxy / self.lower if self.lower > 0 else math.nan


def perimeter_sandwich_check(domain, slack=10.0):
    per = lattice_perimeter(domain)
    upper = domain.lattice.cond ** (2 * domain.dim) * per
    return SandwichReport(per, upper, per, edge_perimeter(domain), slack)


# --------------------------------------------------------------------------
# inflation constant and doubling


def inflation_levels(domain):
    """Largest dyadic level ``n_max`` used for the inflation supremum."""
    return math.ceil(math.log2(domain.diameter() + 2)) + 2


def _universe(domain, radius):
    if domain.period is not None:
        axes = [np.arange(p) for p in domain.period]
        return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, domain.dim)
    x = domain.ambient
    return integer_box(domain.lattice, x.min(0) - radius, x.max(0) + radius)


def _nearest(src, dst, bound, period):
    """Distance from each ``src`` row to the nearest ``dst`` row (inf beyond ``bound``)."""
    if len(dst) == 0:
        return np.full(len(src), np.inf)
    if period is not None:
        tree = cKDTree(dst, boxsize=period)
    else:
        tree = cKDTree(dst)
    dist, _ = tree.query(src, distance_upper_bound=bound)
    return dist


def inflation_profile(domain, gamma):
    """Per-level terms ``(n, outer, inner)`` of the inflation supremum.

    ``outer`` is ``mu({x outside : d(x, Omega) <= 2^n})`` and ``inner`` is
    ``mu({x in Omega : d(x, Omega^c) <= 2^n})``, both before the ``2^(-gamma(n-1))``
    normalisation.
    """
    if len(domain) == 0:
        return []
    n_max = inflation_levels(domain)
    radius = 2.0**n_max
    universe = _universe(domain, radius)
    out_pts = universe[~domain.membership(universe)]
    per = domain.ambient_period
    amb_in = domain.ambient if per is None else np.mod(domain.ambient, per)
    amb_out = domain.lattice.ambient(out_pts)
    bound = radius * (1 + 1e-9) + 1e-9
    d_out = _nearest(amb_out, amb_in, bound, per)
    d_in = _nearest(amb_in, amb_out, bound, per)
    masses = domain.point_masses
    rows = []
    for n in range(n_max + 1):
        r = 2.0**n * (1 + _DIST_RTOL)
        outer = float((d_out <= r).sum()) * domain.mass
        inner = float(masses[d_in <= r].sum())
        rows.append((n, outer, inner))
    return rows


def inflation_constant(domain, gamma):
    """``sup_{n, E} 2^(-gamma (n-1)) mu({x in E^c : d(x, E) <= 2^n})`` over ``n <= n_max``.

    Distances are Euclidean in ambient coordinates (wrapped on a torus).  The
    empty domain gives 0.
    """
    best = 0.0
    for n, outer, inner in inflation_profile(domain, gamma):
        best = max(best, 2.0 ** (-gamma * (n - 1)) * max(outer, inner))
    return best


def ball_count(lattice, center, r):
    c = np.asarray(center, dtype=float).reshape(lattice.dim)
    x = lattice.ambient(c)
    ks = integer_box(lattice, x - r, x + r)
    d = np.sqrt(((lattice.ambient(ks) - x) ** 2).sum(1))
    return int((d <= r * (1 + _DIST_RTOL)).sum())


def doubling_ratio(lattice, centers, radii):
    """Max over all (center, radius) samples of ``#B_2r / #B_r`` (closed balls)."""
    best = 0.0
    for c in np.atleast_2d(centers):
        for r in np.atleast_1d(radii):
            if not r > 0:
                raise InputError("radii must be positive")
            best = max(best, ball_count(lattice, c, 2 * r) / ball_count(lattice, c, r))
    return best
