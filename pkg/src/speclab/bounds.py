"""Kernel decay measures and the right-hand sides of the spectral deviation bounds.

All right-hand sides omit the unspecified absolute constants.  Powers are taken
in log space; anything above ``exp(700)`` is reported as ``inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AllInfinite, InputError, NonPositiveInput
from .lattice import DiscreteDomain, LatticeSpec, wrapped_difference

LOG_MAX = 700.0
SYM_RTOL = 1e-10
C1_TOL = 1e-8
SHAPE_SLACK = 8.0
_BIN_TOL = 1e-12


def log_star(x):
    if not x > 0:
        raise NonPositiveInput(f"log* needs x > 0, got {x}")
    return max(1.0, math.log(x))


def default_s_grid(gamma):
    return [gamma * 2 ** (k / 4) for k in range(17)]


def doubling_s_grid():
    return [2 ** (k / 4) for k in range(17)]


def _dyadic_bins(d):
    """Annulus index: 0 for ``d <= 1``, else ``n`` with ``2^(n-1) < d <= 2^n``."""
    out = np.zeros(d.shape, dtype=np.int64)
    far = d > 1 + _BIN_TOL
    out[far] = np.ceil(np.log2(d[far]) - _BIN_TOL).astype(np.int64)
    return out


@dataclass(frozen=True, eq=False)
class KernelOnDomain:
    """Squared kernel magnitudes on a finite metric measure space.

    ``k2[x, y] = |K(x, y)|^2``; ``points`` are ambient coordinates and ``period``
    (ambient) switches on wrap-around distances.  ``index`` optionally records the
    integer coordinates so masks can be given as DiscreteDomains.
    """

    points: np.ndarray
    masses: np.ndarray
    k2: np.ndarray
    period: np.ndarray | None = None
    normalized: bool = False
    index: DiscreteDomain | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        k2 = np.asarray(self.k2, dtype=float)
        n = len(pts)
        if m.shape != (n,) or k2.shape != (n, n):
            raise InputError("kernel, points and masses disagree in size")
        if np.any(k2 < 0) or np.any(m <= 0):
            raise InputError("kernel magnitudes must be >= 0 and masses > 0")
        if np.abs(k2 - k2.T).max(initial=0.0) > SYM_RTOL * max(k2.max(initial=0.0), 1e-300):
            raise InputError("kernel magnitudes are not symmetric")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "k2", k2)
        if self.period is not None:
            object.__setattr__(self, "period", np.asarray(self.period, dtype=float))
        if self.normalized:
            rows = k2 @ m
            if np.abs(rows - 1).max(initial=0.0) > C1_TOL:
                raise InputError("normalized flag set but weighted row norms differ from 1")

    def __len__(self):
        return len(self.masses)

    @cached_property
    def distances(self):
        x = self.points
        diff = wrapped_difference(x[:, None, :] - x[None, :, :], self.period)
        return np.sqrt((diff**2).sum(-1))

    def row_norms(self):
        return self.k2 @ self.masses

    def mask_vector(self, mask):
        if isinstance(mask, DiscreteDomain):
            if self.index is None:
                raise InputError("this kernel has no index; pass a boolean mask")
            return mask.membership(self.index.points) if len(mask) else np.zeros(len(self), bool)
        mask = np.asarray(mask)
        if mask.dtype == bool:
            if mask.shape != (len(self),):
                raise InputError("boolean mask has the wrong length")
            return mask
        out = np.zeros(len(self), dtype=bool)
        out[mask.astype(np.int64)] = True
        return out


@dataclass(frozen=True, eq=False)
class TranslationKernel:
    """Kernel on the integer torus ``Z_P`` with ``|K(x, y)|^2 = profile[(x - y) mod P]``.

    ``steps`` maps integer coordinates to ambient ones (diagonal generator); every
    point carries the same ``mass``.
    """

    profile: np.ndarray
    steps: tuple
    mass: float
    normalized: bool = False

    def __post_init__(self):
        prof = np.asarray(self.profile, dtype=float)
        if len(self.steps) != prof.ndim:
            raise InputError("one step per torus axis required")
        if np.any(prof < 0) or not self.mass > 0:
            raise InputError("profile must be >= 0 and mass > 0")
        flipped = np.roll(np.flip(prof), 1, axis=tuple(range(prof.ndim)))
        if np.abs(prof - flipped).max() > SYM_RTOL * max(prof.max(), 1e-300):
            raise InputError("profile is not even, kernel magnitudes not symmetric")
        object.__setattr__(self, "profile", prof)
        if self.normalized and abs(prof.sum() * self.mass - 1) > C1_TOL:
            raise InputError("normalized flag set but the row norm differs from 1")

    @property
    def shape(self):
        return self.profile.shape

    def __len__(self):
        return int(self.profile.size)

    @cached_property
    def index(self):
        axes = [np.arange(p) for p in self.shape]
        k = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(self.shape))
        lat = LatticeSpec.diagonal(*self.steps)
        return DiscreteDomain.from_points(lat, k, mass=self.mass, period=self.shape)

    @cached_property
    def offset_distances(self):
        """Wrapped ambient length of every offset ``v``, shaped like the profile."""
        k = self.index.points
        x = wrapped_difference(k * np.asarray(self.steps, float), self.index.ambient_period)
        return np.sqrt((x**2).sum(1)).reshape(self.shape)

    def row_norms(self):
        return np.full(len(self), self.profile.sum() * self.mass)

    def mask_vector(self, mask):
        if isinstance(mask, DiscreteDomain):
            if len(mask) == 0:
                return np.zeros(len(self), dtype=bool)
            return mask.membership(self.index.points)
        return KernelOnDomain.mask_vector(self, mask)

    def dense(self):
        k = self.index.points
        diff = np.mod(k[:, None, :] - k[None, :, :], np.asarray(self.shape))
        k2 = self.profile[tuple(diff[..., i] for i in range(k.shape[1]))]
        return KernelOnDomain(self.index.ambient, np.full(len(k), self.mass), k2,
                              self.index.ambient_period, self.normalized, self.index)


def dyadic_decay(kernel, s):
    """``N(s) = sum_n sup_x sum_{x' in A_(n,x)} (1 + d)^s |K|^2 mass(x')``.

    Translation-invariant kernels take the single-row form (every row has the
    same annulus sums).
    """
    if s < 0:
        raise InputError("s must be nonnegative")
    if isinstance(kernel, TranslationKernel):
        d = kernel.offset_distances
        return float(((1 + d) ** s * kernel.profile).sum() * kernel.mass)
    d = kernel.distances
    w = (1 + d) ** s * kernel.k2 * kernel.masses[None, :]
    bins = _dyadic_bins(d)
    nb = int(bins.max(initial=0)) + 1
    n = len(kernel)
    flat = (np.arange(n)[:, None] * nb + bins).ravel()
    per_row = np.bincount(flat, weights=w.ravel(), minlength=n * nb).reshape(n, nb)
    return float(per_row.max(0).sum()) if n else 0.0


def dyadic_decay_invariant(kernel, s, origin=0):
    """Group form ``sum_x (1 + d(e, x))^s |K(e, x)|^2 mass(x)`` read off one row."""
    if isinstance(kernel, TranslationKernel):
        return dyadic_decay(kernel, s)
    d = kernel.distances[origin]
    return float(((1 + d) ** s * kernel.k2[origin] * kernel.masses).sum())


def exp_decay_constant(kernel, alpha, beta):
    """``D = sup_x' sum_x exp(alpha d(x, x')^(1/beta)) |K(x, x')|^2 mass(x)``."""
    if not (alpha > 0 and beta > 0):
        raise NonPositiveInput("alpha and beta must be positive")
    with np.errstate(over="ignore"):
        if isinstance(kernel, TranslationKernel):
            e = np.exp(alpha * kernel.offset_distances ** (1 / beta))
            return float((e * kernel.profile).sum() * kernel.mass)
        e = np.exp(alpha * kernel.distances ** (1 / beta))
        cols = (e * kernel.k2 * kernel.masses[:, None]).sum(0)
    return float(cols.max(initial=0.0))


def boundary_interaction(kernel, mask):
    """``sum_{x in mask} sum_{y not in mask} |K(x, y)|^2 mass(x) mass(y)``."""
    inside = kernel.mask_vector(mask)
    if isinstance(kernel, TranslationKernel):
        k = inside.sum()
        if k == 0 or k == len(kernel):
            return 0.0
        ind = inside.reshape(kernel.shape).astype(float)
        f = np.fft.fftn(ind)
        auto = np.rint(np.fft.ifftn(f * f.conj()).real)  # pair counts per offset
        within = float((kernel.profile * auto).sum())
        total = float(k * kernel.profile.sum())
        return max(total - within, 0.0) * kernel.mass**2
    m = kernel.masses
    sub = kernel.k2[np.ix_(inside, ~inside)]
    return float(m[inside] @ sub @ m[~inside])


# -- right-hand sides --------------------------------------------------------

def _n_values(N, grid):
    if callable(N):
        return [float(N(s)) for s in grid]
    vals = [float(v) for v in N]
    if len(vals) != len(grid):
        raise InputError("N values must align with the s-grid")
    return vals


def _finish(inflation, logs, grid):
    finite = [(v, s) for v, s in zip(logs, grid) if v != math.inf]
    if not finite:
        raise AllInfinite("N(s) is infinite on the whole s-grid")
    best, s_star = min(finite, key=lambda t: t[0])
    if inflation == 0:
        return 0.0, s_star
    total = best + math.log(inflation)
    return (math.inf if total > LOG_MAX else math.exp(total)), s_star


def _log_tn(tau, n):
    if math.isnan(n) or n == math.inf:
        return math.inf
    if n <= 0:
        return -math.inf
    return math.log(tau) + math.log(n)


def rhs_theorem_main(inflation, gamma, tau, N, s_grid):
    """``inflation * min_s (tau N(s))^(gamma/s) (log*((tau N(s))^(1/s)))^(1 - gamma/s)``.

    Returns ``(value, s_star)``.
    """
    grid = [float(s) for s in s_grid]
    if not grid or min(grid) < gamma * (1 - 1e-12):
        raise InputError("s-grid must be nonempty and lie in [gamma, inf)")
    logs = []
    for s, n in zip(grid, _n_values(N, grid)):
        u = _log_tn(tau, n)
        if math.isinf(u):
            logs.append(u)
            continue
        e = gamma / s
        logs.append(e * u + (1 - e) * math.log(max(1.0, u / s)))
    return _finish(inflation, logs, grid)


def rhs_theorem_doubling(maxgeom, gamma, tau, N, s_grid):
    """``maxgeom * min_s (tau N)^(gamma/q) (log*((tau N)^(1/q)))^((s-1)/q)``, ``q = s + gamma - 1``."""
    grid = [float(s) for s in s_grid]
    if not grid or min(grid) < 1 - 1e-12:
        raise InputError("s-grid must be nonempty and lie in [1, inf)")
    logs = []
    for s, n in zip(grid, _n_values(N, grid)):
        u = _log_tn(tau, n)
        if math.isinf(u):
            logs.append(u)
            continue
        q = s + gamma - 1
        logs.append(gamma / q * u + (s - 1) / q * math.log(max(1.0, u / q)))
    return _finish(maxgeom, logs, grid)


def rhs_exponential(inflation, gamma, beta, tau, D):
    """``inflation * (log*(tau D))^(beta gamma) * log*(log*(tau D))``."""
    for name, v in (("inflation", inflation), ("gamma", gamma), ("beta", beta), ("tau", tau), ("D", D)):
        if not v > 0 and not (name == "inflation" and v == 0):
            raise NonPositiveInput(f"{name} must be positive")
    if inflation == 0:
        return 0.0
    if math.isinf(D):
        return math.inf
    x = max(1.0, math.log(tau) + math.log(D))
    total = beta * gamma * math.log(x) + math.log(max(1.0, math.log(x))) + math.log(inflation)
    return math.inf if total > LOG_MAX else math.exp(total)


# -- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class ShapeCheck:
    interaction: float
    budget: float
    slack: float

    @property
    def ratio(self):
        return self.interaction / self.budget if self.budget > 0 else (0.0 if self.interaction == 0 else math.inf)

    @property
    def holds(self):
        return self.interaction <= self.slack * self.budget + 1e-12


def interaction_shape_check(kernel, mask, inflation, gamma, slack=SHAPE_SLACK):
    """Boundary interaction against ``inflation * N(gamma)``, allowed a slack factor."""
    return ShapeCheck(boundary_interaction(kernel, mask), inflation * dyadic_decay(kernel, gamma), slack)


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")


@dataclass(frozen=True)
class BoundReport:
    s_grid: list
    N_of_s: list
    s_star: float
    rhs_main: float
    rhs_doubling: float | None = None
    rhs_exponential: float | None = None
    boundary_interaction: float = 0.0
    slack_factors: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "s_grid": [_json_float(s) for s in self.s_grid],
            "N_of_s": [_json_float(n) for n in self.N_of_s],
            "s_star": _json_float(self.s_star),
            "rhs_main": _json_float(self.rhs_main),
            "rhs_doubling": _json_float(self.rhs_doubling),
            "rhs_exponential": _json_float(self.rhs_exponential),
            "boundary_interaction": _json_float(self.boundary_interaction),
            "slack_factors": {k: _json_float(v) for k, v in sorted(self.slack_factors.items())},
        }


def bound_report(kernel, mask, inflation, gamma, tau, s_grid=None, perimeter=None,
                 alpha=None, beta=None, slack=SHAPE_SLACK):
    grid = list(s_grid) if s_grid is not None else default_s_grid(gamma)
    cache = {}

    def N(s):
        if s not in cache:
            cache[s] = dyadic_decay(kernel, s)
        return cache[s]

    n_vals = [N(s) for s in grid]
    main, s_star = rhs_theorem_main(inflation, gamma, tau, n_vals, grid)
    doubling = None
    if perimeter is not None:
        dgrid = doubling_s_grid()
        doubling, _ = rhs_theorem_doubling(max(inflation, perimeter), gamma, tau, N, dgrid)
    expo = None
    if alpha is not None and beta is not None:
        expo = rhs_exponential(inflation, gamma, beta, tau, exp_decay_constant(kernel, alpha, beta))
    check = ShapeCheck(boundary_interaction(kernel, mask), inflation * N(gamma), slack)
    return BoundReport(grid, n_vals, s_star, main, doubling, expo, check.interaction,
                       {"interaction_shape": slack, "interaction_shape_ratio": check.ratio})


# -- kernels from the operator modules -----------------------------------------

def kernel_from_frame(frame):
    """Normalized cross-Gram kernel with the omega weights as point masses."""
    from .frames import cross_gram_kernel

    K = cross_gram_kernel(frame)
    k2 = np.abs(K.matrix) ** 2
    k2 = 0.5 * (k2 + k2.T)
    idx = frame.index
    return KernelOnDomain(idx.ambient, K.weights, k2, idx.ambient_period, True, idx)


def kernel_from_gabor(system):
    """Translation-invariant form of the Gabor cross-Gram kernel.

    ``|K(l, l')| = |<g^d, pi(l - l') g>| / omega`` on the lattice torus, read off
    the STFT of the dual window.
    """
    from .gabor import stft

    V = stft(system.window, system.dual)[:: system.a, :: system.b]
    w = float(system.frame.omega[0])
    prof = np.abs(V) ** 2 / w**2
    prof = 0.5 * (prof + np.roll(np.flip(prof), 1, axis=(0, 1)))
    return TranslationKernel(prof, (system.a, system.b), w, True)
