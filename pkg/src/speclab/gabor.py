"""Finite periodic Gabor analysis on C^L.

Time-frequency shifts act by ``(pi(x, xi) f)[t] = f[t - x] exp(2 pi i xi t / L)``.
The TF plane is the torus Z_L x Z_L (time, frequency); each of its L^2 points
carries mass 1/L, so a lattice point of aZ_L x bZ_L carries mass ab/L.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (BadDivisor, InputError, NotAFrame, NotOrthonormal,
                     WeightsNotNormalized)
from .frames import FrameSystem, multiplier_hermitian, frame_multiplier
from .lattice import DiscreteDomain, LatticeSpec
from .spectral import count_above, hermitian_eigenvalues, plunge_count

ORTHO_TOL = 1e-10


def tf_shift(x, xi, f):
    f = np.asarray(f, dtype=np.complex128)
    L = f.shape[-1]
    t = np.arange(L)
    return np.roll(f, x, axis=-1) * np.exp(2j * np.pi * xi * t / L)


def stft(g, f):
    """``V[n, m] = <f, pi(n, m) g>`` on the full L x L grid."""
    g = np.asarray(g, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    if g.shape != f.shape or g.ndim != 1:
        raise InputError("window and signal must be 1-d of equal length")
    if not np.any(g):
        raise InputError("window must be nonzero")
    L = g.shape[0]
    # rows: conj(g[t - n])
    idx = (np.arange(L)[None, :] - np.arange(L)[:, None]) % L
    return np.fft.fft(f[None, :] * g.conj()[idx], axis=1)


# -- windows ---------------------------------------------------------------

def _unit(v):
    v = np.asarray(v, dtype=np.complex128)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise InputError("window has zero norm")
    return v / nrm


def gauss_window(L):
    t = np.arange(L, dtype=float)
    k = np.arange(-4, 5, dtype=float)[:, None]
    return _unit(np.exp(-np.pi * (t[None, :] + k * L) ** 2 / L).sum(0))


def boxcar_window(L, w):
    if not 1 <= w <= L:
        raise InputError(f"boxcar width must lie in [1, {L}], got {w}")
    g = np.zeros(L)
    g[(np.arange(w) - w // 2) % L] = 1.0
    return _unit(g)


def hermite_windows(L, n):
    """First ``n`` discrete Hermite-like windows: Gram-Schmidt of t^k times the Gaussian."""
    if not 1 <= n <= L:
        raise InputError(f"need 1 <= n <= {L}")
    t = (np.arange(L) + L // 2) % L - L // 2
    base = gauss_window(L).real
    raw = np.stack([base * (t / np.sqrt(L)) ** k for k in range(n)], axis=1)
    q, _ = np.linalg.qr(raw.astype(np.complex128))
    return q.T


def read_vectors(path, L=None):
    """One vector per non-blank line, entries as Python complex tokens (``1+2j``)."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([complex(tok) for tok in line.replace(",", " ").split()])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise InputError(f"{path}: need one or more vectors of equal length")
    out = np.asarray(rows, dtype=np.complex128)
    if L is not None and out.shape[1] != L:
        raise InputError(f"{path}: vectors have length {out.shape[1]}, expected {L}")
    return out


def make_window(spec, L):
    """Parse ``gauss``, ``boxcar:w`` or ``file:@path`` into a unit-norm window."""
    name, _, arg = str(spec).partition(":")
    if name == "gauss" and not arg:
        return gauss_window(L)
    if name == "boxcar":
        try:
            return boxcar_window(L, int(arg))
        except ValueError:
            raise InputError(f"bad boxcar width {arg!r}") from None
    if name == "file" and arg.startswith("@"):
        vecs = read_vectors(arg[1:], L)
        if len(vecs) != 1:
            raise InputError("window file must hold exactly one vector")
        return _unit(vecs[0])
    raise InputError(f"unknown window spec {spec!r}")


def make_windows(spec, L):
    """Window family for mixed states: ``hermite:n`` or ``@path`` / ``file:@path``."""
    spec = str(spec)
    if spec.startswith("hermite:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad window family {spec!r}") from None
        return hermite_windows(L, n)
    if spec.startswith("file:"):
        spec = spec[5:]
    if spec.startswith("@"):
        return read_vectors(spec[1:], L)
    raise InputError(f"unknown window family {spec!r}")


# -- Gabor systems ---------------------------------------------------------

def gabor_index(L, a, b):
    lattice = LatticeSpec.diagonal(a, b)
    n, m = np.meshgrid(np.arange(L // a), np.arange(L // b), indexing="ij")
    pts = np.stack([n.ravel(), m.ravel()], axis=1)
    return DiscreteDomain.from_points(lattice, pts, mass=a * b / L, period=(L // a, L // b))


def gabor_vectors(g, a, b):
    """Rows ``pi(n a, m b) g`` in row-major (n, m) order."""
    L = g.shape[0]
    t = np.arange(L)
    shifted = np.stack([np.roll(g, n * a) for n in range(L // a)])
    mods = np.exp(2j * np.pi * np.outer(np.arange(L // b) * b, t) / L)
    return (shifted[:, None, :] * mods[None, :, :]).reshape(-1, L)


@dataclass(frozen=True, eq=False)
class GaborSystem:
    L: int
    a: int
    b: int
    window: np.ndarray
    frame: FrameSystem = field(repr=False)

    @property
    def redundancy(self):
        return Fraction(self.L, self.a * self.b)

    @property
    def mass(self):
        return self.a * self.b / self.L

    @property
    def index(self):
        return self.frame.index

    @cached_property
    def dual(self):
        """Canonical dual window ``S^-1 g`` (the dual vector at index (0, 0))."""
        return self.frame.dual[:, 0].copy()

    def wexler_raz(self):
        """``<g, g^d>``; equals ab/L for a validated frame."""
        return complex(np.vdot(self.dual, self.window))


def build_gabor_frame(L, a, b, window="gauss"):
    L, a, b = int(L), int(a), int(b)
    if L < 1 or a < 1 or b < 1:
        raise InputError("L, a, b must be positive")
    if L % a or L % b:
        raise BadDivisor(f"steps ({a}, {b}) must divide L = {L}")
    g = make_window(window, L) if isinstance(window, str) else _unit(window)
    if g.shape != (L,):
        raise InputError(f"window must have length {L}")
    frame = FrameSystem(gabor_index(L, a, b), gabor_vectors(g, a, b))
    frame.require_frame()
    return GaborSystem(L, a, b, g, frame)


def dual_window(system):
    return system.dual


def tf_mask(shape, L, a=1, b=1):
    """Lattice points ``(n a, m b)`` of the TF torus lying in ``shape``.

    A point belongs to the mask when any of its periodic images (shifts by
    -L, 0, L in each coordinate) lies in the closed shape.
    """
    n, m = np.meshgrid(np.arange(L // a), np.arange(L // b), indexing="ij")
    k = np.stack([n.ravel(), m.ravel()], axis=1)
    x = k * np.array([a, b], dtype=float)
    inside = np.zeros(len(k), dtype=bool)
    for sx in (-L, 0, L):
        for sy in (-L, 0, L):
            inside |= shape.contains(x + np.array([sx, sy], dtype=float))
    return DiscreteDomain.from_points(LatticeSpec.diagonal(a, b), k[inside],
                                      mass=a * b / L, period=(L // a, L // b))


def gabor_multiplier(system, mask):
    return frame_multiplier(system.frame, mask)


def gabor_spectrum(system, mask):
    """Profile of the multiplier via its Hermitian similarity ``S^-1/2 A S^-1/2``."""
    return hermitian_eigenvalues(multiplier_hermitian(system.frame, mask))


def localization_operator(g, mask):
    """``(1/L) sum_{lambda in mask} (pi(lambda) g)(pi(lambda) g)^*`` by explicit outer products."""
    g = np.asarray(g, dtype=np.complex128)
    L = g.shape[0]
    pts = mask.ambient.astype(np.int64) if len(mask) else np.zeros((0, 2), dtype=np.int64)
    V = np.stack([tf_shift(x, xi, g) for x, xi in pts]) if len(pts) else np.zeros((0, L))
    return (V.T @ V.conj()) / L


def _check_mixed(windows, weights):
    W = np.atleast_2d(np.asarray(windows, dtype=np.complex128))
    nu = np.asarray(weights, dtype=np.complex128).reshape(-1)
    if len(nu) != len(W):
        raise InputError(f"{len(W)} windows but {len(nu)} weights")
    G = W.conj() @ W.T
    if np.abs(G - np.eye(len(W))).max() > ORTHO_TOL:
        raise NotOrthonormal("windows are not orthonormal to 1e-10")
    if abs(np.sum(np.abs(nu) ** 2) - 1) > ORTHO_TOL:
        raise WeightsNotNormalized("sum |nu|^2 must equal 1 to 1e-10")
    return W, np.abs(nu) ** 2


def mixed_state_multiplier(windows, weights, mask):
    """``sum_n |nu_n|^2 (1/L) sum_{lambda in mask} pi(lambda) g_n g_n^* pi(lambda)^*``.

    Assembled from the density ``R = sum |nu_n|^2 g_n g_n^*``: the conjugate
    ``pi(x, xi) R pi(x, xi)^*`` has entries ``R[t-x, u-x] e^{2 pi i xi (t-u)/L}``,
    so the frequency sum per time shift collapses to one inverse FFT.
    """
    W, p = _check_mixed(windows, weights)
    L = W.shape[1]
    R = (W.T * p) @ W.conj()
    A = np.zeros((L, L), dtype=np.complex128)
    if len(mask) == 0:
        return A
    x = mask.ambient.astype(np.int64) % L
    diff = (np.arange(L)[:, None] - np.arange(L)[None, :]) % L
    for shift in np.unique(x[:, 0]):
        ind = np.zeros(L)
        ind[x[x[:, 0] == shift, 1]] = 1.0
        c = L * np.fft.ifft(ind)
        A += np.roll(R, (shift, shift), axis=(0, 1)) * c[diff]
    A /= L
    return 0.5 * (A + A.conj().T)


def mixed_state_by_windows(windows, weights, mask):
    """Same operator as a weighted sum of single-window localization operators."""
    W, p = _check_mixed(windows, weights)
    return sum(pn * localization_operator(g, mask) for g, pn in zip(W, p))


def full_torus(L):
    k = np.stack(np.meshgrid(np.arange(L), np.arange(L), indexing="ij"), -1).reshape(-1, 2)
    return DiscreteDomain.from_points(LatticeSpec.identity(2), k, mass=1 / L, period=(L, L))


# -- refinement ------------------------------------------------------------

REFINE_S = (0.0, 2.0, 4.0)


@dataclass(frozen=True)
class RungResult:
    a: int
    b: int
    frame_ok: bool
    mask_size: int = 0
    mu_omega: float = float("nan")
    counts: dict = field(default_factory=dict)
    plunges: dict = field(default_factory=dict)
    n_of_s: dict = field(default_factory=dict)
    error: str = ""
    eigenvalues: tuple = ()

    def deviation(self, delta):
        return abs(self.counts[delta] - self.mu_omega)


def _plunge_or_none(profile, delta):
    d = min(delta, 1 - delta)
    return None if d >= 0.5 else plunge_count(profile, d)


def _rung(window, shape, L, a, b, deltas, s_values):
    from .bounds import dyadic_decay, kernel_from_gabor

    try:
        system = build_gabor_frame(L, a, b, window)
    except NotAFrame as exc:
        return RungResult(a, b, False, error=str(exc))
    mask = tf_mask(shape, L, a, b)
    prof = gabor_spectrum(system, mask)
    mu = system.frame.measure(mask)
    kern = kernel_from_gabor(system)
    return RungResult(
        a, b, True, len(mask), mu,
        {d: count_above(prof, d) for d in deltas},
        {d: _plunge_or_none(prof, d) for d in deltas},
        {s: dyadic_decay(kern, s) for s in s_values},
        eigenvalues=tuple(prof.eigenvalues.tolist()),
    )


def refinement_study(window, shape, L, ladder, deltas, s_values=REFINE_S, workers=1):
    """Run each rung (a, b) of the ladder; rungs that are not frames are flagged, not fatal."""
    deltas = sorted(set(float(d) for d in deltas))
    args = [(window, shape, L, int(a), int(b), deltas, tuple(s_values)) for a, b in ladder]
    if workers > 1 and len(args) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda x: _rung(*x), args))
    return [_rung(*x) for x in args]
