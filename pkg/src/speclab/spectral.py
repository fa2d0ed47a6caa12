"""Eigenvalue profiles of Hermitian operators and the functionals read off them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jacobi import jacobi_sweeps
from .errors import DeltaOutOfRange, NoConvergence, NotHermitian, POutOfRange, InputError

JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
CLIP_TOL = 1e-10
TRACE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    eigenvalues: np.ndarray  # sorted descending
    trace: float
    dimension: int

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.shape != (self.dimension,):
            raise InputError("profile length must equal the dimension")
        if np.any(np.diff(ev) > 0):
            raise InputError("eigenvalues must be sorted descending")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @classmethod
    def from_values(cls, values, trace=None):
        ev = np.sort(np.asarray(values, dtype=float))[::-1].copy()
        return cls(ev, float(ev.sum()) if trace is None else float(trace), len(ev))

    def __len__(self):
        return self.dimension

    def clipped(self):
        """Eigenvalues clipped to [0, 1]; excursions beyond ``CLIP_TOL`` are errors."""
        ev = self.eigenvalues
        if ev.size and (ev.min() < -CLIP_TOL or ev.max() > 1 + CLIP_TOL):
            raise InputError(
                f"eigenvalues leave [0, 1] by more than {CLIP_TOL}: "
                f"range [{ev.min():.3e}, {ev.max():.3e}]"
            )
        return np.clip(ev, 0.0, 1.0)


def hermitian_eigenvalues(matrix, trace_check=True):
    """All eigenvalues of a Hermitian matrix by cyclic Jacobi, sorted descending."""
    a = np.array(matrix, dtype=np.complex128, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"square matrix required, got {a.shape}")
    n = a.shape[0]
    scale = np.abs(a).max() if a.size else 0.0
    if np.abs(a - a.conj().T).max(initial=0.0) > 1e-10 * scale:
        raise NotHermitian("matrix is not Hermitian to 1e-10 relative")
    a = 0.5 * (a + a.conj().T)
    trace = float(np.trace(a).real)
    if n == 0:
        return SpectralProfile(np.zeros(0), 0.0, 0)
    d, _, converged = jacobi_sweeps(a, JACOBI_TOL, MAX_SWEEPS)
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps (n={n})")
    profile = SpectralProfile.from_values(d, trace)
    if trace_check:
        ref = max(abs(trace), float(np.sqrt((np.abs(matrix) ** 2).sum())), 1e-300)
        if abs(profile.eigenvalues.sum() - trace) > TRACE_RTOL * ref:
            raise NoConvergence("eigenvalue sum disagrees with the trace")
    return profile


def count_above(profile, delta):
    """``#{lambda > delta}`` (strict)."""
    return int((profile.eigenvalues > delta).sum())


def plunge_count(profile, delta):
    """``#{delta < lambda < 1 - delta}`` for ``0 < delta < 1/2``."""
    if not 0 < delta < 0.5:
        raise DeltaOutOfRange(f"plunge needs 0 < delta < 1/2, got {delta}")
    ev = profile.eigenvalues
    return int(((ev > delta) & (ev < 1 - delta)).sum())


def spectral_deviation(profile, delta, target):
    return abs(count_above(profile, delta) - target)


def tau(delta):
    if not 0 < delta < 1:
        raise DeltaOutOfRange(f"delta must lie in (0, 1), got {delta}")
    return max(1 / delta, 1 / (1 - delta))


def hankel_schatten(profile, p):
    """``||H||_{S_p}^p = sum (lambda - lambda^2)^(p/2)``, using ``H*H = T - T^2``."""
    if not 0 < p <= 2:
        raise POutOfRange(f"p must lie in (0, 2], got {p}")
    ev = profile.clipped()
    return float(np.sum((ev - ev**2) ** (p / 2)))


@dataclass(frozen=True)
class DeviationCheck:
    lhs: float
    rhs: float
    holds: bool


def deviation_inequality_check(profile, delta, p, target=None):
    """``|#{lambda > delta} - target| <= 2 tau^(p/2) ||H||_{S_p}^p``.

    ``target`` defaults to the eigenvalue sum, which is the setting where the
    inequality is guaranteed (it equals ``mu(Omega)`` for normalised kernels).
    """
    if target is None:
        target = float(profile.eigenvalues.sum())
    lhs = abs(count_above(profile, delta) - target)
    rhs = 2 * tau(delta) ** (p / 2) * hankel_schatten(profile, p)
    return DeviationCheck(lhs, rhs, bool(lhs <= rhs + 1e-9))
