"""Discrete Fourier concentration operators ``T = P_I 1_J P_I`` on C^L.

Intervals are half-open and cyclic: ``(start, stop)`` covers
``start, start + 1, ..., stop - 1`` reduced mod L, with ``0 < stop - start <= L``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bounds import TranslationKernel
from .errors import DeltaOutOfRange, EmptyInterval, InputError
from .spectral import count_above, hermitian_eigenvalues, plunge_count


def interval_indices(interval, L):
    start, stop = (int(v) for v in interval)
    size = stop - start
    if size <= 0:
        raise EmptyInterval(f"interval [{start}, {stop}) is empty")
    if size > L:
        raise InputError(f"interval [{start}, {stop}) is longer than L = {L}")
    return np.arange(start, stop) % L


def dirichlet_kernel(L, I):
    """``p[d] = (1/L) sum_{k in I} exp(2 pi i k d / L)``: time-domain kernel of ``P_I``."""
    ind = np.zeros(L)
    ind[interval_indices(I, L)] = 1.0
    return np.fft.ifft(ind)


def band_projection(L, I):
    p = dirichlet_kernel(L, I)
    diff = (np.arange(L)[:, None] - np.arange(L)[None, :]) % L
    return p[diff]


@dataclass(frozen=True, eq=False)
class ProlateInstance:
    L: int
    I: tuple
    J: tuple
    operator: np.ndarray

    @property
    def size_I(self):
        return self.I[1] - self.I[0]

    @property
    def size_J(self):
        return self.J[1] - self.J[0]

    @property
    def trace(self):
        """``|I| |J| / L``."""
        return self.size_I * self.size_J / self.L

    @cached_property
    def profile(self):
        return hermitian_eigenvalues(self.operator)

    def time_mask(self):
        m = np.zeros(self.L, dtype=bool)
        m[interval_indices(self.J, self.L)] = True
        return m

    def kernel(self):
        """``|P_I(t, u)|^2`` on Z_L with unit masses, for boundary-interaction checks."""
        return TranslationKernel(np.abs(dirichlet_kernel(self.L, self.I)) ** 2, (1,), 1.0)


def prolate_operator(L, I, J):
    L = int(L)
    if L < 1:
        raise InputError("L must be positive")
    I = tuple(int(v) for v in I)
    J = tuple(int(v) for v in J)
    P = band_projection(L, I)
    j = interval_indices(J, L)
    T = P[:, j] @ P[j, :]
    return ProlateInstance(L, I, J, 0.5 * (T + T.conj().T))


@dataclass(frozen=True)
class PlungeRow:
    L: int
    size_I: int
    size_J: int
    trace: float
    count_half: int
    plunge: int
    log_regressor: float


@dataclass(frozen=True)
class PlungeFit:
    slope: float
    intercept: float
    r2: float


def fit_plunge(rows):
    """Least-squares fit of plunge against log(trace)."""
    x = np.array([math.log(r.trace) for r in rows])
    y = np.array([r.plunge for r in rows], dtype=float)
    if len(rows) < 2 or np.ptp(x) == 0:
        return PlungeFit(math.nan, math.nan, math.nan)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return PlungeFit(float(slope), float(intercept), r2)


def _study_row(L, sI, sJ, delta):
    inst = prolate_operator(L, (0, sI), (0, sJ))
    prof = inst.profile
    return PlungeRow(L, sI, sJ, inst.trace, count_above(prof, 0.5),
                     plunge_count(prof, delta), math.log(inst.trace / delta))


def plunge_study(lengths, sizes=None, delta=0.1, fraction=0.25, workers=1):
    """Plunge counts over a ladder of configurations.

    Without ``sizes`` each L uses ``|I| = |J| = round(fraction * L)``; with
    ``sizes`` every ``(L, s)`` pair with ``s <= L`` is run.  Rows come back in
    configuration order.
    """
    if not 0 < delta < 0.5:
        raise DeltaOutOfRange(f"plunge needs 0 < delta < 1/2, got {delta}")
    configs = []
    for L in lengths:
        L = int(L)
        if sizes is None:
            s = max(1, round(fraction * L))
            configs.append((L, s, s))
        else:
            configs.extend((L, int(s), int(s)) for s in sizes if int(s) <= L)
    if not configs:
        raise InputError("plunge study has no configurations")
    if workers > 1 and len(configs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda c: _study_row(*c, delta), configs))
    else:
        rows = [_study_row(*c, delta) for c in configs]
    return rows, fit_plunge(rows)
