"""Finite frames indexed by lattice points: duals, cross-Gram kernel, multipliers.

Vectors are stored as rows of an ``(n, M)`` complex array in the row-major order
of the index domain.  Inner products are linear in the first slot:
``<f, g> = sum f * conj(g)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import InputError, MaskNotSubset, NonPositiveOmega, NotAFrame
from .lattice import DiscreteDomain, wrapped_difference
from .spectral import hermitian_eigenvalues

FRAME_RTOL = 1e-10
OMEGA_MIN = 1e-12


class FrameSystem:
    def __init__(self, index, vectors):
        vectors = np.array(vectors, dtype=np.complex128)
        if vectors.ndim != 2 or vectors.shape[0] != len(index):
            raise InputError("need one vector per index point")
        if vectors.shape[0] == 0:
            raise InputError("a frame needs at least one vector")
        norms = np.sqrt((np.abs(vectors) ** 2).sum(1))
        if np.any(norms == 0):
            raise InputError("frame vectors must be nonzero")
        vectors.setflags(write=False)
        self.index = index
        self.vectors = vectors

    @classmethod
    def from_points(cls, lattice, points, vectors, mass=None, period=None):
        """Build from unsorted points; vectors are reordered with them."""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, lattice.dim)
        index = DiscreteDomain.from_points(lattice, pts, mass=mass, period=period)
        key = pts if period is None else np.mod(pts, period)
        order = np.lexsort(key.T[::-1])
        return cls(index, np.asarray(vectors)[order])

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def synthesis(self):
        """``M x n`` matrix whose columns are the frame vectors."""
        return self.vectors.T

    @cached_property
    def operator(self):
        Phi = self.synthesis
        S = Phi @ Phi.conj().T
        return 0.5 * (S + S.conj().T)

    @cached_property
    def bounds(self):
        ev = hermitian_eigenvalues(self.operator).eigenvalues
        return float(ev[-1]), float(ev[0])

    def is_frame(self):
        a, b = self.bounds
        return a > FRAME_RTOL * b

    def require_frame(self):
        if not self.is_frame():
            a, b = self.bounds
            raise NotAFrame(f"lower frame bound {a:.3e} <= {FRAME_RTOL} * {b:.3e}")

    @cached_property
    def _cho(self):
        self.require_frame()
        return sla.cho_factor(self.operator, lower=True)

    @cached_property
    def dual(self):
        """Canonical dual vectors as an ``M x n`` matrix (columns)."""
        return sla.cho_solve(self._cho, self.synthesis)

    @cached_property
    def gram(self):
        """``Q[l, l'] = <dual_l', phi_l>``: orthogonal projection onto the coefficient range."""
        Q = self.synthesis.conj().T @ self.dual
        return 0.5 * (Q + Q.conj().T)

    @cached_property
    def omega(self):
        # diagonal of the gram without forming it
        w = np.real((self.synthesis.conj() * self.dual).sum(0))
        if np.any(w <= OMEGA_MIN):
            raise NonPositiveOmega(f"omega weight {w.min():.3e} <= {OMEGA_MIN}")
        w.setflags(write=False)
        return w

    @cached_property
    def inv_sqrt_operator(self):
        self.require_frame()
        w, V = sla.eigh(self.operator)
        return (V * (1 / np.sqrt(w))) @ V.conj().T

    def measure(self, mask):
        """``mu_phi(mask) = sum of omega over the mask``."""
        return float(self.omega[self.mask_rows(mask)].sum())

    def weighted_index(self):
        return DiscreteDomain(self.index.lattice, self.index.points, self.index.mass,
                              self.omega, self.index.period)

    def mask_rows(self, mask):
        if isinstance(mask, DiscreteDomain):
            pts = mask.points
        else:
            pts = np.asarray(mask, dtype=np.int64).reshape(-1, self.index.dim)
        rows = []
        for k in pts:
            i = self.index.index_of(self.index._wrap(k))
            if i is None:
                raise MaskNotSubset(f"mask point {tuple(k)} not in the frame index set")
            rows.append(i)
        return np.asarray(rows, dtype=np.int64)


def frame_operator(frame):
    return frame.operator


def frame_bounds(frame):
    """``(a, b)``: extreme eigenvalues of S.  Raises NotAFrame when ``a <= 1e-10 b``."""
    frame.require_frame()
    return frame.bounds


def canonical_dual(frame):
    """Dual vectors ``S^-1 phi`` as rows, aligned with ``frame.vectors``."""
    return frame.dual.T


@dataclass(frozen=True)
class OmegaWeights:
    omega: np.ndarray
    theta: float  # sup
    vartheta: float  # inf
    c_phi: float


def omega_weights(frame):
    w = frame.omega
    theta, vartheta = float(w.max()), float(w.min())
    return OmegaWeights(w, theta, vartheta, theta**8 / (vartheta**7 * frame.index.mass))


@dataclass(frozen=True, eq=False)
class CrossGramKernel:
    """``K[l, l'] = <dual_l', phi_l> / sqrt(w_l w_l')`` with weights ``w``.

    As an operator on sequences with the weighted inner product,
    ``(P v)(l) = sum_l' K[l, l'] v(l') w_l'``.
    """

    matrix: np.ndarray
    weights: np.ndarray

    def projection(self):
        return self.matrix * self.weights[None, :]

    def row_norms(self):
        """Weighted squared row norms ``sum_l' |K[l, l']|^2 w_l'``."""
        return (np.abs(self.matrix) ** 2 * self.weights[None, :]).sum(1)


def cross_gram_kernel(frame):
    w = frame.omega
    s = np.sqrt(w)
    K = frame.gram / s[:, None] / s[None, :]
    np.fill_diagonal(K, 1.0)
    return CrossGramKernel(K, w)


def frame_multiplier(frame, mask):
    """``M f = sum_{l in mask} <f, phi_l> dual_l`` as an ``M x M`` matrix."""
    frame.require_frame()
    rows = frame.mask_rows(mask)
    Phi = frame.synthesis[:, rows]
    return frame.dual[:, rows] @ Phi.conj().T


def multiplier_hermitian(frame, mask):
    """``S^-1/2 A_mask S^-1/2``: Hermitian and similar to the frame multiplier."""
    rows = frame.mask_rows(mask)
    R = frame.inv_sqrt_operator
    Phi = R @ frame.synthesis[:, rows]
    H = Phi @ Phi.conj().T
    return 0.5 * (H + H.conj().T)


def concentration_operator(frame, mask):
    """``Q 1_mask Q`` on coefficient space, ``Q`` the cross-Gram projection.

    This is the weighted-space operator ``P 1_mask P`` conjugated by
    ``diag(sqrt(omega))``, so it is Hermitian for the plain inner product.
    """
    frame.require_frame()
    rows = frame.mask_rows(mask)
    Q = frame.gram
    T = Q[:, rows] @ Q[rows, :]
    return 0.5 * (T + T.conj().T)


def decay_profile(frame):
    """``u(v) = max |K[l, l']|`` over index pairs with ``l - l' = v``.

    Keys are integer difference tuples (reduced to ``[0, period)`` on a torus).
    """
    K = np.abs(cross_gram_kernel(frame).matrix)
    pts = frame.index.points
    period = frame.index.period
    out = {}
    for i in range(len(pts)):
        diff = pts[i] - pts
        if period is not None:
            diff = np.mod(diff, period)
        row = K[i]
        for key, val in zip(map(tuple, diff.tolist()), row.tolist()):
            if val > out.get(key, -1.0):
                out[key] = val
    return out


def index_distances(index):
    """Pairwise ambient distances between index points (wrapped on a torus)."""
    x = index.ambient
    diff = wrapped_difference(x[:, None, :] - x[None, :, :], index.ambient_period)
    return np.sqrt((diff**2).sum(-1))
