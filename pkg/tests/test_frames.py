import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import random_frame, random_mask
from oracles import charpoly_eigenvalues, frame_operator_loop
from speclab.errors import InputError, MaskNotSubset, NotAFrame
from speclab.frames import (
    FrameSystem, canonical_dual, concentration_operator, cross_gram_kernel, decay_profile,
    frame_bounds, frame_multiplier, frame_operator, multiplier_hermitian, omega_weights,
)
from speclab.lattice import DiscreteDomain, LatticeSpec
from speclab.spectral import hermitian_eigenvalues


def onb(M, copies=1):
    vecs = np.concatenate([np.eye(M)] * copies).astype(complex)
    pts = np.arange(len(vecs))[:, None]
    return FrameSystem.from_points(LatticeSpec.identity(1), pts, vecs, mass=1.0)


def empty_mask(frame):
    return frame.index.subset(np.zeros(len(frame), bool))


def test_frame_operator_examples():
    assert np.allclose(frame_operator(onb(4)), np.eye(4))
    assert np.allclose(frame_operator(onb(3, 2)), 2 * np.eye(3))
    F = random_frame(np.random.default_rng(0), 4, 12)
    assert np.abs(frame_operator(F) - frame_operator_loop(F.vectors)).max() <= 1e-12


def test_bounds_examples():
    assert frame_bounds(onb(3)) == pytest.approx((1, 1))
    assert frame_bounds(onb(3, 2)) == pytest.approx((2, 2))


def test_lower_bound_matches_cubic_roots():
    F = random_frame(np.random.default_rng(5), 3, 4)
    roots = charpoly_eigenvalues(frame_operator(F))
    a, b = frame_bounds(F)
    assert a > 0
    assert (a, b) == pytest.approx((roots[-1], roots[0]), rel=1e-9)


def test_not_a_frame():
    vecs = np.array([[1, 0, 0], [2, 0, 0], [0, 1, 0]], dtype=complex)
    F = FrameSystem(DiscreteDomain.from_points(LatticeSpec.identity(1), [[0], [1], [2]]), vecs)
    with pytest.raises(NotAFrame):
        frame_bounds(F)
    with pytest.raises(NotAFrame):
        canonical_dual(F)


def test_zero_vector_rejected():
    idx = DiscreteDomain.from_points(LatticeSpec.identity(1), [[0], [1]])
    with pytest.raises(InputError):
        FrameSystem(idx, np.array([[1, 0], [0, 0]], dtype=complex))


def test_dual_examples():
    assert np.allclose(canonical_dual(onb(3)), np.eye(3))
    assert np.allclose(canonical_dual(onb(3, 2)), np.concatenate([np.eye(3)] * 2) / 2)
    F = random_frame(np.random.default_rng(1), 5, 9)
    S = frame_operator(F)
    dual = canonical_dual(F)
    assert np.abs(dual @ S.T - F.vectors).max() <= 1e-10  # rows: S dual_l = phi_l


@given(st.integers(0, 10_000), st.integers(2, 8), st.integers(0, 6))
def test_inversion_formula(seed, M, extra):
    F = random_frame(np.random.default_rng(seed), M, M + extra)
    R = F.dual @ F.synthesis.conj().T  # sum_l dual_l <., phi_l>
    assert np.abs(R - np.eye(M)).max() <= 1e-9 * max(1, np.abs(R).max())


def test_omega_examples():
    assert np.allclose(omega_weights(onb(4)).omega, 1)
    # tight unit-norm frame: union of a basis and its rotation by a unitary
    rng = np.random.default_rng(2)
    U = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    vecs = np.concatenate([np.eye(4), U.T])
    F = FrameSystem.from_points(LatticeSpec.identity(1), np.arange(8)[:, None], vecs, mass=1.0)
    assert omega_weights(F).omega == pytest.approx(np.full(8, 4 / 8))


@given(st.integers(0, 10_000), st.integers(2, 10), st.integers(0, 10))
def test_omega_sum_and_bracket(seed, M, extra):
    F = random_frame(np.random.default_rng(seed), M, M + extra)
    w = omega_weights(F)
    assert w.omega.sum() == pytest.approx(M, rel=1e-9)
    a, b = frame_bounds(F)
    nrm2 = (np.abs(F.vectors) ** 2).sum(1)
    assert np.all(nrm2 / b <= w.omega * (1 + 1e-9)) and np.all(w.omega <= nrm2 / a * (1 + 1e-9))
    assert w.c_phi == pytest.approx(w.theta**8 / w.vartheta**7)


def test_kernel_examples():
    K = cross_gram_kernel(onb(3))
    assert np.allclose(K.matrix, np.eye(3))
    F = random_frame(np.random.default_rng(3), 4, 10)
    K = cross_gram_kernel(F)
    P = K.projection()
    assert (hermitian_eigenvalues(F.gram).eigenvalues > 0.5).sum() == 4
    assert K.row_norms() == pytest.approx(np.ones(10), abs=1e-12)
    # P is self-adjoint and idempotent for the omega-weighted inner product
    W = np.diag(K.weights)
    assert np.abs(P @ P - P).max() <= 1e-9
    assert np.abs(W @ P - (W @ P).conj().T).max() <= 1e-9


def test_multiplier_examples():
    F = random_frame(np.random.default_rng(4), 4, 9)
    assert np.allclose(frame_multiplier(F, F.index), np.eye(4))
    assert np.allclose(frame_multiplier(F, empty_mask(F)), 0)
    one = F.index.subset(np.arange(9) == 3)
    Mx = frame_multiplier(F, one)
    assert np.linalg.matrix_rank(Mx) == 1
    assert np.trace(Mx).real == pytest.approx(F.omega[3])


def test_mask_not_subset():
    F = random_frame(np.random.default_rng(4), 3, 5)
    bad = DiscreteDomain.from_points(LatticeSpec.identity(1), [[99]])
    with pytest.raises(MaskNotSubset):
        frame_multiplier(F, bad)


def test_concentration_examples():
    F = random_frame(np.random.default_rng(6), 4, 10)
    full = hermitian_eigenvalues(concentration_operator(F, F.index)).eigenvalues
    assert full[:4] == pytest.approx(np.ones(4), abs=1e-10)
    assert full[4:] == pytest.approx(np.zeros(6), abs=1e-10)
    assert np.allclose(concentration_operator(F, empty_mask(F)), 0)


def _nonzero(ev):
    return np.sort(ev[ev > 1e-8])[::-1]


@given(st.integers(0, 10_000), st.integers(2, 10), st.integers(0, 12), st.integers(1, 2))
def test_trace_containment_and_equivalence(seed, M, extra, d):
    rng = np.random.default_rng(seed)
    F = random_frame(rng, M, M + extra, d)
    mask = random_mask(rng, F)
    T = hermitian_eigenvalues(concentration_operator(F, mask))
    H = hermitian_eigenvalues(multiplier_hermitian(F, mask))
    mu = F.measure(mask)
    assert abs(T.trace - mu) <= 1e-9 * max(1, mu)
    ev = T.eigenvalues
    assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
    a, b = _nonzero(ev), _nonzero(H.eigenvalues)
    assert len(a) == len(b) and np.abs(a - b).max(initial=0) <= 1e-7


@given(st.integers(0, 10_000), st.integers(2, 8))
def test_trace_monotone_in_mask(seed, M):
    rng = np.random.default_rng(seed)
    F = random_frame(rng, M, 2 * M)
    small = random_mask(rng, F, 0.3)
    big = F.index.subset(small.membership(F.index.points) | (rng.random(len(F)) < 0.3))
    t_small = np.trace(concentration_operator(F, small)).real
    t_big = np.trace(concentration_operator(F, big)).real
    assert t_big >= t_small - 1e-12


def test_decay_profile_examples():
    u = decay_profile(onb(4))
    assert u[(0,)] == 1
    assert all(v == 0 for k, v in u.items() if k != (0,))
    F = random_frame(np.random.default_rng(8), 4, 9)
    u = decay_profile(F)
    assert u[(0,)] == 1
    for k, v in u.items():
        assert u[tuple(-x for x in k)] == pytest.approx(v, rel=1e-12)
