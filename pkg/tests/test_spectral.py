import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import charpoly_eigenvalues
from speclab.errors import DeltaOutOfRange, InputError, NotHermitian, POutOfRange
from speclab.spectral import (
    SpectralProfile, count_above, deviation_inequality_check, hankel_schatten,
    hermitian_eigenvalues, plunge_count, spectral_deviation, tau,
)

P = SpectralProfile.from_values


def random_hermitian(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (X + X.conj().T) / 2


def random_unitary(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(X)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_diagonal_and_swap():
    assert hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0])).eigenvalues.tolist() == [3, 2, 1]
    ev = hermitian_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]])).eigenvalues
    assert ev == pytest.approx([1, -1], abs=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_random_4x4_matches_characteristic_polynomial(seed):
    A = random_hermitian(np.random.default_rng(seed), 4)
    got = hermitian_eigenvalues(A).eigenvalues
    assert got == pytest.approx(charpoly_eigenvalues(A), abs=1e-9)


def test_not_hermitian_rejected():
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_trace_recorded():
    A = random_hermitian(np.random.default_rng(1), 6)
    prof = hermitian_eigenvalues(A)
    assert prof.trace == pytest.approx(np.trace(A).real)
    assert prof.eigenvalues.sum() == pytest.approx(prof.trace, rel=1e-9, abs=1e-12)
    assert len(prof) == 6


@given(st.integers(0, 10_000), st.integers(1, 12))
def test_unitary_invariance(seed, n):
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, n)
    U = random_unitary(rng, n)
    a = hermitian_eigenvalues(A).eigenvalues
    b = hermitian_eigenvalues(U @ A @ U.conj().T).eigenvalues
    assert np.abs(a - b).max() <= 1e-9 * max(1.0, np.abs(a).max())


def test_jacobi_agrees_with_lapack_at_moderate_size():
    A = random_hermitian(np.random.default_rng(3), 80)
    ref = np.sort(np.linalg.eigvalsh(A))[::-1]
    assert hermitian_eigenvalues(A).eigenvalues == pytest.approx(ref, abs=1e-10)


def test_count_above_examples():
    assert count_above(P([0.9, 0.8, 0.3]), 0.5) == 2
    assert count_above(P([0.5, 0.5]), 0.5) == 0
    assert count_above(P(np.ones(7)), 0.99) == 7


def test_plunge_examples():
    assert plunge_count(P([1, 0.9, 0.5, 0.1, 0]), 0.2) == 1
    assert plunge_count(P(np.zeros(4)), 0.1) == 0
    proj = P([1, 1, 0, 0, 0])
    assert all(plunge_count(proj, d) == 0 for d in (0.01, 0.2, 0.49))
    with pytest.raises(DeltaOutOfRange):
        plunge_count(proj, 0.5)


def test_deviation_examples():
    assert spectral_deviation(P([1, 1, 1, 0]), 0.3, 3) == 0
    assert spectral_deviation(P([1, 1, 0]), 0.5, 2.5) == 0.5


def test_hankel_examples():
    assert hankel_schatten(P([1, 1, 0]), 0.5) == 0
    assert hankel_schatten(P([1, 0.5, 0]), 2) == pytest.approx(0.25)
    with pytest.raises(POutOfRange):
        hankel_schatten(P([0.5]), 3)


def test_clipping_policy():
    assert hankel_schatten(P([1 + 5e-11, -5e-11]), 1) == 0
    with pytest.raises(InputError):
        hankel_schatten(P([1 + 1e-6]), 1)


def test_tau():
    assert tau(0.5) == 2 and tau(0.1) == pytest.approx(10) and tau(0.75) == 4


profiles = st.lists(st.floats(0, 1), min_size=1, max_size=30).map(P)


@given(profiles, st.floats(0.01, 0.98), st.floats(0.01, 0.98))
def test_counts_monotone_in_delta(prof, d1, d2):
    lo, hi = sorted((d1, d2))
    assert count_above(prof, lo) >= count_above(prof, hi)
    if hi < 0.5:
        assert plunge_count(prof, lo) >= plunge_count(prof, hi)


@given(profiles, st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_hankel_nonincreasing_in_p(prof, p1, p2):
    lo, hi = sorted((p1, p2))
    assert hankel_schatten(prof, lo) >= hankel_schatten(prof, hi) - 1e-12


@given(profiles, st.sampled_from([0.1, 0.3, 0.5, 0.7, 0.9]), st.sampled_from([0.5, 1.0, 2.0]))
def test_deviation_inequality_always_holds(prof, delta, p):
    assert deviation_inequality_check(prof, delta, p).holds


def test_deviation_inequality_on_projection_is_tight():
    chk = deviation_inequality_check(P([1, 1, 0, 0]), 0.5, 1)
    assert chk.lhs == 0 and chk.rhs == 0 and chk.holds
