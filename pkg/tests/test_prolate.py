import numpy as np
import pytest
from hypothesis import given, strategies as st

from speclab.bounds import boundary_interaction
from speclab.errors import DeltaOutOfRange, EmptyInterval, InputError
from speclab.prolate import (band_projection, fit_plunge, interval_indices, plunge_study,
                             prolate_operator)
from speclab.spectral import plunge_count


def test_interval_indices():
    assert interval_indices((6, 10), 8).tolist() == [6, 7, 0, 1]
    with pytest.raises(EmptyInterval):
        interval_indices((3, 3), 8)
    with pytest.raises(InputError):
        interval_indices((0, 9), 8)


def test_band_projection_is_projection():
    P = band_projection(16, (2, 7))
    assert np.abs(P @ P - P).max() <= 1e-12
    assert np.abs(P - P.conj().T).max() <= 1e-12
    assert np.trace(P).real == pytest.approx(5)


def test_all_frequencies_gives_time_indicator():
    inst = prolate_operator(16, (0, 16), (3, 8))
    assert np.allclose(inst.operator, np.diag(inst.time_mask().astype(float)), atol=1e-12)
    ev = inst.profile.eigenvalues
    assert ev[:5] == pytest.approx(np.ones(5), abs=1e-12)
    assert ev[5:] == pytest.approx(np.zeros(11), abs=1e-12)


def test_all_times_gives_band_projection():
    ev = prolate_operator(16, (1, 5), (0, 16)).profile.eigenvalues
    assert ev[:4] == pytest.approx(np.ones(4), abs=1e-12)
    assert ev[4:] == pytest.approx(np.zeros(12), abs=1e-12)


def test_trace_l32():
    inst = prolate_operator(32, (0, 8), (0, 8))
    assert inst.trace == 2
    assert np.diag(inst.operator).real.sum() == pytest.approx(2, abs=1e-12)
    assert inst.profile.eigenvalues.sum() == pytest.approx(2, rel=1e-9)


intervals = st.tuples(st.integers(0, 23), st.integers(1, 24)).map(lambda t: (t[0], t[0] + t[1]))


@given(intervals, intervals)
def test_time_frequency_duality(I, J):
    L = 24
    a = prolate_operator(L, I, J).profile.eigenvalues
    b = prolate_operator(L, J, I).profile.eigenvalues
    assert np.abs(a - b).max() <= 1e-9


@given(intervals, intervals, st.integers(-30, 30), st.integers(-30, 30))
def test_shift_invariance(I, J, u, v):
    L = 24
    a = prolate_operator(L, I, J).profile.eigenvalues
    b = prolate_operator(L, (I[0] + u, I[1] + u), (J[0] + v, J[1] + v)).profile.eigenvalues
    assert np.abs(a - b).max() <= 1e-9


@given(intervals, intervals)
def test_containment_trace_and_boundary_identity(I, J):
    inst = prolate_operator(24, I, J)
    ev = inst.profile.eigenvalues
    assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
    assert ev.sum() == pytest.approx(inst.trace, rel=1e-9, abs=1e-12)
    hank = (ev - ev**2).sum()
    bi = boundary_interaction(inst.kernel(), inst.time_mask())
    assert abs(hank - bi) <= 1e-8 * max(1, hank)


@given(intervals, st.integers(0, 23), st.integers(1, 12), st.integers(0, 12))
def test_loewner_monotone_in_time_interval(I, t0, size, grow):
    L = 24
    size = min(size, L)
    big = min(size + grow, L)
    a = prolate_operator(L, I, (t0, t0 + size)).profile.eigenvalues
    b = prolate_operator(L, I, (t0, t0 + big)).profile.eigenvalues
    assert np.all(b >= a - 1e-9)


def test_study_examples():
    rows, fit = plunge_study([64], sizes=[16])
    assert len(rows) == 1 and np.isnan(fit.slope)
    r = rows[0]
    assert (r.L, r.size_I, r.size_J, r.trace) == (64, 16, 16, 4.0)
    assert r.log_regressor == pytest.approx(np.log(40))
    full = prolate_operator(32, (0, 32), (0, 9))
    assert all(plunge_count(full.profile, d) == 0 for d in (0.05, 0.1, 0.3))
    with pytest.raises(DeltaOutOfRange):
        plunge_study([64], delta=0.5)


def test_study_plunge_grows_slowly_with_band():
    rows, _ = plunge_study([128], sizes=[8, 16, 32, 64], delta=0.1)
    plunges = [r.plunge for r in rows]
    traces = [r.trace for r in rows]
    assert plunges == sorted(plunges)
    # doubling the band adds far fewer intermediate eigenvalues than it adds trace
    for (p0, t0), (p1, t1) in zip(zip(plunges, traces), zip(plunges[1:], traces[1:])):
        assert p1 - p0 <= max(2, 0.5 * (t1 - t0))


def test_fit_conventions():
    rows, fit = plunge_study([64, 128, 256], delta=0.1)
    assert [r.size_I for r in rows] == [16, 32, 64]
    assert fit.r2 >= 0.9
    x = [type(rows[0])(L=1, size_I=1, size_J=1, trace=t, count_half=0, plunge=p, log_regressor=0)
         for t, p in ((1.0, 1), (np.e, 2), (np.e**2, 3))]
    f = fit_plunge(x)
    assert f.slope == pytest.approx(1) and f.intercept == pytest.approx(1) and f.r2 == pytest.approx(1)
