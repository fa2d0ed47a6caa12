import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import domain, random_blob
from oracles import boundary_set, inflation_brute
from speclab.errors import InputError, SingularGenerator
from speclab.lattice import (
    DiscreteDomain, LatticeSpec, continuous_perimeter, discrete_boundary, discretize, disk,
    doubling_ratio, inflation_constant, isotropic_fineness, lattice_perimeter,
    perimeter_sandwich_check, polygon, rectangle, singular_data,
)


# -- singular data and fineness ---------------------------------------------

def test_singular_data_identity():
    s, norm, cond, cov = singular_data(np.eye(2))
    assert np.allclose(s, [1, 1]) and norm == 1 and cond == 1 and cov == 1


def test_singular_data_diagonal():
    s, norm, cond, cov = singular_data(np.diag([2.0, 1.0]))
    assert np.allclose(s, [1, 2]) and cond == pytest.approx(2) and cov == pytest.approx(2)


def test_singular_data_shear_matches_quadratic_roots():
    # A^T A = [[1,1],[1,2]] has eigenvalues (3 -+ sqrt 5)/2
    lo, hi = (3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2
    s, norm, cond, cov = singular_data(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert s == pytest.approx([math.sqrt(lo), math.sqrt(hi)], rel=1e-14)
    assert cond == pytest.approx(math.sqrt(hi / lo), rel=1e-14)
    assert cond == pytest.approx(hi, rel=1e-14)  # sqrt(hi/lo) = hi since hi*lo = 1
    assert cov == pytest.approx(1.0, rel=1e-14)


def test_singular_generator_rejected():
    with pytest.raises(SingularGenerator):
        LatticeSpec(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_isotropic_fineness_values():
    assert isotropic_fineness(LatticeSpec.identity(2)) == 1
    lat = LatticeSpec.diagonal(2, 1)
    s = np.linalg.svd(np.diag([2.0, 1.0]), compute_uv=False)
    assert isotropic_fineness(lat) == pytest.approx((s.max() / s.min()) ** 4 * s.max() ** 2)
    assert isotropic_fineness(lat) == pytest.approx(64)


@given(st.floats(0.01, 1.0))
def test_fineness_constant_under_contraction(eps):
    assert isotropic_fineness(LatticeSpec.identity(2).scaled(eps)) == pytest.approx(1)


@given(st.floats(0.05, 1.0), st.floats(0.3, 3.0), st.floats(-1, 1))
def test_fineness_after_contraction_is_kappa_power(eps, s, t):
    A = np.array([[s, t], [0.0, 1.0]])
    lat = LatticeSpec(A)
    small = lat.scaled(eps / lat.norm)
    assert isotropic_fineness(small) == pytest.approx(lat.cond**4, rel=1e-9)
    assert isotropic_fineness(lat) >= 1 and lat.cond >= 1


# -- discretize and perimeters ---------------------------------------------

def _enumerate(shape, r):
    return sum(1 for x in range(-r, r + 1) for y in range(-r, r + 1)
               if shape.contains(np.array([[x, y]], float))[0])


def test_discretize_disk_counts_21():
    D = discretize(disk((0, 0), 2.5), LatticeSpec.identity(2))
    assert len(D) == 21 == _enumerate(disk((0, 0), 2.5), 4)
    assert D.mass == 1


def test_discretize_small_disk_empty():
    assert len(discretize(disk((0.5, 0.5), 0.4), LatticeSpec.identity(2))) == 0


def test_discretize_rectangle_is_closed_and_row_major():
    D = discretize(rectangle((0, 0), (3, 2)), LatticeSpec.identity(2))
    assert len(D) == 12
    assert [tuple(p) for p in D.points] == sorted(tuple(p) for p in D.points)


def test_continuous_perimeters():
    assert continuous_perimeter(rectangle((0, 0), (1, 1))) == 4
    assert continuous_perimeter(polygon([(0, 0), (3, 0), (0, 4)])) == pytest.approx(12)
    assert continuous_perimeter(disk((0, 0), 1)) == pytest.approx(2 * math.pi)


def test_polygon_must_be_simple():
    with pytest.raises(InputError):
        polygon([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_boundary_square_and_singleton():
    sq = domain([(i, j) for i in range(3) for j in range(3)])
    bd = discrete_boundary(sq)
    assert len(bd) == 8 and not bd.contains((1, 1))
    single = domain([(4, 4)])
    assert len(discrete_boundary(single)) == 1


def test_boundary_strip_is_everything():
    strip = domain([(0, j) for j in range(7)])
    assert len(discrete_boundary(strip)) == 7


def test_lattice_perimeter_examples():
    sq = [(i, j) for i in range(3) for j in range(3)]
    assert lattice_perimeter(domain(sq)) == 8
    half = LatticeSpec.diagonal(0.5, 0.5)
    assert lattice_perimeter(domain(sq, lattice=half)) == pytest.approx(4)
    assert lattice_perimeter(domain([0])) == 1


@given(st.integers(0, 10_000), st.floats(0.05, 1.0))
def test_lattice_perimeter_scales_like_eps_power(seed, eps):
    rng = np.random.default_rng(seed)
    pts = random_blob(rng, 2, 15)
    base = domain(pts)
    small = domain(pts, lattice=LatticeSpec.identity(2).scaled(eps))
    assert lattice_perimeter(small) == pytest.approx(eps * lattice_perimeter(base), rel=1e-12)


@given(st.integers(0, 10_000), st.integers(1, 2), st.integers(1, 40))
def test_boundary_subset_of_domain(seed, d, size):
    rng = np.random.default_rng(seed)
    D = domain(random_blob(rng, d, size), d)
    bd = discrete_boundary(D)
    assert all(D.contains(p) for p in bd.points)
    assert {tuple(p) for p in bd.points.tolist()} == boundary_set(D.points.tolist(), d)


def test_sandwich_examples():
    sq = domain([(i, j) for i in range(3) for j in range(3)])
    rep = perimeter_sandwich_check(sq)
    assert rep.lower == rep.upper == 8
    one = perimeter_sandwich_check(domain([(0, 0)]))
    assert one.lower == one.upper == 1


def test_sandwich_random_blob_within_slack():
    rng = np.random.default_rng(7)
    blob = domain(random_blob(rng, 2, 20))
    rep = perimeter_sandwich_check(blob, slack=10)
    assert rep.within
    assert rep.lower <= rep.upper


# -- inflation ---------------------------------------------------------------

def test_inflation_interval_and_singleton():
    assert inflation_constant(domain(range(10)), 1.0) == 4
    assert inflation_constant(domain([0]), 1.0) == 4


def test_inflation_empty_is_zero():
    empty = DiscreteDomain.from_points(LatticeSpec.identity(1), np.zeros((0, 1)))
    assert inflation_constant(empty, 1.0) == 0


@given(st.integers(0, 10_000), st.integers(1, 2), st.integers(1, 30), st.sampled_from([1.0, 2.0]))
def test_inflation_matches_brute_force(seed, d, size, gamma):
    rng = np.random.default_rng(seed)
    pts = random_blob(rng, d, size)
    assert inflation_constant(domain(pts, d), gamma) == inflation_brute(pts, d, 1.0, gamma)


@given(st.integers(0, 10_000), st.integers(-50, 50), st.integers(-50, 50))
def test_inflation_translation_invariant(seed, sx, sy):
    rng = np.random.default_rng(seed)
    D = domain(random_blob(rng, 2, 12))
    assert inflation_constant(D.translate((sx, sy)), 2.0) == inflation_constant(D, 2.0)


def test_inflation_on_torus_uses_wrapped_distances():
    # on Z_8 the complement of {0..3} is {4..7}; every strip is saturated quickly
    lat = LatticeSpec.identity(1)
    D = DiscreteDomain.from_points(lat, np.arange(4)[:, None], mass=1.0, period=(8,))
    assert inflation_constant(D, 1.0) == 2 * 2  # n=0: both strips have 2 points


# -- doubling ----------------------------------------------------------------

def test_doubling_examples():
    assert doubling_ratio(LatticeSpec.identity(1), [[0]], [1.0]) == pytest.approx(5 / 3)
    assert doubling_ratio(LatticeSpec.identity(2), [[0, 0]], [0.5]) == 5


@given(st.integers(1, 2), st.lists(st.floats(0.1, 20), min_size=1, max_size=5))
def test_doubling_never_exceeds_five_to_d(d, radii):
    centers = np.zeros((1, d), dtype=int)
    assert doubling_ratio(LatticeSpec.identity(d), centers, radii) <= 5**d
