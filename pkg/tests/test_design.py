import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krigbound import (Design, InvalidInputError, Region, ResourceError, fill_distance,
                       maximin_lhd, min_separation, random_lhd)
from krigbound.design import grid_axes, grid_points, is_latin, read_matrix_csv


def test_grid_axes_include_endpoints():
    (ax,) = grid_axes(Region.unit(1), 0.3)
    assert ax[0] == 0.0 and ax[-1] == 1.0
    assert len(ax) == 5
    assert np.max(np.diff(ax)) <= 0.3


def test_grid_points_order_and_size():
    g = grid_points(Region((0, 0), (1, 2)), 0.5)
    assert g.shape == (3 * 5, 2)
    np.testing.assert_array_equal(g[:2], [[0, 0], [0, 0.5]])


def test_grid_limit():
    with pytest.raises(ResourceError):
        grid_points(Region.unit(3), 0.001)


def test_fill_distance_single_centre_point():
    d = Design(np.array([[0.5, 0.5]]))
    assert fill_distance(d, 0.01) == pytest.approx(math.sqrt(0.5), rel=1e-12)


def test_fill_distance_under_estimates_by_at_most_half_diagonal():
    d = Design(np.array([[0.13, 0.71], [0.9, 0.2], [0.4, 0.4]]))
    coarse = fill_distance(d, 0.1)
    fine = fill_distance(d, 0.002)
    assert coarse <= fine + 1e-12
    assert fine - coarse <= 0.1 * math.sqrt(2) / 2


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(1, 4), st.integers(0, 2**32))
def test_random_lhd_is_latin(n, d, seed):
    des = random_lhd(n, d, seed)
    assert des.points.shape == (n, d)
    assert is_latin(des)
    assert np.all(des.region.contains(des.points))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(1, 3), st.integers(0, 2**32))
def test_maximin_is_latin_and_never_worse(n, d, seed):
    start = maximin_lhd(n, d, seed, budget=0)
    opt = maximin_lhd(n, d, seed)
    assert is_latin(opt)
    assert min_separation(opt) >= min_separation(start) - 1e-15


def test_maximin_deterministic():
    a = maximin_lhd(25, 2, 11)
    b = maximin_lhd(25, 2, 11)
    np.testing.assert_array_equal(a.points, b.points)
    assert a.meta == b.meta
    assert a.meta["budget"] == 10 * 25 * 25
    c = maximin_lhd(25, 2, 12)
    assert not np.array_equal(a.points, c.points)


def test_maximin_improves_separation_on_average():
    gain = [min_separation(maximin_lhd(30, 2, s)) - min_separation(random_lhd(30, 2, s))
            for s in range(10)]
    assert np.mean(gain) > 0


def test_budget_zero_equals_random():
    np.testing.assert_array_equal(maximin_lhd(15, 3, 5, budget=0).points,
                                  random_lhd(15, 3, 5).points)


def test_scaled_region():
    r = Region((-1.0, 2.0), (1.0, 3.0))
    des = maximin_lhd(10, 2, 0, region=r)
    assert np.all(r.contains(des.points))
    assert is_latin(des)


def test_single_point_design():
    des = maximin_lhd(1, 2, 0)
    np.testing.assert_array_equal(des.points, [[0.5, 0.5]])
    with pytest.raises(InvalidInputError):
        min_separation(des)


@pytest.mark.parametrize("args", [(0, 2, 0), (3, 0, 0)])
def test_invalid_sizes(args):
    with pytest.raises(InvalidInputError):
        maximin_lhd(*args)


def test_design_validation():
    with pytest.raises(InvalidInputError):
        Design(np.array([[0.5, 1.5]]))
    with pytest.raises(InvalidInputError):
        Design(np.array([[np.nan, 0.5]]))
    with pytest.raises(InvalidInputError):
        Design(np.zeros((0, 2)))


def test_points_read_only():
    des = random_lhd(5, 2, 0)
    with pytest.raises(ValueError):
        des.points[0, 0] = 0.0


def test_csv_roundtrip_exact():
    des = maximin_lhd(17, 3, 4)
    text = des.to_csv()
    assert text.splitlines()[0] == "x1,x2,x3"
    np.testing.assert_array_equal(Design.from_csv(text).points, des.points)


def test_json_roundtrip():
    des = maximin_lhd(9, 2, 3)
    back = Design.from_json(des.to_json())
    np.testing.assert_array_equal(back.points, des.points)
    assert back.meta == des.meta
    assert back.region == des.region


def test_read_matrix_csv():
    np.testing.assert_array_equal(read_matrix_csv("1,2\n3,4\n"), [[1, 2], [3, 4]])
    np.testing.assert_array_equal(read_matrix_csv("a,b\n1,2\n"), [[1, 2]])
    for bad in ("", "a,b\n", "1,2\n3\n", "1,2\n3,x\n"):
        with pytest.raises(InvalidInputError):
            read_matrix_csv(bad)
