import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ilmaximin.errors import ResourceLimitError
from ilmaximin.lattice import (Lattice, l0_codewords, point_count, point_count_bounds, points_in_box, q_of, r_of,
                               standard_lattices)
from ilmaximin.oracle import count_points_brute

FULL2, FULL3 = Lattice.full(2), Lattice.full(3)
L11 = Lattice.from_rows(["11"])
ZERO2 = Lattice.from_rows([], 2)


def test_q_and_r():
    assert q_of(FULL3) == 3 and r_of(FULL3) == 3
    assert q_of(L11) == 1 and r_of(L11) == 0
    assert q_of(Lattice.from_rows(["110", "011"])) == 2
    assert r_of(Lattice.from_rows(["100", "011"])) == 1


def test_l0_codewords():
    assert l0_codewords(L11) == [0b00, 0b11]
    assert l0_codewords(FULL2) == [0]
    assert l0_codewords(Lattice.from_rows(["100", "011"])) == [0b000, 0b011]


@pytest.mark.parametrize("p,count", [(2, 2), (3, 6), (4, 26), (5, 158)])
def test_standard_census(p, count):
    lats = standard_lattices(p)
    assert len(lats) == count
    assert all(lat.is_standard for lat in lats)


def test_point_count_examples():
    assert point_count(FULL3, (4, 5, 6)) == 120
    assert point_count(L11, (3, 3)) == 5
    assert point_count(ZERO2, (3, 4)) == 4
    assert point_count(ZERO2, (5, 5)) == 9


def test_bounds_examples():
    assert point_count_bounds(FULL3, (3, 3, 3)) == (27, 27)
    assert point_count_bounds(FULL2, (3, 3)) == (9, 9)
    assert point_count_bounds(L11, (3, 3)) == (2, 8)
    assert point_count_bounds(L11, (4, 4)) == (8, 8)
    assert point_count(L11, (4, 4)) == 8


def test_points_in_box_examples():
    assert points_in_box(L11, (3, 3)).tolist() == [[0, 0], [0, 2], [1, 1], [2, 0], [2, 2]]
    assert points_in_box(FULL2, (2, 2)).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert points_in_box(ZERO2, (2, 2)).tolist() == [[0, 0]]


def test_points_cap():
    with pytest.raises(ResourceLimitError):
        points_in_box(FULL3, (100, 100, 100), cap=1000)


@settings(max_examples=120, deadline=None)
@given(st.integers(2, 4).flatmap(lambda p: st.tuples(
    st.sampled_from(standard_lattices(p)), st.lists(st.integers(1, 7), min_size=p, max_size=p))))
def test_count_and_bounds(args):
    lat, s = args
    m = point_count(lat, s)
    assert m == count_points_brute(lat, s) == len(points_in_box(lat, s))
    lo, hi = point_count_bounds(lat, s)
    assert lo <= m <= hi


def test_points_sorted_and_in_lattice():
    lat = Lattice.from_rows(["1100", "0111"])
    pts = points_in_box(lat, (3, 4, 5, 3))
    assert [tuple(r) for r in pts] == sorted(tuple(r) for r in pts)
    words = set(lat.words)
    for row in pts:
        assert int("".join(str(int(x) % 2) for x in row), 2) in words
    assert np.all(pts.max(axis=0) <= np.array([2, 3, 4, 2]))
