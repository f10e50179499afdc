import math

import pytest

from ilmaximin.design import brute_force_separation, rho_formula
from ilmaximin.errors import InvalidInputError
from ilmaximin.gf2 import codewords, rref
from ilmaximin.lattice import Lattice, point_count
from ilmaximin.oracle import exhaustive_best
from ilmaximin.search import (SearchRequest, algorithm1, algorithm2, algorithm3, best_lattice_for, next_span,
                              search, supplement)

GEOM9 = tuple(0.75 ** k for k in range(9))


@pytest.mark.parametrize("p,alg", [(2, 1), (5, 1), (6, 2), (8, 2), (9, 3), (30, 3)])
def test_dispatch(p, alg):
    assert SearchRequest(p, 10, (1.0,) * p).resolved_algorithm == alg


def test_request_validation():
    with pytest.raises(InvalidInputError):
        SearchRequest(1, 10, (1.0,))
    with pytest.raises(InvalidInputError):
        SearchRequest(2, 1, (1.0, 1.0))
    with pytest.raises(InvalidInputError):
        SearchRequest(2, 10, (1.0, 1.0), algorithm="4")


def test_small_examples():
    out = algorithm1(SearchRequest(2, 4, (1, 1)))
    assert out.rho == 1 and out.m == 4
    out = algorithm1(SearchRequest(2, 5, (1, 1)))
    assert out.rho == pytest.approx(math.sqrt(2) / 2, rel=1e-15) and out.m == 5
    assert out.best_lattice == Lattice.from_rows(["11"]) and out.best_span == (3, 3)
    assert algorithm2(SearchRequest(2, 5, (1, 1))).rho == out.rho


@pytest.mark.parametrize("alg", [algorithm1, algorithm2])
def test_flagship(alg):
    out = alg(SearchRequest(3, 148, (1, 1, 1)))
    assert round(out.rho, 4) == 0.2430
    assert out.m == 148
    d = out.design((1, 1, 1))
    assert brute_force_separation(d) == pytest.approx(out.rho, rel=1e-12)
    assert 7 in [len(set(d.points[:, k])) for k in range(3)]


@pytest.mark.parametrize("p,n_max,s_max", [(2, 40, 16), (3, 30, 8), (4, 12, 4)])
def test_algorithm1_matches_exhaustive(p, n_max, s_max):
    w = (1.0,) * p
    for n in range(2, n_max + 1):
        got = algorithm1(SearchRequest(p, n, w))
        ref = exhaustive_best(p, n, w, s_max)
        assert got.rho == pytest.approx(ref.rho, rel=1e-12), n


def test_exhaustive_examples():
    assert exhaustive_best(2, 4, (1, 1), 8).rho == 1
    assert exhaustive_best(2, 5, (1, 1), 8).rho == pytest.approx(math.sqrt(2) / 2)
    assert exhaustive_best(3, 8, (1, 1, 1), 5).rho == 1


def test_unequal_weights_match_exhaustive():
    w = (1.0, 0.75, 0.5625)
    for n in (5, 9, 17, 26):
        assert algorithm1(SearchRequest(3, n, w)).rho == pytest.approx(exhaustive_best(3, n, w, 8).rho, rel=1e-12)
        assert algorithm2(SearchRequest(3, n, w)).rho == algorithm1(SearchRequest(3, n, w)).rho


def test_parallel_matches_sequential():
    for n in (37, 90, 151):
        req = SearchRequest(4, n, (1.0, 0.9, 0.8, 0.7))
        a, b = algorithm1(req), algorithm1(req, threads=2)
        assert (a.rho, a.best_lattice, a.best_span) == (b.rho, b.best_lattice, b.best_span)


def test_outcomes_are_consistent():
    for p, n in ((3, 50), (5, 77), (6, 40), (7, 60)):
        out = search(SearchRequest(p, n, (1.0,) * p))
        assert out.m >= n and out.m == point_count(out.best_lattice, out.best_span)
        assert out.best_lattice.is_standard
        assert out.rho == rho_formula(out.best_lattice, out.best_span, (1.0,) * p)


def test_regression_p6():
    # frozen from a verified run; guards the Algorithm 2 enumeration order
    out = algorithm2(SearchRequest(6, 100, (1.0,) * 6))
    assert out.rho == pytest.approx(math.sqrt(3) / 2, rel=1e-15) and out.m == 108
    out = algorithm2(SearchRequest(6, 100, tuple(0.75 ** k for k in range(6))))
    assert out.rho == 0.421875


def test_next_span_examples():
    assert next_span((2, 2, 5), (1, 1, 1), 0.9, 20, q=1)[:2] == (2, 3)
    assert next_span((2, 2, 2), (1, 1, 1), 0.9, 20, q=1) is None
    assert next_span((2, 3, 2), (1, 1, 1), 0.0, 20, q=1)[:2] == (3, 2)
    with pytest.raises(InvalidInputError):
        next_span((2, 2, 2), (1, 1, 1), 0.0, 20)


def test_best_lattice_examples():
    assert best_lattice_for((3, 3), 1, 0, (1, 1)) == Lattice.from_rows(["11"])
    assert best_lattice_for((3, 3, 3), 1, 0, (1, 1, 1)) == Lattice.from_rows(["111"])
    assert best_lattice_for((4, 3, 5), 3, 3, (1, 1, 1)) == Lattice.full(3)
    with pytest.raises(InvalidInputError):
        best_lattice_for((3, 3, 3), 3, 1, (1, 1, 1))


def test_supplement_keeps_dimension():
    code = rref(["1100", "0111"])
    new = supplement(code, (3, 3, 2, 2), (1, 0.9, 0.8, 0.7))
    assert new.p == 5 and new.dim == code.dim
    assert new.support == (1 << 5) - 1
    # dropping the new coordinate gives back the old code
    assert {c >> 1 for c in codewords(new)} == set(codewords(code))


def test_algorithm3_matches_algorithm2_at_nine():
    a = algorithm3(SearchRequest(9, 16, GEOM9, "3"))
    b = algorithm2(SearchRequest(9, 16, GEOM9, "2"))
    assert a.rho == b.rho


def test_algorithm3_two_points():
    out = search(SearchRequest(9, 2, GEOM9))
    assert out.m == 2
    assert out.rho == pytest.approx(math.sqrt(sum(x * x for x in GEOM9)), rel=1e-12)


def test_budget():
    with pytest.raises(TimeoutError):
        algorithm2(SearchRequest(8, 1000, (1.0,) * 8), budget_seconds=1e-6)
