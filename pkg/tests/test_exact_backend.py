"""Unit tests for the rational, simplex, and double-description internals."""

from fractions import Fraction

import pytest

from pentaspin._dd import dd_rays, exact_rank, invert, primitive
from pentaspin._exactlp import feasible_point, minimize
from pentaspin._rational import QQ, qq, qq_limit_denominator, qq_str
from pentaspin.errors import UnboundedProblem, ValidationError


def test_qq_conversions():
    assert qq(3) == 3
    assert qq(Fraction(2, 6)) == QQ(1, 3)
    assert qq("3/4") == QQ(3, 4)
    assert qq("-2") == -2
    assert qq("0.25") == QQ(1, 4)
    # floats convert to their exact binary value
    assert qq(0.1) == QQ(3602879701896397, 2 ** 55)


def test_qq_rejects_garbage():
    with pytest.raises(ValidationError):
        qq(float("nan"))
    with pytest.raises(ValidationError):
        qq(float("inf"))
    with pytest.raises(ValidationError):
        qq("1/0")
    with pytest.raises(ValidationError):
        qq("pi")
    with pytest.raises(ValidationError):
        qq([1, 2])


def test_qq_str():
    assert qq_str(QQ(3, 4)) == "3/4"
    assert qq_str(QQ(-8, 2)) == "-4"
    assert qq_str(5) == "5"


def test_qq_limit_denominator():
    approx = qq_limit_denominator(qq(3.141592653589793), 113)
    assert approx == QQ(355, 113)


def test_exact_rank():
    assert exact_rank([]) == 0
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[1, 0, 0], [0, 1, 0], [1, 1, 1]]) == 3
    rows = [[QQ(1, 3), QQ(1, 7)], [QQ(2, 3), QQ(2, 7)], [0, 1]]
    assert exact_rank(rows) == 2


def test_invert():
    B = [[2, 1], [1, 1]]
    Binv = invert(B)
    assert Binv == [[1, -1], [-1, 2]]
    with pytest.raises(ValidationError):
        invert([[1, 2], [2, 4]])


def test_primitive():
    assert primitive([QQ(1, 2), QQ(1, 3)]) == (3, 2)
    assert primitive([4, -6]) == (2, -3)
    assert primitive([0, QQ(-5, 7)]) == (0, -1)


def test_dd_rays_orthant():
    # x >= 0, y >= 0: the rays are the coordinate axes
    rays = dd_rays([[1, 0], [0, 1]])
    assert sorted(rays) == [(0, 1), (1, 0)]


def test_dd_rays_ice_cream_cross_section():
    # x + y >= 0, x - y >= 0, x >= 0 (redundant): two boundary rays
    rays = dd_rays([[1, 1], [1, -1], [1, 0]])
    assert sorted(rays) == [(1, -1), (1, 1)]


def test_dd_rays_rejects_non_pointed():
    with pytest.raises(ValidationError):
        dd_rays([[1, 0]])


def test_dd_rays_three_dim():
    # octant cut by x + y + z >= 0 (redundant): still the three axes
    rays = dd_rays([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]])
    assert sorted(rays) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_feasible_point_simple():
    # x1 + x2 = 1 with x >= 0
    ok, x = feasible_point([[1, 1]], [1])
    assert ok
    assert sum(x) == 1
    assert all(v >= 0 for v in x)


def test_feasible_point_farkas():
    # x1 + x2 = -1 is hopeless for x >= 0; certificate says so
    ok, y = feasible_point([[1, 1]], [-1])
    assert not ok
    # y^T A >= 0 and y^T b < 0
    assert y[0] * 1 >= 0
    assert y[0] * -1 < 0


def test_minimize_optimal():
    # min x1 subject to x1 + x2 = 1
    status, x, val = minimize([[1, 1]], [1], [1, 0])
    assert status == "optimal"
    assert val == 0
    assert x[1] == 1


def test_minimize_infeasible():
    status, y, val = minimize([[1, 1]], [-2], [1, 0])
    assert status == "infeasible"
    assert val is None
    assert y[0] * 1 >= 0 and y[0] * -2 < 0


def test_minimize_unbounded():
    # min -x1 with x1 = x2: the ray (1, 1) drives the cost below any bound
    with pytest.raises(UnboundedProblem):
        minimize([[1, -1]], [0], [-1, 0])


def test_minimize_exact_values():
    # min x3 with x1 + x2 + x3 = 1, x1 - x2 = 1/3
    status, x, val = minimize(
        [[1, 1, 1], [1, -1, 0]], [1, QQ(1, 3)], [0, 0, 1]
    )
    assert status == "optimal"
    assert val == 0
    assert x[0] - x[1] == QQ(1, 3)
    assert x[0] + x[1] == 1
