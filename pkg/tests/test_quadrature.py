import math

import numpy as np
import pytest

from mixedpoisson.quadrature import (GradedScheme, QuadratureError, edge_rule,
                                     integrate_edge, integrate_edge_graded,
                                     integrate_triangle, integrate_triangle_graded,
                                     triangle_rule)

REF_TRI = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

# independent polar-coordinates oracle for int r^-0.9998 over REF_TRI
TRI_SINGULAR_ORACLE = 1.2461449382440866


def monomial_integral(p, q):
    # int_REF x^p y^q = p! q! / (p + q + 2)!
    return math.factorial(p) * math.factorial(q) / math.factorial(p + q + 2)


@pytest.mark.parametrize("degree", [1, 2, 4, 5, 6, 8, 10])
def test_triangle_monomial_exactness(degree):
    rule = triangle_rule(degree)
    assert rule.degree >= degree
    pts = rule.points @ REF_TRI
    for p in range(degree + 1):
        for q in range(degree + 1 - p):
            val = 0.5 * float(rule.weights @ (pts[:, 0] ** p * pts[:, 1] ** q))
            assert abs(val - monomial_integral(p, q)) < 1e-13


@pytest.mark.parametrize("degree", [1, 2, 4, 5, 6, 8, 10])
def test_triangle_weights_positive_and_normalized(degree):
    rule = triangle_rule(degree)
    assert np.all(rule.weights > 0.0)
    assert abs(rule.weights.sum() - 1.0) < 1e-14
    # mapped weights sum to the cell measure
    tri = np.array([[0.2, -0.3], [1.7, 0.1], [0.4, 2.2]])
    area = 0.5 * abs((tri[1, 0] - tri[0, 0]) * (tri[2, 1] - tri[0, 1])
                     - (tri[1, 1] - tri[0, 1]) * (tri[2, 0] - tri[0, 0]))
    val = integrate_triangle(lambda x, y: np.ones_like(x), tri, rule)
    assert abs(val - area) < 1e-14 * max(1.0, area)


@pytest.mark.parametrize("npoints", [1, 2, 4, 8, 16])
def test_edge_rule_exactness(npoints):
    rule = edge_rule(npoints)
    for p in range(rule.degree + 1):
        val = float(rule.weights @ rule.points ** p)
        assert abs(val - 1.0 / (p + 1)) < 1e-13
    assert np.all(rule.weights > 0.0)


def test_triangle_rule_rejects_unshipped_degree():
    with pytest.raises(ValueError):
        triangle_rule(11)


def test_integrate_triangle_basics():
    assert abs(integrate_triangle(lambda x, y: np.ones_like(x), REF_TRI) - 0.5) < 1e-15
    assert abs(integrate_triangle(lambda x, y: x, REF_TRI) - 1.0 / 6.0) < 1e-15
    val = integrate_triangle(lambda x, y: x * x * y, REF_TRI, triangle_rule(4))
    assert abs(val - 1.0 / 60.0) < 1e-15


def test_integrate_edge_length_and_moment():
    val = integrate_edge(lambda x, y: np.ones_like(x), (0.0, 0.0), (0.0, 0.5))
    assert abs(val - 0.5) < 1e-15
    val = integrate_edge(lambda x, y: x, (0.0, 0.0), (1.0, 0.0))
    assert abs(val - 0.5) < 1e-15


def test_graded_edge_near_minus_one_power():
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    val = integrate_edge_graded(lambda x, y: x ** -0.9998, (0.0, 0.0), (1.0, 0.0), scheme)
    assert abs(val - 5000.0) / 5000.0 < 1e-8


def test_graded_edge_cube_root():
    scheme = GradedScheme.for_exponent(-1.0 / 3.0, (0.0, 0.0))
    val = integrate_edge_graded(lambda x, y: x ** (-1.0 / 3.0), (0.0, 0.0), (1.0, 0.0), scheme)
    assert abs(val - 1.5) / 1.5 < 1e-10


def test_graded_edge_constant():
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    val = integrate_edge_graded(lambda x, y: np.ones_like(x), (0.0, 0.0), (0.5, 0.0), scheme)
    assert abs(val - 0.5) < 1e-12


def test_graded_edge_singular_end_detection():
    scheme = GradedScheme.for_exponent(-0.4999, (1.0, 0.0))
    # singular point may be either endpoint
    val = integrate_edge_graded(lambda x, y: (1.0 - x) ** -0.5, (0.0, 0.0), (1.0, 0.0), scheme)
    assert abs(val - 2.0) / 2.0 < 1e-10
    bad = GradedScheme.for_exponent(-0.4999, (3.0, 3.0))
    with pytest.raises(ValueError):
        integrate_edge_graded(lambda x, y: x, (0.0, 0.0), (1.0, 0.0), bad)


def test_graded_edge_level_doubling_stable():
    base = GradedScheme(q=0.15, levels=30, singular_point=(0.0, 0.0))
    double = GradedScheme(q=0.15, levels=60, singular_point=(0.0, 0.0))
    f = lambda x, y: x ** -0.9998
    v1 = integrate_edge_graded(f, (0.0, 0.0), (1.0, 0.0), base)
    v2 = integrate_edge_graded(f, (0.0, 0.0), (1.0, 0.0), double)
    assert abs(v1 - v2) / abs(v2) < 1e-9


def test_graded_triangle_singular_oracle():
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    val = integrate_triangle_graded(lambda x, y: (x * x + y * y) ** -0.4999, REF_TRI, scheme)
    assert abs(val - TRI_SINGULAR_ORACLE) / TRI_SINGULAR_ORACLE < 1e-6


def test_graded_triangle_constant_and_smooth():
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    area = integrate_triangle_graded(lambda x, y: np.ones_like(x), REF_TRI, scheme)
    assert abs(area - 0.5) < 1e-12
    smooth = lambda x, y: x * x + y * y
    graded = integrate_triangle_graded(smooth, REF_TRI, scheme)
    plain = integrate_triangle(smooth, REF_TRI, triangle_rule(6))
    assert abs(graded - plain) < 1e-10


def test_graded_triangle_needs_singular_vertex():
    scheme = GradedScheme.for_exponent(-0.4999, (5.0, 5.0))
    with pytest.raises(ValueError):
        integrate_triangle_graded(lambda x, y: x, REF_TRI, scheme)


def test_nonfinite_integrand_raises():
    with pytest.raises(QuadratureError):
        integrate_triangle(lambda x, y: 1.0 / (x - x), REF_TRI)
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    with pytest.raises(QuadratureError):
        integrate_edge_graded(lambda x, y: np.full_like(x, np.inf),
                              (0.0, 0.0), (1.0, 0.0), scheme)


def test_graded_scheme_validation():
    with pytest.raises(ValueError):
        GradedScheme(q=1.5, levels=30, singular_point=(0.0, 0.0))
    with pytest.raises(ValueError):
        GradedScheme(q=0.5, levels=1, singular_point=(0.0, 0.0))
