import math

import numpy as np
import pytest

from mixedpoisson.exact import BoundaryData, SingularHarmonic
from mixedpoisson.mesh import DomainSpec

# high-precision reference values (30-digit arithmetic, frozen)
SIN_HALF_PI = -0.7069957003899701        # sin(-0.4999 * pi / 2)
LSHAPE_BOTTOM = -1.0004017828767414      # 0.5^-0.4999 * sin(-0.4999 * 3pi/2)


@pytest.fixture
def rect_sol():
    return SingularHarmonic.for_domain(DomainSpec.rectangle(), -0.4999)


@pytest.fixture
def lshape_sol():
    return SingularHarmonic.for_domain(DomainSpec.lshape(), -0.4999)


def test_eval_reference_values(rect_sol, lshape_sol):
    assert rect_sol.eval(1.0, 0.0) == 0.0
    assert abs(rect_sol.eval(0.0, 1.0) - SIN_HALF_PI) < 1e-14
    assert abs(lshape_sol.eval(0.0, -0.5) - LSHAPE_BOTTOM) < 1e-14
    third = SingularHarmonic.for_domain(DomainSpec.rectangle(), -1.0 / 3.0)
    assert abs(third.eval(-1.0, 0.0) - (-math.sqrt(3.0) / 2.0)) < 1e-15
    lthird = SingularHarmonic.for_domain(DomainSpec.lshape(), -1.0 / 3.0)
    assert abs(lthird.eval(0.0, 1.0) - (-0.5)) < 1e-15


def test_eval_vanishes_on_zero_ray(rect_sol, lshape_sol):
    x = np.linspace(0.05, 1.0, 13)
    assert np.allclose(rect_sol.eval(x, np.zeros_like(x)), 0.0)
    assert np.allclose(lshape_sol.eval(x, np.zeros_like(x)), 0.0)


def test_eval_at_origin_raises(rect_sol):
    with pytest.raises(ValueError):
        rect_sol.eval(0.0, 0.0)


def test_harmonicity_by_stencil(lshape_sol):
    rng = np.random.default_rng(7)
    pts = []
    while len(pts) < 100:
        x, y = rng.uniform(-1, 1), rng.uniform(-1, 1)
        r = math.hypot(x, y)
        inside = r > 0.2 and not (x > 0.05 and y < -0.05) and max(abs(x), abs(y)) < 0.9
        if inside:
            pts.append((x, y))
    worst = []
    for s in (1e-3, 5e-4):
        res = []
        for x, y in pts:
            lap = (lshape_sol.eval(x + s, y) + lshape_sol.eval(x - s, y)
                   + lshape_sol.eval(x, y + s) + lshape_sol.eval(x, y - s)
                   - 4.0 * lshape_sol.eval(x, y)) / (s * s)
            res.append(abs(lap))
        worst.append(max(res))
    # second-order decay of the discrete Laplacian residual
    assert worst[1] < worst[0] * 0.3


def test_homogeneity(rect_sol):
    rng = np.random.default_rng(3)
    x = rng.uniform(0.05, 0.45, 50)
    y = rng.uniform(0.05, 0.45, 50)
    lhs = rect_sol.eval(2.0 * x, 2.0 * y)
    rhs = 2.0 ** rect_sol.alpha * rect_sol.eval(x, y)
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=0.0)


def test_grad_matches_finite_differences(rect_sol, lshape_sol):
    for sol, (x, y) in ((rect_sol, (0.3, 0.4)), (lshape_sol, (-0.35, -0.55)),
                        (SingularHarmonic.for_domain(DomainSpec.lshape(), -1.0 / 3.0), (0.0, 1.0))):
        gx, gy = sol.grad(x, y)
        s = 1e-6
        fx = (sol.eval(x + s, y) - sol.eval(x - s, y)) / (2 * s)
        fy = (sol.eval(x, y + s) - sol.eval(x, y - s)) / (2 * s)
        assert abs(gx - fx) < 1e-7 * max(1.0, abs(fx))
        assert abs(gy - fy) < 1e-7 * max(1.0, abs(fy))


def test_grad_magnitude_homogeneity(rect_sol):
    x, y = 0.11, 0.17
    g1 = np.hypot(*rect_sol.grad(x, y))
    g2 = np.hypot(*rect_sol.grad(2 * x, 2 * y))
    assert abs(g2 / g1 - 2.0 ** (rect_sol.alpha - 1.0)) < 1e-12


def test_boundary_data_trace_consistency():
    domain = DomainSpec.lshape()
    data = BoundaryData.for_domain(domain, -0.4999)
    # edge on the ray theta = 0: identically zero
    vals = data.trace_on_edge((0.25, 0.0), (0.5, 0.0), np.linspace(0, 1, 7))
    assert np.allclose(vals, 0.0)
    # matches pointwise evaluation elsewhere
    p0, p1 = (0.0, 1.0), (-0.5, 1.0)
    s = np.linspace(0.0, 1.0, 9)
    expect = data(p0[0] + s * (p1[0] - p0[0]), np.full_like(s, 1.0))
    assert np.allclose(data.trace_on_edge(p0, p1, s), expect, rtol=0, atol=1e-15)


def test_trace_rejects_out_of_range_parameter():
    data = BoundaryData.for_domain(DomainSpec.rectangle(), -0.4999)
    with pytest.raises(ValueError):
        data.trace_on_edge((0.0, 0.0), (1.0, 0.0), 1.5)


def test_smoothness_tags():
    assert BoundaryData.for_domain(DomainSpec.rectangle(), -0.4999).smoothness == 0.0
    t = BoundaryData.for_domain(DomainSpec.lshape(), -1.0 / 3.0).smoothness
    assert abs(t - 1.0 / 6.0) < 1e-12


def test_square_integrable_trace():
    # graded quadrature of g^2 over the singular boundary edge stays finite
    from mixedpoisson.quadrature import GradedScheme, integrate_edge_graded
    data = BoundaryData.for_domain(DomainSpec.rectangle(), -0.4999)
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    val = integrate_edge_graded(lambda x, y: data(x, y) ** 2, (0.0, 0.0), (-0.5, 0.0), scheme)
    assert np.isfinite(val) and val > 0.0
