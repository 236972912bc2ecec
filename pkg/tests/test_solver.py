import numpy as np
import pytest

from conftest import jittered_mesh
from mixedpoisson.assembly import assemble_mixed, assemble_p1_dirichlet
from mixedpoisson.exact import BoundaryData
from mixedpoisson.mesh import DomainSpec, generate_structured
from mixedpoisson.quadrature import GradedScheme
from mixedpoisson.solver import SolverConfig, SolverError, solve_mixed, solve_spd
from mixedpoisson.spaces import rt0_cell_coefficients


def test_homogeneous_problem_gives_zero():
    mesh = generate_structured(DomainSpec.lshape(), 2)
    solution = solve_mixed(assemble_mixed(mesh))
    assert np.allclose(solution.sigma, 0.0)
    assert np.allclose(solution.u, 0.0)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_patch_test_linear_solution(n):
    # u = x + 2y is harmonic; the pair (grad u, cell averages) satisfies the
    # discrete equations exactly, so the solver must return it
    mesh = generate_structured(DomainSpec.rectangle(), n)
    g = lambda x, y: x + 2.0 * y
    solution = solve_mixed(assemble_mixed(mesh, g=g))
    gamma, d = rt0_cell_coefficients(mesh, solution.sigma)
    assert np.max(np.abs(gamma)) < 1e-9
    assert np.max(np.abs(d[:, 0] - 1.0)) < 1e-9
    assert np.max(np.abs(d[:, 1] - 2.0)) < 1e-9
    centroids = mesh.tri_centroids
    assert np.max(np.abs(solution.u - (centroids[:, 0] + 2.0 * centroids[:, 1]))) < 1e-9


def test_scale_equivariance():
    domain = DomainSpec.rectangle()
    mesh = generate_structured(domain, 4)
    data = BoundaryData.for_domain(domain, -0.4999)
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    system = assemble_mixed(mesh, g=data, boundary_scheme=scheme)
    base = solve_mixed(system)
    system.G = 3.0 * system.G
    system.F = 3.0 * system.F
    scaled = solve_mixed(system)
    assert np.allclose(scaled.sigma, 3.0 * base.sigma, rtol=1e-12, atol=1e-12)
    assert np.allclose(scaled.u, 3.0 * base.u, rtol=1e-12, atol=1e-12)


def test_direct_solve_deterministic():
    domain = DomainSpec.lshape()
    mesh = generate_structured(domain, 4)
    data = BoundaryData.for_domain(domain, -0.4999)
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    system = assemble_mixed(mesh, g=data, boundary_scheme=scheme)
    a = solve_mixed(system)
    b = solve_mixed(system)
    assert np.array_equal(a.sigma, b.sigma)
    assert np.array_equal(a.u, b.u)


def test_residual_certified_against_assembled_blocks():
    mesh = generate_structured(DomainSpec.rectangle(), 4)
    data = BoundaryData.for_domain(DomainSpec.rectangle(), -0.4999)
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    system = assemble_mixed(mesh, g=data, boundary_scheme=scheme)
    solution = solve_mixed(system)
    A = system.block_matrix()
    b = system.rhs()
    x = np.concatenate([solution.sigma, solution.u])
    res = np.linalg.norm(A @ x - b) / np.linalg.norm(b)
    assert abs(res - solution.residual) < 1e-14
    assert res <= 1e-10


def test_unreachable_tolerance_raises():
    mesh = generate_structured(DomainSpec.rectangle(), 2)
    data = BoundaryData.for_domain(DomainSpec.rectangle(), -0.4999)
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    system = assemble_mixed(mesh, g=data, boundary_scheme=scheme)
    with pytest.raises(SolverError) as err:
        solve_mixed(system, SolverConfig(tolerance=1e-30))
    assert err.value.residual is not None


def test_iterative_mixed_matches_direct():
    domain = DomainSpec.lshape()
    mesh = generate_structured(domain, 4)
    data = BoundaryData.for_domain(domain, -0.4999)
    scheme = GradedScheme.for_exponent(-0.4999, (0.0, 0.0))
    system = assemble_mixed(mesh, g=data, boundary_scheme=scheme)
    direct = solve_mixed(system)
    iterative = solve_mixed(system, SolverConfig(method="iterative", tolerance=1e-10))
    assert iterative.residual <= 1e-10
    assert np.allclose(iterative.u, direct.u, atol=1e-8)
    assert np.allclose(iterative.sigma, direct.sigma, atol=1e-8)


def test_iterative_spd_matches_direct():
    mesh = jittered_mesh(DomainSpec.rectangle(), 6, seed=10)
    exact = 1.0 - mesh.vertices[:, 0] + 0.5 * mesh.vertices[:, 1]
    system = assemble_p1_dirichlet(mesh, exact)
    direct = solve_spd(system)
    iterative = solve_spd(system, SolverConfig(method="iterative", tolerance=1e-10))
    assert np.allclose(direct, iterative, atol=1e-8)
    assert np.max(np.abs(direct - exact)) < 1e-10


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(method="magic")
    with pytest.raises(ValueError):
        SolverConfig(tolerance=0.0)
