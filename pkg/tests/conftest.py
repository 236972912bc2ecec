import numpy as np
import pytest

from mixedpoisson.mesh import DomainSpec, Mesh, _build_edges, generate_structured


@pytest.fixture(scope="session")
def rectangle():
    return DomainSpec.rectangle()


@pytest.fixture(scope="session")
def lshape():
    return DomainSpec.lshape()


def jittered_mesh(domain, n, amplitude=0.18, seed=0):
    """Structured mesh with interior vertices perturbed: supplies genuinely
    irregular triangles while keeping the boundary and topology intact."""
    base = generate_structured(domain, n)
    rng = np.random.default_rng(seed)
    vertices = base.vertices.copy()
    interior = np.setdiff1d(np.arange(base.num_vertices), base.boundary_vertices)
    vertices[interior] += rng.uniform(-amplitude / n, amplitude / n, (interior.size, 2))
    edges, edge_tris, tri_edges, signs = _build_edges(vertices, base.triangles)
    mesh = Mesh(domain=domain, level=n, vertices=vertices, triangles=base.triangles,
                edges=edges, edge_tris=edge_tris, tri_edges=tri_edges,
                tri_edge_signs=signs, _square_ids=base._square_ids)
    assert np.all(mesh.tri_areas > 0.0)
    return mesh
