"""Assembly of the RT0 x DG0 saddle-point system and of the P1 Lagrange
system used by the comparison baseline and the flux reference.

The mixed system is the symmetric indefinite block form

    [ M  B^T ] [ sigma ]   [  G ]
    [ B   0  ] [   u   ] = [ -F ]

with M the RT0 mass matrix, B the (unit-flux) divergence matrix whose
entries are the orientation signs, G_j = <g, phi_j . n> supported on
boundary edges, and F_K the cell integrals of the source.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import quadrature as quad
from .spaces import _touches

M_ASSEMBLY_DEGREE = 2  # RT0 x RT0 products are quadratic


@dataclass
class MixedSystem:
    mesh: object
    M: sp.csr_matrix
    B: sp.csr_matrix
    G: np.ndarray
    F: np.ndarray

    @property
    def num_flux_dofs(self):
        return self.M.shape[0]

    @property
    def num_cell_dofs(self):
        return self.B.shape[0]

    def block_matrix(self):
        return sp.bmat([[self.M, self.B.T], [self.B, None]], format="csr")

    def rhs(self):
        return np.concatenate([self.G, -self.F])


@dataclass
class P1System:
    """Reduced SPD system over interior vertices after Dirichlet lifting."""

    mesh: object
    matrix: sp.csr_matrix
    rhs: np.ndarray
    interior: np.ndarray
    boundary: np.ndarray
    boundary_values: np.ndarray

    def full_vector(self, interior_solution):
        out = np.zeros(self.mesh.num_vertices)
        out[self.interior] = interior_solution
        out[self.boundary] = self.boundary_values
        return out


def assemble_mixed(mesh, g=None, f=None, boundary_scheme=None,
                   f_degree=quad.DEFAULT_TRIANGLE_DEGREE):
    """Assemble the mixed system for boundary data g and source f.

    Parameters
    ----------
    mesh : Mesh
    g : callable or None
        Dirichlet data on the boundary (None means 0). Only enters the
        load G_j = (1/|e_j|) int_{e_j} g ds on boundary edges.
    f : callable or None
        Source term (None means 0).
    boundary_scheme : GradedScheme, optional
        Graded quadrature applied on the boundary edges that touch the
        scheme's singular point (g merely L2 there).
    """
    M = _rt0_mass(mesh)
    B = _divergence_matrix(mesh)
    G = _boundary_load(mesh, g, boundary_scheme)
    if f is None:
        F = np.zeros(mesh.num_triangles)
    else:
        rule = quad.triangle_rule(f_degree)
        pts = mesh.vertices[mesh.triangles]
        X = np.einsum("qk,tkd->tqd", rule.points, pts)
        vals = np.asarray(f(X[:, :, 0].ravel(), X[:, :, 1].ravel()), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise quad.QuadratureError("source term is non-finite at a quadrature point")
        F = mesh.tri_areas * (vals.reshape(mesh.num_triangles, -1) @ rule.weights)
    return MixedSystem(mesh=mesh, M=M, B=B, G=G, F=F)


def _rt0_mass(mesh):
    rule = quad.triangle_rule(M_ASSEMBLY_DEGREE)
    pts = mesh.vertices[mesh.triangles]                        # (T, 3, 2)
    X = np.einsum("qk,tkd->tqd", rule.points, pts)             # (T, q, 2)
    areas = mesh.tri_areas
    signs = mesh.tri_edge_signs.astype(float)
    scale = signs / (2.0 * areas)[:, None]                     # (T, 3)

    D = X[:, None, :, :] - pts[:, :, None, :]                  # (T, 3, q, 2): x - p_i
    dots = np.einsum("tiqd,tjqd->tijq", D, D)
    local = np.einsum("tijq,q->tij", dots, rule.weights) * areas[:, None, None]
    local *= scale[:, :, None] * scale[:, None, :]
    # exact symmetry of the local blocks before insertion
    local = 0.5 * (local + np.transpose(local, (0, 2, 1)))

    rows = np.repeat(mesh.tri_edges, 3, axis=1).ravel()
    cols = np.tile(mesh.tri_edges, (1, 3)).ravel()
    A = sp.coo_matrix((local.ravel(), (rows, cols)),
                      shape=(mesh.num_edges, mesh.num_edges))
    return A.tocsr()


def _divergence_matrix(mesh):
    T = mesh.num_triangles
    rows = np.repeat(np.arange(T), 3)
    cols = mesh.tri_edges.ravel()
    data = mesh.tri_edge_signs.ravel().astype(float)
    return sp.coo_matrix((data, (rows, cols)),
                         shape=(T, mesh.num_edges)).tocsr()


def _boundary_load(mesh, g, scheme):
    G = np.zeros(mesh.num_edges)
    if g is None:
        return G
    lengths = mesh.edge_lengths
    for e in mesh.boundary_edges:
        p0 = mesh.vertices[mesh.edges[e, 0]]
        p1 = mesh.vertices[mesh.edges[e, 1]]
        if scheme is not None and _touches(p0, p1, scheme.singular_point):
            integral = quad.integrate_edge_graded(g, p0, p1, scheme)
        else:
            integral = quad.integrate_edge(g, p0, p1)
        # unit-flux dof: phi_e . n = 1/|e| on its boundary edge
        G[e] = integral / lengths[e]
    return G


def assemble_p1_dirichlet(mesh, boundary_values, f=None,
                          f_degree=quad.DEFAULT_TRIANGLE_DEGREE):
    """Assemble the P1 stiffness system with lifted Dirichlet data.

    Parameters
    ----------
    boundary_values : array, shape (num_vertices,)
        Dirichlet values; read at boundary vertices only.
    """
    V = mesh.num_vertices
    p = mesh.vertices[mesh.triangles]
    areas = mesh.tri_areas
    # grad(lambda_k) = rot(p_{k+1} - p_{k+2}) / (2A), rot(v) = (v_y, -v_x)
    grads = np.empty((mesh.num_triangles, 3, 2))
    for k in range(3):
        e = p[:, (k + 1) % 3, :] - p[:, (k + 2) % 3, :]
        grads[:, k, 0] = e[:, 1]
        grads[:, k, 1] = -e[:, 0]
    grads /= (2.0 * areas)[:, None, None]

    local = np.einsum("tid,tjd->tij", grads, grads) * areas[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    A = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(V, V)).tocsr()

    load = np.zeros(V)
    if f is not None:
        rule = quad.triangle_rule(f_degree)
        X = np.einsum("qk,tkd->tqd", rule.points, p)
        vals = np.asarray(f(X[:, :, 0].ravel(), X[:, :, 1].ravel()), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise quad.QuadratureError("source term is non-finite at a quadrature point")
        vals = vals.reshape(mesh.num_triangles, -1)
        cell = areas[:, None] * np.einsum("tq,qk->tk", vals, rule.points * rule.weights[:, None])
        np.add.at(load, mesh.triangles.ravel(), cell.ravel())

    boundary = mesh.boundary_vertices
    mask = np.ones(V, dtype=bool)
    mask[boundary] = False
    interior = np.flatnonzero(mask)

    gb = np.asarray(boundary_values, dtype=float)[boundary]
    if not np.all(np.isfinite(gb)):
        raise ValueError("boundary values must be finite at all boundary vertices")
    A_ii = A[interior][:, interior].tocsr()
    rhs = load[interior] - A[interior][:, boundary] @ gb
    return P1System(mesh=mesh, matrix=A_ii, rhs=rhs, interior=interior,
                    boundary=boundary, boundary_values=gb)


def dump_matrix(matrix, stream):
    """Coordinate-format text dump (`row col value`) for external checks."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
        stream.write(f"{r} {c} {v:.17g}\n")
