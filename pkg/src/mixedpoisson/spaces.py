"""Degree-of-freedom maps, basis evaluation and projections for the
RT0 / DG0 / P1 spaces and the piecewise-linear boundary trace space.

RT0 degrees of freedom are signed total fluxes across edges (the basis
function of edge e carries unit integral flux through e and zero through
the other edges of its triangles), which keeps the divergence matrix
entries at +-1 and the edge Kronecker property exact.
"""

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import quadrature as quad
from .mesh import boundary_loop


# ---------------------------------------------------------------------------
# RT0


def rt0_cell_coefficients(mesh, coeffs):
    """Per-cell affine form of an RT0 field: sigma|_K (x) = gamma_K x + d_K.

    Returns (gamma, d) with shapes (T,) and (T, 2).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    areas = mesh.tri_areas
    signed = coeffs[mesh.tri_edges] * mesh.tri_edge_signs          # (T, 3)
    opp = mesh.vertices[mesh.triangles]                            # (T, 3, 2)
    gamma = signed.sum(axis=1) / (2.0 * areas)
    d = -(signed[:, :, None] * opp).sum(axis=1) / (2.0 * areas)[:, None]
    return gamma, d


def rt0_divergence(mesh, coeffs):
    """Cellwise constant divergence of an RT0 coefficient vector."""
    gamma, _ = rt0_cell_coefficients(mesh, coeffs)
    return 2.0 * gamma


def rt0_eval(mesh, coeffs, tri_ids, x, y):
    """Evaluate an RT0 field at points known to lie in triangles tri_ids."""
    gamma, d = rt0_cell_coefficients(mesh, coeffs)
    g = gamma[tri_ids]
    return g * x + d[tri_ids, 0], g * y + d[tri_ids, 1]


def rt0_interpolate(v, mesh, rule=None):
    """Canonical RT0 interpolant: edge dofs are the total normal fluxes.

    Parameters
    ----------
    v : callable
        Vectorized vector field, (x, y) -> (vx, vy).
    mesh : Mesh
    rule : EdgeRule, optional
        Rule for the edge flux integrals (default 8-point Gauss).
    """
    if rule is None:
        rule = quad.edge_rule()
    p0 = mesh.vertices[mesh.edges[:, 0]]
    p1 = mesh.vertices[mesh.edges[:, 1]]
    pts = p0[:, None, :] + rule.points[None, :, None] * (p1 - p0)[:, None, :]
    vx, vy = v(pts[:, :, 0], pts[:, :, 1])
    normals = mesh.edge_normals
    vn = vx * normals[:, None, 0] + vy * normals[:, None, 1]
    return mesh.edge_lengths * (vn @ rule.weights)


# ---------------------------------------------------------------------------
# DG0


def dg0_project(f, mesh, degree=quad.DEFAULT_TRIANGLE_DEGREE, scheme=None):
    """L2 projection onto piecewise constants: cell averages of f.

    Cells with the scheme's singular point as a vertex are integrated
    with the graded triangle scheme; all other cells use the plain rule
    of the given degree.
    """
    rule = quad.triangle_rule(degree)
    pts = mesh.vertices[mesh.triangles]                            # (T, 3, 2)
    X = np.einsum("qk,tkd->tqd", rule.points, pts)
    vals = np.asarray(f(X[:, :, 0].ravel(), X[:, :, 1].ravel()), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise quad.QuadratureError("integrand is non-finite at a quadrature point")
    means = vals.reshape(X.shape[0], -1) @ rule.weights

    if scheme is not None:
        for t in mesh.triangles_with_vertex_at(scheme.singular_point):
            integral = quad.integrate_triangle_graded(f, pts[t], scheme)
            means[t] = integral / mesh.tri_areas[t]
    return means


# ---------------------------------------------------------------------------
# P1


def p1_gradients(mesh, nodal):
    """Cellwise constant gradient of a P1 nodal vector, shape (T, 2)."""
    nodal = np.asarray(nodal, dtype=float)
    p = mesh.vertices[mesh.triangles]
    areas = mesh.tri_areas
    gx = np.zeros(mesh.num_triangles)
    gy = np.zeros(mesh.num_triangles)
    for k in range(3):
        e = p[:, (k + 1) % 3, :] - p[:, (k + 2) % 3, :]
        u = nodal[mesh.triangles[:, k]]
        gx += u * e[:, 1]
        gy -= u * e[:, 0]
    return np.column_stack([gx, gy]) / (2.0 * areas)[:, None]


def p1_eval(mesh, nodal, tri_ids, x, y):
    """Evaluate a P1 field at points known to lie in triangles tri_ids."""
    nodal = np.asarray(nodal, dtype=float)
    tri = mesh.triangles[tri_ids]
    p = mesh.vertices[tri]
    areas = mesh.tri_areas[tri_ids]
    out = np.zeros(np.shape(x))
    for k in range(3):
        a = p[:, (k + 1) % 3, :]
        b = p[:, (k + 2) % 3, :]
        lam = ((b[:, 0] - a[:, 0]) * (y - a[:, 1])
               - (b[:, 1] - a[:, 1]) * (x - a[:, 0])) / (2.0 * areas)
        out += nodal[tri[:, k]] * lam
    return out


# ---------------------------------------------------------------------------
# boundary trace space


class BoundaryTraceSpace:
    """Continuous piecewise linears along the boundary loop.

    One degree of freedom per boundary vertex, shared across corners.
    Dof k sits at loop vertex k; edge k of the loop joins dofs k and
    k + 1 (cyclically).
    """

    def __init__(self, mesh):
        self.mesh = mesh
        self.loop_edges = boundary_loop(mesh)
        self.loop_vertices = mesh.edges[self.loop_edges, 0].copy()
        self.edge_lengths = mesh.edge_lengths[self.loop_edges]
        self.arc = np.concatenate([[0.0], np.cumsum(self.edge_lengths)])

    @property
    def ndofs(self):
        return self.loop_vertices.size

    @property
    def perimeter(self):
        return float(self.arc[-1])

    def edge_endpoints(self, k):
        e = self.loop_edges[k]
        return self.mesh.vertices[self.mesh.edges[e, 0]], self.mesh.vertices[self.mesh.edges[e, 1]]

    def mass_matrix(self):
        """Cyclic tridiagonal boundary mass matrix (exact, closed form)."""
        m = self.ndofs
        L = self.edge_lengths
        nxt = (np.arange(m) + 1) % m
        rows = np.concatenate([np.arange(m), nxt, np.arange(m), nxt])
        cols = np.concatenate([np.arange(m), nxt, nxt, np.arange(m)])
        data = np.concatenate([L / 3.0, L / 3.0, L / 6.0, L / 6.0])
        return sp.coo_matrix((data, (rows, cols)), shape=(m, m)).tocsr()

    def load_vector(self, g, scheme=None):
        """b_i = <g, phi_i> along the loop; graded quadrature on edges
        touching the scheme's singular point."""
        m = self.ndofs
        b = np.zeros(m)
        for k in range(m):
            p0, p1 = self.edge_endpoints(k)
            length = self.edge_lengths[k]
            d = p1 - p0
            inv_l2 = 1.0 / (length * length)

            def hat0(x, y):
                t = ((x - p0[0]) * d[0] + (y - p0[1]) * d[1]) * inv_l2
                return np.asarray(g(x, y)) * (1.0 - t)

            def hat1(x, y):
                t = ((x - p0[0]) * d[0] + (y - p0[1]) * d[1]) * inv_l2
                return np.asarray(g(x, y)) * t

            if scheme is not None and _touches(p0, p1, scheme.singular_point):
                i0 = quad.integrate_edge_graded(hat0, p0, p1, scheme)
                i1 = quad.integrate_edge_graded(hat1, p0, p1, scheme)
            else:
                i0 = quad.integrate_edge(hat0, p0, p1)
                i1 = quad.integrate_edge(hat1, p0, p1)
            b[k] += i0
            b[(k + 1) % m] += i1
        return b


class BoundaryTraceFunction:
    """A member of the boundary trace space: coefficients per loop dof."""

    def __init__(self, space, coefficients):
        self.space = space
        self.coefficients = np.asarray(coefficients, dtype=float)

    def __call__(self, x, y):
        return self.eval_points(x, y)

    def eval_points(self, x, y):
        """Evaluate at boundary points located by arc length (exact for
        points on the polygon, e.g. the vertices of a nested finer mesh)."""
        space = self.space
        s = space.mesh.domain.arc_coordinate(x, y)
        k = np.searchsorted(space.arc, s, side="right") - 1
        k = np.clip(k, 0, space.ndofs - 1)
        t = (s - space.arc[k]) / space.edge_lengths[k]
        t = np.clip(t, 0.0, 1.0)
        c = self.coefficients
        return (1.0 - t) * c[k] + t * c[(k + 1) % space.ndofs]

    def eval_param(self, k, s):
        """Value at parameter s in [0, 1] along loop edge k."""
        c = self.coefficients
        return (1.0 - s) * c[k] + s * c[(k + 1) % self.space.ndofs]

    def vertex_values(self):
        """Values keyed by global mesh vertex id (boundary vertices only)."""
        out = np.full(self.space.mesh.num_vertices, np.nan)
        out[self.space.loop_vertices] = self.coefficients
        return out


def boundary_l2_projection(g, mesh, scheme=None):
    """L2(Gamma) projection of g onto the boundary trace space.

    Solves the cyclic tridiagonal system M c = b. The returned function
    satisfies <g - g_h, phi_i> = 0 up to quadrature accuracy.
    """
    space = BoundaryTraceSpace(mesh)
    M = space.mass_matrix()
    b = space.load_vector(g, scheme=scheme)
    c = spsolve(M.tocsc(), b)
    if not np.all(np.isfinite(c)):
        raise RuntimeError("boundary mass system is singular")
    return BoundaryTraceFunction(space, c)


def boundary_l2_norm(g, mesh, scheme=None):
    """||g||_{L2(Gamma)} with graded quadrature near the singular point."""
    space = BoundaryTraceSpace(mesh)
    total = 0.0

    def g2(x, y):
        v = np.asarray(g(x, y))
        return v * v

    for k in range(space.ndofs):
        p0, p1 = space.edge_endpoints(k)
        if scheme is not None and _touches(p0, p1, scheme.singular_point):
            total += quad.integrate_edge_graded(g2, p0, p1, scheme)
        else:
            total += quad.integrate_edge(g2, p0, p1)
    return float(np.sqrt(total))


def _touches(p0, p1, point, tol=1e-12):
    p = np.asarray(point, dtype=float)
    return (np.allclose(p0, p, atol=tol) or np.allclose(p1, p, atol=tol))
