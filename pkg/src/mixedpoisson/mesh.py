"""Structured triangular meshes of the rectangle and L-shape domains.

Each axis-aligned square of side 1/n is split along its bottom-left to
top-right diagonal, giving nested meshes under uniform refinement. Full
edge topology is built with a global normal per edge and per-triangle
orientation signs, as needed for H(div)-conforming assembly.
"""

import math
from dataclasses import dataclass, field

import numpy as np


class MeshError(RuntimeError):
    """Raised when mesh topology violates a structural assumption."""


@dataclass(frozen=True)
class DomainSpec:
    """One of the two computational domains.

    kind : "rectangle" for (-1,1)x(0,1) or "lshape" for
    (-1,1)^2 minus the quadrant [0,1)x(-1,0]. Both carry the origin on
    their boundary; corners are listed counterclockwise starting from
    the canonical corner used as the boundary-loop origin.
    """

    kind: str

    _CORNERS = {
        "rectangle": ((-1.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0)),
        "lshape": ((-1.0, -1.0), (0.0, -1.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0)),
    }

    def __post_init__(self):
        if self.kind not in self._CORNERS:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @staticmethod
    def rectangle():
        return DomainSpec("rectangle")

    @staticmethod
    def lshape():
        return DomainSpec("lshape")

    @staticmethod
    def from_name(name):
        aliases = {"rect": "rectangle", "rectangle": "rectangle",
                   "lshape": "lshape", "l-shape": "lshape"}
        if name not in aliases:
            raise ValueError(f"unknown domain name {name!r}")
        return DomainSpec(aliases[name])

    @property
    def corners(self):
        return np.array(self._CORNERS[self.kind], dtype=float)

    @property
    def area(self):
        return 2.0 if self.kind == "rectangle" else 3.0

    @property
    def perimeter(self):
        return 6.0 if self.kind == "rectangle" else 8.0

    @property
    def theta_max(self):
        """Angular extent of the domain sector at the origin."""
        return math.pi if self.kind == "rectangle" else 1.5 * math.pi

    @property
    def bounding_box(self):
        if self.kind == "rectangle":
            return (-1.0, 0.0, 1.0, 1.0)
        return (-1.0, -1.0, 1.0, 1.0)

    def contains_square(self, cx, cy):
        """Mask of unit-grid squares (by centroid) that belong to the domain."""
        if self.kind == "rectangle":
            return np.ones_like(np.asarray(cx), dtype=bool)
        return ~((np.asarray(cx) > 0.0) & (np.asarray(cy) < 0.0))

    def arc_coordinate(self, x, y, tol=1e-9):
        """Counterclockwise arc length of boundary points, measured from
        the canonical corner. Raises if a point is not on the boundary."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        corners = self.corners
        s = np.full(x.shape, np.nan)
        offset = 0.0
        for i in range(len(corners)):
            p0 = corners[i]
            p1 = corners[(i + 1) % len(corners)]
            d = p1 - p0
            length = abs(d[0]) + abs(d[1])  # sides are axis aligned
            t = ((x - p0[0]) * d[0] + (y - p0[1]) * d[1]) / length
            on_line = np.abs((x - p0[0]) * d[1] - (y - p0[1]) * d[0]) <= tol * length
            hit = on_line & (t >= -tol) & (t <= length + tol) & np.isnan(s)
            s[hit] = offset + np.clip(t[hit], 0.0, length)
            offset += length
        if np.any(np.isnan(s)):
            raise ValueError("point is not on the domain boundary")
        return s % offset


@dataclass
class Mesh:
    """Structured triangulation with full edge/orientation topology.

    vertices are ordered lexicographically by (y, x). Triangles are
    counterclockwise. Edge k of a triangle is the edge opposite local
    vertex k. Interior edges store the (left, right) adjacent triangles;
    boundary edges store (triangle, -1) and carry the outward normal, so
    their orientation sign is +1.
    """

    domain: DomainSpec
    level: int
    vertices: np.ndarray        # (V, 2)
    triangles: np.ndarray       # (T, 3) vertex ids, CCW
    edges: np.ndarray           # (E, 2) vertex ids, oriented
    edge_tris: np.ndarray       # (E, 2) triangle ids, -1 marks boundary
    tri_edges: np.ndarray       # (T, 3) edge id opposite local vertex k
    tri_edge_signs: np.ndarray  # (T, 3) +-1 vs the global edge normal
    parent_triangles: np.ndarray = field(default=None, repr=False)
    _square_ids: np.ndarray = field(default=None, repr=False)

    @property
    def h(self):
        """Mesh parameter: the cell diameter sqrt(2)/n."""
        return math.sqrt(2.0) / self.level

    @property
    def num_vertices(self):
        return self.vertices.shape[0]

    @property
    def num_triangles(self):
        return self.triangles.shape[0]

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @property
    def boundary_edges(self):
        return np.flatnonzero(self.edge_tris[:, 1] < 0)

    @property
    def boundary_vertices(self):
        return np.unique(self.edges[self.boundary_edges].ravel())

    @property
    def edge_vectors(self):
        return self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]

    @property
    def edge_lengths(self):
        vec = self.edge_vectors
        return np.hypot(vec[:, 0], vec[:, 1])

    @property
    def edge_normals(self):
        """Global unit normals: tangent rotated clockwise by 90 degrees."""
        vec = self.edge_vectors
        n = np.column_stack([vec[:, 1], -vec[:, 0]])
        return n / np.hypot(vec[:, 0], vec[:, 1])[:, None]

    @property
    def tri_areas(self):
        p = self.vertices[self.triangles]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))

    @property
    def tri_centroids(self):
        return self.vertices[self.triangles].mean(axis=1)

    def triangles_with_vertex_at(self, point, tol=0.0):
        """Triangles having `point` as a vertex (exact coordinate match
        by default; structured meshes place special points exactly)."""
        p = np.asarray(point, dtype=float)
        if tol == 0.0:
            on = (self.vertices[:, 0] == p[0]) & (self.vertices[:, 1] == p[1])
        else:
            on = np.hypot(self.vertices[:, 0] - p[0], self.vertices[:, 1] - p[1]) <= tol
        ids = np.flatnonzero(on)
        if ids.size == 0:
            return np.empty(0, dtype=int)
        return np.flatnonzero(np.isin(self.triangles, ids).any(axis=1))

    def locate_triangles(self, x, y):
        """Triangle ids containing the given points (structured lookup).

        Points on a cell interface are assigned to the lower triangle of
        the smallest matching square; quadrature points are interior so
        the ambiguity never matters for integration.
        """
        xmin, ymin, _, _ = self.domain.bounding_box
        n = self.level
        grid = self._square_ids
        fx = (np.asarray(x, dtype=float) - xmin) * n
        fy = (np.asarray(y, dtype=float) - ymin) * n
        ix = np.clip(fx.astype(int), 0, grid.shape[1] - 1)
        iy = np.clip(fy.astype(int), 0, grid.shape[0] - 1)
        sq = grid[iy, ix]
        if np.any(sq < 0):
            raise ValueError("point lies outside the domain")
        upper = (fy - iy) > (fx - ix)
        return 2 * sq + upper.astype(int)

    def dump(self, stream):
        """Plain-text dump: `v x y`, `t i j k`, `b i j` sections."""
        for vx, vy in self.vertices:
            stream.write(f"v {vx:.17g} {vy:.17g}\n")
        for i, j, k in self.triangles:
            stream.write(f"t {i} {j} {k}\n")
        for e in self.boundary_edges:
            stream.write(f"b {self.edges[e, 0]} {self.edges[e, 1]}\n")


def generate_structured(domain, n):
    """Generate the level-n structured mesh of the given domain.

    Squares of side 1/n are split along the bottom-left to top-right
    diagonal; h = sqrt(2)/n. Meshes at levels n and 2n are nested.
    """
    if n < 1:
        raise ValueError("mesh level must be a positive integer")
    xmin, ymin, xmax, ymax = domain.bounding_box
    nx = round((xmax - xmin) * n)
    ny = round((ymax - ymin) * n)

    # full grid, vertices lexicographic by (y, x)
    ix, iy = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1))
    gx = xmin + ix.ravel() / n
    gy = ymin + iy.ravel() / n

    sx, sy = np.meshgrid(np.arange(nx), np.arange(ny))
    sx = sx.ravel()
    sy = sy.ravel()
    keep = domain.contains_square(xmin + (sx + 0.5) / n, ymin + (sy + 0.5) / n)
    sx, sy = sx[keep], sy[keep]

    square_ids = -np.ones((ny, nx), dtype=int)
    square_ids[sy, sx] = np.arange(sx.size)

    v00 = sy * (nx + 1) + sx
    v10 = v00 + 1
    v01 = v00 + (nx + 1)
    v11 = v01 + 1
    tris_full = np.empty((2 * sx.size, 3), dtype=int)
    tris_full[0::2] = np.column_stack([v00, v10, v11])  # below the diagonal
    tris_full[1::2] = np.column_stack([v00, v11, v01])  # above the diagonal

    used = np.unique(tris_full)
    remap = -np.ones((nx + 1) * (ny + 1), dtype=int)
    remap[used] = np.arange(used.size)
    vertices = np.column_stack([gx[used], gy[used]])
    triangles = remap[tris_full]

    edges, edge_tris, tri_edges, tri_edge_signs = _build_edges(vertices, triangles)
    return Mesh(domain=domain, level=n, vertices=vertices, triangles=triangles,
                edges=edges, edge_tris=edge_tris, tri_edges=tri_edges,
                tri_edge_signs=tri_edge_signs, _square_ids=square_ids)


def _build_edges(vertices, triangles):
    T = triangles.shape[0]
    # directed traversal pairs, local edge k opposite vertex k
    a = triangles[:, [1, 2, 0]].ravel()
    b = triangles[:, [2, 0, 1]].ravel()
    key = np.column_stack([np.minimum(a, b), np.maximum(a, b)])
    edges, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    edges = edges.copy()
    tri_edges = inverse.reshape(T, 3)

    if counts.max() > 2:
        raise MeshError("an edge is shared by more than two triangles")

    slot = np.argsort(inverse, kind="stable")
    owner_tri = slot // 3
    edge_tris = -np.ones((edges.shape[0], 2), dtype=int)
    first = np.concatenate([[0], np.cumsum(counts)[:-1]])
    edge_tris[:, 0] = owner_tri[first]
    second = counts == 2
    edge_tris[second, 1] = owner_tri[first[second] + 1]

    # boundary edges take the traversal direction of their owning
    # triangle so the global normal points outward (sign +1)
    boundary = np.flatnonzero(counts == 1)
    owner_slot = slot[first[boundary]]
    edges[boundary, 0] = a[owner_slot]
    edges[boundary, 1] = b[owner_slot]

    matches = edges[tri_edges.ravel(), 0] == a
    tri_edge_signs = np.where(matches, 1, -1).reshape(T, 3).astype(np.int8)
    return edges, edge_tris, tri_edges, tri_edge_signs


def refine_uniform(mesh):
    """Uniformly refine: the result equals generate_structured(domain, 2n)
    and carries parent_triangles mapping each child to its parent."""
    fine = generate_structured(mesh.domain, 2 * mesh.level)
    c = fine.tri_centroids
    fine.parent_triangles = mesh.locate_triangles(c[:, 0], c[:, 1])
    return fine


def boundary_loop(mesh):
    """Boundary edge ids ordered counterclockwise, starting at the
    domain's canonical corner. Raises MeshError unless the boundary is a
    single closed loop."""
    bd = mesh.boundary_edges
    starts = mesh.edges[bd, 0]
    ends = mesh.edges[bd, 1]
    next_by_vertex = {}
    for e, v0 in zip(bd, starts):
        if v0 in next_by_vertex:
            raise MeshError("boundary is not a single closed loop")
        next_by_vertex[int(v0)] = int(e)

    corner = mesh.domain.corners[0]
    at_corner = np.flatnonzero((mesh.vertices[:, 0] == corner[0])
                               & (mesh.vertices[:, 1] == corner[1]))
    if at_corner.size != 1 or int(at_corner[0]) not in next_by_vertex:
        raise MeshError("canonical corner is not a boundary vertex")

    loop = []
    v = int(at_corner[0])
    for _ in range(bd.size):
        e = next_by_vertex.get(v)
        if e is None:
            raise MeshError("boundary is not a single closed loop")
        loop.append(e)
        v = int(mesh.edges[e, 1])
    if v != int(at_corner[0]) or len(set(loop)) != bd.size:
        raise MeshError("boundary is not a single closed loop")
    return np.asarray(loop, dtype=int)
