"""Error norms against the singular exact solution and against a
fine-mesh regularized flux reference, plus convergence-rate reports.

The u error integrates (u - u_h)^2 with the graded triangle scheme on
cells that touch the origin (the integrand behaves like r^{2a} there)
and plain Gauss rules elsewhere. The sigma error compares the coarse
RT0 field, affine per coarse cell, against the cellwise-constant
gradient of a P1 solve on a nested fine mesh; the difference is linear
on every fine cell, so a degree-2 rule integrates its square exactly.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature as quad
from .assembly import assemble_p1_dirichlet
from .exact import ORIGIN
from .mesh import generate_structured
from .solver import SolverConfig, solve_spd
from .spaces import p1_gradients, rt0_cell_coefficients

NEAR_FIELD_RINGS = 4      # cells within this many cell widths of the origin
NEAR_FIELD_DEGREE = 10    # get the highest shipped plain rule

_CHUNK = 1 << 18


def l2_error_u(uh, sol, mesh, scheme=None, degree=quad.DEFAULT_TRIANGLE_DEGREE):
    """|| u - u_h ||_{L2} for a DG0 coefficient vector u_h.

    Parameters
    ----------
    uh : array, shape (T,)
    sol : SingularHarmonic
    mesh : Mesh
    scheme : GradedScheme, optional
        Defaults to the shipped grading for sol.alpha at the origin.
    degree : int
        Plain rule degree away from the singular point. Cells close to
        the origin (but not touching it) use the degree-10 rule, which
        keeps the far-field quadrature error well below the table digits.
    """
    uh = np.asarray(uh, dtype=float)
    if scheme is None:
        scheme = quad.GradedScheme.for_exponent(sol.alpha, ORIGIN)

    singular_cells = mesh.triangles_with_vertex_at(scheme.singular_point)
    sp = np.asarray(scheme.singular_point, dtype=float)
    dist = np.hypot(mesh.tri_centroids[:, 0] - sp[0], mesh.tri_centroids[:, 1] - sp[1])
    near = np.flatnonzero(dist <= NEAR_FIELD_RINGS / mesh.level)
    near = np.setdiff1d(near, singular_cells, assume_unique=False)
    far = np.setdiff1d(np.arange(mesh.num_triangles),
                       np.concatenate([singular_cells, near]))

    total = 0.0
    for cells, deg in ((far, degree), (near, NEAR_FIELD_DEGREE)):
        if cells.size == 0:
            continue
        rule = quad.triangle_rule(deg)
        pts = mesh.vertices[mesh.triangles[cells]]
        X = np.einsum("qk,tkd->tqd", rule.points, pts)
        vals = sol.eval(X[:, :, 0].ravel(), X[:, :, 1].ravel()).reshape(cells.size, -1)
        diff2 = (vals - uh[cells, None]) ** 2
        total += float(mesh.tri_areas[cells] @ (diff2 @ rule.weights))

    for t in singular_cells:
        c = uh[t]

        def err2(x, y, c=c):
            d = sol.eval(x, y) - c
            return d * d

        total += quad.integrate_triangle_graded(err2, mesh.vertices[mesh.triangles[t]], scheme)
    return math.sqrt(total)


@dataclass
class SigmaReference:
    """Cellwise-constant gradient of the regularized solution on a fine
    mesh, computed from the coarse level's boundary projection g_h."""

    fine_mesh: object
    gradients: np.ndarray
    residual: float


def build_sigma_reference(gh, domain, fine_n, cfg=SolverConfig()):
    """P1 solve on the level-fine_n mesh with Dirichlet data gh.

    gh is a BoundaryTraceFunction from a coarser nested level; it is
    evaluated exactly at the fine boundary vertices. fine_n must be the
    coarse level times a power of two so the meshes nest.
    """
    coarse_n = gh.space.mesh.level
    _require_nested(coarse_n, fine_n)
    fine = generate_structured(domain, fine_n)
    values = np.zeros(fine.num_vertices)
    bd = fine.boundary_vertices
    values[bd] = gh.eval_points(fine.vertices[bd, 0], fine.vertices[bd, 1])
    system = assemble_p1_dirichlet(fine, values)
    nodal = solve_spd(system, cfg)
    resid = np.linalg.norm(system.matrix @ nodal[system.interior] - system.rhs)
    scale = np.linalg.norm(system.rhs)
    return SigmaReference(fine_mesh=fine,
                          gradients=p1_gradients(fine, nodal),
                          residual=float(resid / (scale if scale > 0 else 1.0)))


def l2_error_sigma(sigma, coarse_mesh, ref):
    """|| sigma_h - sigma^h ||_{L2} between the coarse RT0 field and the
    fine-mesh reference gradient (meshes must nest)."""
    _require_nested(coarse_mesh.level, ref.fine_mesh.level)
    gamma, d = rt0_cell_coefficients(coarse_mesh, sigma)
    fine = ref.fine_mesh
    rule = quad.triangle_rule(2)

    total = 0.0
    T = fine.num_triangles
    for start in range(0, T, _CHUNK):
        cells = np.arange(start, min(start + _CHUNK, T))
        pts = fine.vertices[fine.triangles[cells]]
        X = np.einsum("qk,tkd->tqd", rule.points, pts)
        centroid = pts.mean(axis=1)
        parents = coarse_mesh.locate_triangles(centroid[:, 0], centroid[:, 1])
        g = gamma[parents][:, None]
        dx = g * X[:, :, 0] + d[parents, 0][:, None] - ref.gradients[cells, 0][:, None]
        dy = g * X[:, :, 1] + d[parents, 1][:, None] - ref.gradients[cells, 1][:, None]
        total += float(fine.tri_areas[cells] @ ((dx * dx + dy * dy) @ rule.weights))
    return math.sqrt(total)


def _require_nested(coarse_n, fine_n):
    ratio = fine_n // coarse_n
    if coarse_n * ratio != fine_n or ratio & (ratio - 1) or ratio < 1:
        raise ValueError(f"fine level {fine_n} is not a power-of-two multiple "
                         f"of coarse level {coarse_n}")


def rates(errs):
    """Convergence rates log2(e_{i-1} / e_i) for h halving per step."""
    errs = [float(e) for e in errs]
    if any(e <= 0.0 for e in errs):
        raise ValueError("convergence rates need strictly positive errors")
    return [math.log2(errs[i - 1] / errs[i]) for i in range(1, len(errs))]


@dataclass
class ReportRow:
    level: int
    h: float
    err_u: float
    rate_u: float = None
    err_sigma: float = None
    rate_sigma: float = None


@dataclass
class ConvergenceReport:
    """Per-level errors and rates, serializable to the table CSV."""

    label: str
    rows: list = field(default_factory=list)

    def compute_rates(self):
        eu = [r.err_u for r in self.rows]
        for i, rate in enumerate(rates(eu), start=1):
            self.rows[i].rate_u = rate
        es = [r.err_sigma for r in self.rows]
        if all(e is not None for e in es) and len(es) > 1:
            for i, rate in enumerate(rates(es), start=1):
                self.rows[i].rate_sigma = rate

    def write_csv(self, stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["level", "h", "err_u", "rate_u", "err_sigma", "rate_sigma"])
        for r in self.rows:
            writer.writerow([
                r.level,
                _fmt(r.h),
                _fmt(r.err_u),
                _fmt(r.rate_u),
                _fmt(r.err_sigma),
                _fmt(r.rate_sigma),
            ])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)


def _fmt(value):
    return "" if value is None else f"{value:.6f}"
