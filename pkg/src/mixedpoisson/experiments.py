"""Experiment drivers: convergence tables for the four study cases and
the side-by-side comparison with the Lagrange/L2-projection baseline.

Case ids: "1" (rectangle, alpha = -0.4999), "2" (L-shape, same alpha),
"3-rect" and "3-lshape" (alpha = -1/3, smoother data). Each run writes
one CSV table; reruns with identical configuration are byte-identical.
"""

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .assembly import assemble_mixed, assemble_p1_dirichlet
from .errors import ConvergenceReport, ReportRow, build_sigma_reference, l2_error_sigma, l2_error_u
from .exact import ORIGIN, BoundaryData
from .mesh import DomainSpec, generate_structured
from .quadrature import GradedScheme
from .solver import SolverConfig, solve_mixed, solve_spd
from .spaces import boundary_l2_projection

DEFAULT_LEVELS = (2, 4, 8, 16, 32, 64, 128)
DEFAULT_SIGMA_REF = 512

EXAMPLES = {
    "1": ("rectangle", -0.4999),
    "2": ("lshape", -0.4999),
    "3-rect": ("rectangle", -1.0 / 3.0),
    "3-lshape": ("lshape", -1.0 / 3.0),
}


class ExperimentError(RuntimeError):
    """A stage of an experiment failed; the message names the level."""


@dataclass(frozen=True)
class ExpectedRate:
    """Predicted L2 rate t + s - 1/2 from the domain regularity index s
    and the boundary-data smoothness t (epsilon set to zero)."""

    s: float
    t: float

    @property
    def rate(self):
        return self.t + self.s - 0.5


def _expected(example):
    domain_kind, alpha = _case(example)
    s = 1.0 if domain_kind == "rectangle" else 2.0 / 3.0
    t = 0.0 if alpha <= -0.45 else 1.0 / 6.0
    return ExpectedRate(s=s, t=t)


def predict_rate(example):
    """Nominal convergence rate of ||u - u_h|| for a study case."""
    return _expected(example).rate


def _case(example):
    key = str(example)
    if key not in EXAMPLES:
        raise ValueError(f"unknown example id {key!r}; choose from {sorted(EXAMPLES)}")
    return EXAMPLES[key]


@dataclass
class ExperimentConfig:
    example: str
    levels: tuple = DEFAULT_LEVELS
    sigma_ref_n: int = DEFAULT_SIGMA_REF
    out_dir: str = "."
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        _case(self.example)
        levels = tuple(int(n) for n in self.levels)
        if not levels:
            raise ValueError("need at least one level")
        for prev, cur in zip(levels, levels[1:]):
            if cur != 2 * prev:
                raise ValueError("levels must be strictly increasing powers of 2 "
                                 "(each double the previous)")
        if levels[0] & (levels[0] - 1):
            raise ValueError("levels must be powers of 2")
        self.levels = levels

    @property
    def csv_path(self):
        return os.path.join(self.out_dir, f"example-{self.example}.csv")


def run_example(cfg):
    """Run one study case: per level, assemble, solve, measure errors;
    write the table CSV and return the report."""
    domain_kind, alpha = _case(cfg.example)
    domain = DomainSpec(domain_kind)
    data = BoundaryData.for_domain(domain, alpha)
    scheme = GradedScheme.for_exponent(alpha, ORIGIN)

    report = ConvergenceReport(label=f"example-{cfg.example}")
    for n in cfg.levels:
        try:
            mesh = generate_structured(domain, n)
            system = assemble_mixed(mesh, g=data, boundary_scheme=scheme)
            solution = solve_mixed(system, cfg.solver)
            err_u = l2_error_u(solution.u, data.solution, mesh)
            err_sigma = None
            if cfg.sigma_ref_n:
                gh = boundary_l2_projection(data, mesh, scheme=scheme)
                ref = build_sigma_reference(gh, domain, cfg.sigma_ref_n, cfg.solver)
                err_sigma = l2_error_sigma(solution.sigma, mesh, ref)
        except Exception as exc:
            raise ExperimentError(f"level {n}: {exc}") from exc
        report.rows.append(ReportRow(level=n, h=mesh.h, err_u=err_u, err_sigma=err_sigma))

    report.compute_rates()
    os.makedirs(cfg.out_dir, exist_ok=True)
    report.to_csv(cfg.csv_path)
    return report


@dataclass
class ComparisonResult:
    mixed_csv: str
    p1_csv: str
    mixed_max_near_origin: float
    p1_max_near_origin: float


def compare_p1(domain, n, alpha, out_dir=".", solver=SolverConfig()):
    """Solve the same problem with the mixed method and with the P1 /
    boundary-projection baseline on one mesh; dump both fields as CSV.

    The overshoot diagnostic reports the largest |value| near the
    origin for each field: P1 nodal values within distance 2/n, mixed
    cell values on cells touching the origin.
    """
    if isinstance(domain, str):
        domain = DomainSpec.from_name(domain)
    data = BoundaryData.for_domain(domain, alpha)
    scheme = GradedScheme.for_exponent(alpha, ORIGIN)
    mesh = generate_structured(domain, n)

    system = assemble_mixed(mesh, g=data, boundary_scheme=scheme)
    mixed = solve_mixed(system, solver)

    gh = boundary_l2_projection(data, mesh, scheme=scheme)
    p1_system = assemble_p1_dirichlet(mesh, gh.vertex_values())
    nodal = solve_spd(p1_system, solver)

    os.makedirs(out_dir, exist_ok=True)
    mixed_csv = os.path.join(out_dir, f"compare-{domain.kind}-n{n}-mixed.csv")
    p1_csv = os.path.join(out_dir, f"compare-{domain.kind}-n{n}-p1.csv")
    centroids = mesh.tri_centroids
    _write_field(mixed_csv, centroids[:, 0], centroids[:, 1], mixed.u)
    _write_field(p1_csv, mesh.vertices[:, 0], mesh.vertices[:, 1], nodal)

    origin_cells = mesh.triangles_with_vertex_at(ORIGIN)
    mixed_max = float(np.abs(mixed.u[origin_cells]).max())
    near = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1]) <= 2.0 / n
    near[np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1]) == 0.0] = True
    p1_max = float(np.abs(nodal[near]).max())
    return ComparisonResult(mixed_csv=mixed_csv, p1_csv=p1_csv,
                            mixed_max_near_origin=mixed_max,
                            p1_max_near_origin=p1_max)


def _write_field(path, x, y, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "value"])
        for xi, yi, vi in zip(x, y, values):
            writer.writerow([f"{xi:.6f}", f"{yi:.6f}", f"{vi:.6f}"])
