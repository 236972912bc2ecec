"""Mixed RT0/DG0 finite elements for Poisson problems whose Dirichlet
data is merely square integrable on the boundary."""

from .exact import BoundaryData, SingularHarmonic
from .mesh import DomainSpec, Mesh, boundary_loop, generate_structured, refine_uniform
from .solver import MixedSolution, SolverConfig, solve_mixed, solve_spd

__all__ = [
    "BoundaryData",
    "DomainSpec",
    "Mesh",
    "MixedSolution",
    "SingularHarmonic",
    "SolverConfig",
    "boundary_loop",
    "generate_structured",
    "refine_uniform",
    "solve_mixed",
    "solve_spd",
]

__version__ = "0.1.0"
