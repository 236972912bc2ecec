"""Sparse solvers for the saddle-point and SPD systems with residual
certification against the original (unfactorized) matrices.

The direct path factorizes with SuperLU and is bit-reproducible for
identical inputs. The iterative fallback uses MINRES with a block
diagonal preconditioner (lumped RT0 mass; approximate Schur complement
B diag(M)^-1 B^T) for the saddle system and CG with an incomplete
factorization for the SPD one.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, cg, minres, splu

DIRECT = "direct"
ITERATIVE = "iterative"


class SolverError(RuntimeError):
    """Solve failed or could not certify the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SolverConfig:
    method: str = DIRECT
    tolerance: float = 1e-10
    max_iterations: int = 20000

    def __post_init__(self):
        if self.method not in (DIRECT, ITERATIVE):
            raise ValueError(f"unknown solver method {self.method!r}")
        if self.tolerance <= 0.0:
            raise ValueError("solver tolerance must be positive")


@dataclass
class MixedSolution:
    sigma: np.ndarray
    u: np.ndarray
    residual: float


def _relative_residual(A, x, b):
    scale = np.linalg.norm(b)
    if scale == 0.0:
        scale = 1.0
    return float(np.linalg.norm(A @ x - b) / scale)


def _certify(A, x, b, cfg, what):
    res = _relative_residual(A, x, b)
    if not np.isfinite(res) or res > cfg.tolerance:
        raise SolverError(f"{what} residual {res:.3e} exceeds tolerance "
                          f"{cfg.tolerance:.1e}", residual=res)
    return res


def solve_mixed(system, cfg=SolverConfig()):
    """Solve the assembled saddle-point system for (sigma_h, u_h).

    Unknown ordering is all flux dofs first, then all cell dofs. The
    certified residual is recomputed from the assembled blocks, not from
    the factorization.
    """
    A = system.block_matrix()
    b = system.rhs()
    ne = system.num_flux_dofs

    if cfg.method == DIRECT:
        try:
            x = splu(A.tocsc()).solve(b)
        except RuntimeError as exc:
            raise SolverError(f"sparse factorization failed: {exc}") from exc
    else:
        x = _minres_block(system, A, b, cfg)

    res = _certify(A, x, b, cfg, "mixed system")
    return MixedSolution(sigma=x[:ne], u=x[ne:], residual=res)


def _minres_block(system, A, b, cfg):
    md = system.M.diagonal()
    if np.any(md <= 0.0):
        raise SolverError("mass matrix diagonal is not positive")
    Dinv = 1.0 / md
    S = (system.B @ sp.diags(Dinv) @ system.B.T).tocsc()
    S_lu = splu(S)
    ne = md.size

    def apply_prec(r):
        out = np.empty_like(r)
        out[:ne] = Dinv * r[:ne]
        out[ne:] = S_lu.solve(r[ne:])
        return out

    P = LinearOperator(A.shape, matvec=apply_prec)
    norm_b = np.linalg.norm(b)
    rtol = cfg.tolerance if norm_b > 0 else 0.0
    x, info = minres(A, b, rtol=rtol * 1e-2, maxiter=cfg.max_iterations, M=P)
    if info != 0:
        raise SolverError(f"MINRES stagnated (info={info})",
                          residual=_relative_residual(A, x, b))
    return x


def solve_spd(system, cfg=SolverConfig()):
    """Solve the reduced SPD Lagrange system; returns the full nodal
    vector including the lifted boundary values."""
    A = system.matrix
    b = system.rhs

    if cfg.method == DIRECT:
        try:
            x = splu(A.tocsc()).solve(b)
        except RuntimeError as exc:
            raise SolverError(f"sparse factorization failed: {exc}") from exc
    else:
        ilu = sp.linalg.spilu(A.tocsc(), drop_tol=1e-5, fill_factor=20)
        P = LinearOperator(A.shape, matvec=ilu.solve)
        x, info = cg(A, b, rtol=cfg.tolerance * 1e-2, atol=0.0,
                     maxiter=cfg.max_iterations, M=P)
        if info != 0:
            raise SolverError(f"CG stagnated (info={info})",
                              residual=_relative_residual(A, x, b))

    _certify(A, x, b, cfg, "Lagrange system")
    return system.full_vector(x)
