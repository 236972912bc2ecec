"""Closed-form singular harmonics r^a sin(a*theta) and their traces.

These fields are harmonic for every exponent a and vanish on the ray
theta = 0, so with f = 0 they provide exact solutions whose boundary
trace is square integrable but rough (not in H^{1/2}) for a < -1/2 + t.
The polar angle is taken in the domain sector at the origin: [0, pi]
for the rectangle, [0, 3*pi/2] for the L-shape.
"""

import math
from dataclasses import dataclass

import numpy as np

from .mesh import DomainSpec

ORIGIN = (0.0, 0.0)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SingularHarmonic:
    """u(r, theta) = r^alpha sin(alpha theta) on a sector of extent theta_max."""

    alpha: float
    theta_max: float

    @staticmethod
    def for_domain(domain, alpha):
        return SingularHarmonic(alpha=alpha, theta_max=domain.theta_max)

    def _polar(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.theta_max <= math.pi:
            # rectangle sector: clamp stray -0.0 / noise below the axis
            y = np.maximum(y, 0.0)
            theta = np.arctan2(y, x)
        else:
            theta = np.arctan2(y, x)
            theta = np.where(theta < 0.0, theta + TWO_PI, theta)
        theta = np.clip(theta, 0.0, self.theta_max)
        r = np.hypot(x, y)
        if np.any(r == 0.0):
            raise ValueError("singular harmonic is undefined at the origin")
        return r, theta

    def eval(self, x, y):
        """Point values; x, y may be scalars or arrays (vectorized)."""
        r, theta = self._polar(x, y)
        out = r ** self.alpha * np.sin(self.alpha * theta)
        return float(out) if np.isscalar(x) and np.isscalar(y) else out

    def grad(self, x, y):
        """Cartesian gradient, from du = u_r e_r + (u_theta / r) e_theta."""
        r, theta = self._polar(x, y)
        a = self.alpha
        u_r = a * r ** (a - 1.0) * np.sin(a * theta)
        u_t = a * r ** (a - 1.0) * np.cos(a * theta)
        gx = u_r * np.cos(theta) - u_t * np.sin(theta)
        gy = u_r * np.sin(theta) + u_t * np.cos(theta)
        if np.isscalar(x) and np.isscalar(y):
            return float(gx), float(gy)
        return gx, gy

    def __call__(self, x, y):
        return self.eval(x, y)


@dataclass(frozen=True)
class BoundaryData:
    """Trace of a singular harmonic on the domain boundary.

    smoothness is the nominal Sobolev index t of the trace (0 for the
    alpha = -0.4999 family, 1/6 for alpha = -1/3), with the arbitrarily
    small epsilon of the sharp statement dropped.
    """

    solution: SingularHarmonic
    domain: DomainSpec
    smoothness: float

    @staticmethod
    def for_domain(domain, alpha):
        sol = SingularHarmonic.for_domain(domain, alpha)
        t = 0.0 if alpha <= -0.45 else max(0.0, alpha + 0.5)
        return BoundaryData(solution=sol, domain=domain, smoothness=t)

    @property
    def alpha(self):
        return self.solution.alpha

    @property
    def singular_point(self):
        return ORIGIN

    def __call__(self, x, y):
        return self.solution.eval(x, y)

    def trace_on_edge(self, p0, p1, s):
        """Value at p0 + s (p1 - p0) for s in [0, 1] on a boundary edge."""
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.0) or np.any(s > 1.0):
            raise ValueError("edge parameter must lie in [0, 1]")
        p0 = np.asarray(p0, dtype=float)
        p1 = np.asarray(p1, dtype=float)
        x = p0[0] + s * (p1[0] - p0[0])
        y = p0[1] + s * (p1[1] - p0[1])
        return self.solution.eval(x, y)
