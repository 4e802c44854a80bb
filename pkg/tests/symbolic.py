"""Symbolic coordinate oracle: Christoffel symbols and their derivatives via sympy, evaluated numerically."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy as sp


@dataclass
class CoordinateOracle:
    christoffel: Callable[..., np.ndarray]  # [s, m, n] = Gamma^s_{mn}
    christoffel_derivative: Callable[..., np.ndarray]  # [a, s, m, n] = d_a Gamma^s_{mn}
    metric: Callable[..., np.ndarray]

    def riemann(self, *point) -> np.ndarray:
        """``[s, c, a, b] = R^s_{cab}``, the commutator of coordinate derivatives acting on ``d_c``."""
        gamma = self.christoffel(*point)
        dgamma = self.christoffel_derivative(*point)
        out = np.einsum("ascb->scab", dgamma) - np.einsum("bsca->scab", dgamma)
        out += np.einsum("sae,ecb->scab", gamma, gamma) - np.einsum("sbe,eca->scab", gamma, gamma)
        return out

    def ricci(self, point) -> np.ndarray:
        return np.einsum("mamb->ab", self.riemann(*point))

    def scalar(self, point) -> float:
        return float(np.einsum("ab,ab->", np.linalg.inv(self.metric(*point)), self.ricci(point)))

    def kretschmann(self, point) -> float:
        g = self.metric(*point)
        gi = np.linalg.inv(g)
        lower = np.einsum("ws,scab->wcab", g, self.riemann(*point))
        upper = np.einsum("wcab,wi,cj,ak,bl->ijkl", lower, gi, gi, gi, gi)
        return float(np.einsum("ijkl,ijkl->", lower, upper))


def _numeric(coords, expr) -> Callable[..., np.ndarray]:
    func = sp.lambdify(coords, expr, "numpy", cse=True)
    return lambda *p: np.array(func(*p), dtype=float)


def coordinate_oracle(metric: sp.Matrix, coords: list[sp.Symbol], inverse: sp.Matrix | None = None) -> CoordinateOracle:
    n = len(coords)
    inv = metric.inv() if inverse is None else inverse
    gamma = [[[sum(inv[s, r] * (sp.diff(metric[r, m], coords[k]) + sp.diff(metric[r, k], coords[m]) - sp.diff(metric[m, k], coords[r]))
                   for r in range(n)) / 2 for k in range(n)] for m in range(n)] for s in range(n)]
    dgamma = [[[[sp.diff(gamma[s][m][k], x) for k in range(n)] for m in range(n)] for s in range(n)] for x in coords]
    return CoordinateOracle(_numeric(coords, gamma), _numeric(coords, dgamma), _numeric(coords, metric.tolist()))


def sphere_oracle(radius: float = 1.0) -> CoordinateOracle:
    th, ph = sp.symbols("theta phi")
    return coordinate_oracle(sp.diag(radius**2, radius**2 * sp.sin(th) ** 2), [th, ph])


def torus_oracle(big: float = 2.0, small: float = 1.0) -> CoordinateOracle:
    x1, x2 = sp.symbols("x1 x2")
    return coordinate_oracle(sp.diag(small**2, (big + small * sp.cos(x1)) ** 2), [x1, x2])


def schwarzschild_spherical_oracle(mass: float = 1.0) -> CoordinateOracle:
    t, r, th, ph = sp.symbols("t r theta phi")
    lapse = 1 - 2 * mass / r
    return coordinate_oracle(sp.diag(lapse, -1 / lapse, -(r**2), -(r**2) * sp.sin(th) ** 2), [t, r, th, ph])


def schwarzschild_cartesian_oracle(mass: float = 1.0) -> CoordinateOracle:
    t, x, y, z = coords = sp.symbols("t x y z")
    r = sp.sqrt(x**2 + y**2 + z**2)
    lapse = 1 - 2 * mass / r
    n = sp.Matrix([x, y, z]) / r
    radial = n * n.T
    g, inv = sp.zeros(4, 4), sp.zeros(4, 4)
    g[0, 0], inv[0, 0] = lapse, 1 / lapse
    # the radial direction scales by 1/lapse, so its inverse scales by lapse
    g[1:, 1:] = -sp.eye(3) - (1 / lapse - 1) * radial
    inv[1:, 1:] = -sp.eye(3) + (1 - lapse) * radial
    return coordinate_oracle(g, list(coords), inv)
