"""Metric extensors, distortion factorization, metric products and Hodge stars."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import (
    Algebra,
    Multiform,
    algebra,
    canonical_dot,
    clifford_mul,
    left_contract,
    right_contract,
    tilde,
    wedge,
)
from .eigen import jacobi_eigh
from .errors import DegenerateMetricError, GaugeError, NotSymmetricError, SignatureError
from .extensors import Extensor, adjoint, apply, compose, determinant, extension, inverse

SYMMETRY_TOL = 1e-12
DEGENERACY_TOL = 1e-12
CLUSTER_GAP = 1e-10
RECONSTRUCTION_TOL = 1e-10
GAUGE_TOL = 1e-10

PRODUCTS = ("wedge", "dot", "lcontract", "rcontract", "clifford")


class MetricExtensor:
    """A symmetric nondegenerate (1,1)-extensor."""

    def __init__(self, base: Extensor):
        if not base.is_one_one:
            raise NotSymmetricError("a metric extensor must be (1,1)")
        m = base.block(1, 1)
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > SYMMETRY_TOL * scale:
            raise NotSymmetricError(f"metric asymmetry {np.abs(m - m.T).max():.3e} exceeds tolerance")
        det = determinant(base)
        if abs(det) <= DEGENERACY_TOL:
            raise DegenerateMetricError(f"metric is degenerate (det = {det:.3e})")
        self.base = base
        self.det = det

    @classmethod
    def from_matrix(cls, matrix) -> "MetricExtensor":
        return cls(Extensor.from_matrix(matrix))

    @property
    def algebra(self) -> Algebra:
        return self.base.algebra

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.base.block(1, 1)

    def __call__(self, x: Multiform) -> Multiform:
        return apply(self.base, x)

    @cached_property
    def eigen(self) -> tuple[np.ndarray, np.ndarray]:
        return jacobi_eigh(self.matrix)

    @cached_property
    def signature(self) -> tuple[int, int]:
        values = self.eigen[0]
        return int(np.sum(values > DEGENERACY_TOL)), int(np.sum(values < -DEGENERACY_TOL))

    @cached_property
    def inverse(self) -> "MetricExtensor":
        inv = inverse(self.base)
        m = inv.block(1, 1)
        return MetricExtensor(Extensor.from_matrix(0.5 * (m + m.T), self.algebra))

    @cached_property
    def extended(self) -> Extensor:
        return extension(self.base)

    def ext(self, x: Multiform) -> Multiform:
        return apply(self.extended, x)

    @cached_property
    def volume_factor(self) -> float:
        return float(np.sqrt(abs(self.det)))

    @cached_property
    def sign(self) -> float:
        return float(np.sign(self.det))

    @cached_property
    def clifford_tensor(self) -> np.ndarray:
        """``T[a]`` is the matrix of left metric-Clifford multiplication by blade ``a``."""
        return _metric_clifford_tensor(self)

    def __repr__(self) -> str:
        return f"MetricExtensor(n={self.dim}, signature={self.signature})"


def eta_standard(alg: Algebra | int = 4) -> MetricExtensor:
    """Minkowski extensor with one positive direction along the first fiducial 1-form."""
    alg = algebra(alg) if isinstance(alg, int) else alg
    first = Multiform.basis_vector(alg, 1)
    return MetricExtensor(Extensor.from_function(alg, 1, 1, lambda a: clifford_mul(clifford_mul(first, a), first)))


def canonical_metric(alg: Algebra | int = 4) -> MetricExtensor:
    alg = algebra(alg) if isinstance(alg, int) else alg
    return MetricExtensor(Extensor.identity(alg))


# metric products -----------------------------------------------------------


def metric_dot(g: MetricExtensor, x: Multiform, y: Multiform) -> float:
    return canonical_dot(g.ext(x), y)


def metric_left_contract(g: MetricExtensor, x: Multiform, y: Multiform) -> Multiform:
    return left_contract(g.ext(x), y)


def metric_right_contract(g: MetricExtensor, x: Multiform, y: Multiform) -> Multiform:
    return right_contract(x, g.ext(y))


def _left_matrix(alg: Algebra, kind: str, x: Multiform) -> np.ndarray:
    """Matrix of ``y -> x (op) y`` for a canonical product."""
    m = np.zeros((alg.size, alg.size))
    cols = np.arange(alg.size)
    for i in np.flatnonzero(x.coeffs):
        m[alg.xor_table[i], cols] += x.coeffs[i] * alg.product_row(kind, int(i))
    return m


def _metric_clifford_tensor(g: MetricExtensor) -> np.ndarray:
    """Left multiplication matrices built from generators by the recursion
    ``op(e_j ^ B) = L_j op(B) - op(e_j _| B)`` where ``L_j = e_j _| + e_j ^``.
    """
    alg = g.algebra
    size = alg.size
    lifts = []
    for j in range(alg.dim):
        e_j = Multiform.basis_vector(alg, j + 1)
        lifts.append(_left_matrix(alg, "left", g(e_j)) + _left_matrix(alg, "wedge", e_j))
    ops = np.zeros((size, size, size))
    ops[0] = np.eye(size)
    for blade in sorted(range(1, size), key=lambda b: alg.grades[b]):
        j = (blade & -blade).bit_length() - 1
        rest = blade ^ (1 << j)
        # e_blade = e_j ^ e_rest because j is the lowest factor
        unit = np.zeros(size)
        unit[rest] = 1.0
        lowered = metric_left_contract(g, Multiform.basis_vector(alg, j + 1), Multiform(alg, unit))
        ops[blade] = lifts[j] @ ops[rest] - np.tensordot(lowered.coeffs, ops, axes=(0, 0))
    ops.setflags(write=False)
    return ops


def metric_clifford(g: MetricExtensor, x: Multiform, y: Multiform) -> Multiform:
    t = g.clifford_tensor
    return Multiform(g.algebra, np.tensordot(x.coeffs, t, axes=(0, 0)) @ y.coeffs)


def metric_commutator(g: MetricExtensor, x: Multiform, y: Multiform) -> Multiform:
    return (metric_clifford(g, x, y) - metric_clifford(g, y, x)) * 0.5


def metric_product(g: MetricExtensor, tag: str, x: Multiform, y: Multiform) -> Multiform:
    if tag == "wedge":
        return wedge(x, y)
    if tag == "dot":
        return Multiform.scalar(x.algebra, metric_dot(g, x, y))
    if tag == "lcontract":
        return metric_left_contract(g, x, y)
    if tag == "rcontract":
        return metric_right_contract(g, x, y)
    if tag == "clifford":
        return metric_clifford(g, x, y)
    raise ValueError(f"unknown product tag {tag!r}; expected one of {PRODUCTS}")


# distortion -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Distortion:
    """An invertible ``h`` with ``g = h^dagger eta h``."""

    h: Extensor
    eta: MetricExtensor = field(default=None)

    def __post_init__(self):
        if self.eta is None:
            object.__setattr__(self, "eta", eta_standard(self.h.algebra))
        det = determinant(self.h)
        if abs(det) <= DEGENERACY_TOL:
            raise DegenerateMetricError(f"distortion is singular (det = {det:.3e})")

    @property
    def algebra(self) -> Algebra:
        return self.h.algebra

    @cached_property
    def det(self) -> float:
        return determinant(self.h)

    @cached_property
    def adjoint(self) -> Extensor:
        return adjoint(self.h)

    @cached_property
    def inverse(self) -> Extensor:
        return inverse(self.h)

    @cached_property
    def clubs(self) -> Extensor:
        """The inverse of the adjoint."""
        return adjoint(self.inverse)

    @cached_property
    def metric(self) -> MetricExtensor:
        m = compose(self.adjoint, compose(self.eta.base, self.h)).block(1, 1)
        return MetricExtensor(Extensor.from_matrix(0.5 * (m + m.T), self.algebra))

    @cached_property
    def extended(self) -> Extensor:
        return extension(self.h)

    def residual(self, g: MetricExtensor) -> float:
        return float(np.abs(self.metric.matrix - g.matrix).max())


def _cluster_basis(vectors: np.ndarray, dim: int) -> np.ndarray:
    """Deterministic orthonormal basis of the span of ``vectors`` (columns)."""
    projector = vectors @ vectors.T
    chosen: list[np.ndarray] = []
    for axis in np.eye(dim):
        v = projector @ axis
        for u in chosen:
            v = v - (u @ v) * u
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            chosen.append(v / norm)
        if len(chosen) == vectors.shape[1]:
            break
    return np.array(chosen).T


def _orient(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v if v[k] > 0 else -v


def factorize_metric(g: MetricExtensor, eta: MetricExtensor | None = None) -> Distortion:
    """Distortion ``h = sum sqrt|lambda| (a.v) e^mu`` from the eigenpairs of ``g``."""
    eta = eta or eta_standard(g.algebra)
    values, vectors = g.eigen
    if np.any(np.abs(values) < DEGENERACY_TOL):
        raise DegenerateMetricError(f"metric has a vanishing eigenvalue ({np.abs(values).min():.3e})")
    if g.signature != eta.signature:
        raise SignatureError(f"metric signature {g.signature} does not match {eta.signature}")
    order = sorted(range(len(values)), key=lambda i: (values[i] < 0, -abs(values[i]), i))
    values = values[order]
    vectors = vectors[:, order]
    # clusters of (numerically) equal eigenvalues get a deterministic basis
    start = 0
    while start < len(values):
        stop = start + 1
        while stop < len(values) and abs(values[stop] - values[stop - 1]) < CLUSTER_GAP:
            stop += 1
        if stop - start > 1:
            vectors[:, start:stop] = _cluster_basis(vectors[:, start:stop], g.dim)
        start = stop
    vectors = np.column_stack([_orient(vectors[:, i]) for i in range(g.dim)])
    # eta's own eigen-directions receive the eigenvalues of matching sign
    eta_values = np.diag(eta.matrix)
    if not np.allclose(eta.matrix, np.diag(eta_values)):
        raise SignatureError("factorization needs a diagonal Minkowski extensor")
    slots = sorted(range(g.dim), key=lambda i: (eta_values[i] < 0, i))
    h = np.zeros((g.dim, g.dim))
    for k, slot in enumerate(slots):
        h[slot] = np.sqrt(abs(values[k])) * vectors[:, k]
    return Distortion(Extensor.from_matrix(h, g.algebra), eta)


def is_eta_orthogonal(lorentz: Extensor, eta: MetricExtensor, tol: float = GAUGE_TOL) -> bool:
    m = lorentz.block(1, 1)
    return bool(np.abs(m.T @ eta.matrix @ m - eta.matrix).max() <= tol)


def gauge_transform(d: Distortion, lorentz: Extensor) -> Distortion:
    if not is_eta_orthogonal(lorentz, d.eta):
        raise GaugeError("gauge extensor does not preserve eta")
    return Distortion(compose(lorentz, d.h), d.eta)


def golden_rule_check(d: Distortion, x: Multiform, y: Multiform, product_tag: str) -> float:
    """Size of ``h(X *_g Y) - h(X) *_eta h(Y)``."""
    g = d.metric
    left = apply(d.extended, metric_product(g, product_tag, x, y))
    right = metric_product(d.eta, product_tag, apply(d.extended, x), apply(d.extended, y))
    return (left - right).norm()


# Hodge stars -----------------------------------------------------------------


class HodgeStar:
    """Hodge star of a metric acting on forms; ``metric=None`` gives the canonical star.

    The star of ``X`` is the reversed ``X`` contracted onto the volume
    element through the inverse metric.
    """

    def __init__(self, metric: MetricExtensor | None = None, alg: Algebra | None = None):
        self.metric = metric
        self.algebra = metric.algebra if metric is not None else (alg or algebra())
        factor = metric.volume_factor if metric is not None else 1.0
        self.volume = Multiform.pseudoscalar(self.algebra) * factor

    def __call__(self, x: Multiform) -> Multiform:
        xr = tilde(x)
        if self.metric is not None:
            xr = self.metric.inverse.ext(xr)
        return left_contract(xr, self.volume)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Blade-ordered matrix with ``star(x).coeffs == matrix @ x.coeffs``."""
        eye = np.eye(self.algebra.size)
        return np.array([self(Multiform(self.algebra, col)).coeffs for col in eye]).T

    def inverse(self, x: Multiform) -> Multiform:
        return Multiform(self.algebra, np.linalg.solve(self.matrix, x.coeffs))


def hodge(metric: MetricExtensor | None, x: Multiform) -> Multiform:
    return HodgeStar(metric, x.algebra)(x)


@dataclass(frozen=True)
class HodgeRelationResiduals:
    scaled_metric: float
    pullback_signed: float
    pullback_unsigned: float


def hodge_relation_check(d: Distortion, x: Multiform) -> HodgeRelationResiduals:
    """Residuals of the three ways to relate the star of ``g`` to the canonical and Minkowski stars.

    ``scaled_metric`` compares with ``sgn(det g)/sqrt|det g|`` times the
    extended metric after the canonical star; ``pullback_signed`` with
    ``sgn(det h)`` times adjoint-extension, Minkowski star, inverse-adjoint
    extension; ``pullback_unsigned`` drops that sign.
    """
    g = d.metric
    star_g = HodgeStar(g)(x)
    canonical = HodgeStar(None, x.algebra)(x)
    scaled = g.ext(canonical) * (g.sign / g.volume_factor)
    star_eta = HodgeStar(d.eta)
    pulled = apply(extension(d.adjoint), star_eta(apply(extension(d.clubs), x)))
    sign_h = float(np.sign(d.det))
    return HodgeRelationResiduals(
        scaled_metric=(star_g - scaled).norm(),
        pullback_signed=(star_g - pulled * sign_h).norm(),
        pullback_unsigned=(star_g - pulled).norm(),
    )
