"""Fields on a coordinate chart: connections, torsion, curvature and gauge fields.

Points are coordinate arrays ``xi`` with ``x = xi^mu beta_mu``.  One-form
fields are stored by their fiducial components, a connection by the array
``C[mu, sigma, nu]`` of components of ``gamma_{beta_mu}(beta_nu)``, and all
derivatives are finite differences driven by :class:`FDConfig`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable

import numpy as np

from .algebra import Algebra, Multiform, algebra, left_contract, wedge
from .calculus import DEFAULT_FD, FDConfig, difference
from .errors import ChartError, DegenerateMetricError, DimensionError, SingularExtensorError
from .extensors import Extensor, adjoint, apply, generalization
from .metric import (
    MetricExtensor,
    eta_standard,
    metric_clifford,
    metric_commutator,
    metric_left_contract,
)

DEGENERACY_TOL = 1e-12
FRAME_GRAM_TOL = 1e-10
VARIANTS = ("plus", "minus")
DIFFERENTIAL_KINDS = ("grad", "div", "rot")


# fields ---------------------------------------------------------------------


def as_point(point, dim: int | None = None) -> np.ndarray:
    p = np.asarray(point, dtype=np.float64).reshape(-1)
    if dim is not None and p.size != dim:
        raise DimensionError(f"point has {p.size} coordinates, expected {dim}")
    return p


@dataclass(frozen=True)
class Field:
    """A closed-form field ``xi -> value`` with an optional chart-validity predicate.

    Calling the field checks the predicate; finite differences use the raw
    function so that stencils near a valid point are never rejected.
    """

    func: Callable[[np.ndarray], Any]
    dim: int
    valid: Callable[[np.ndarray], bool] | None = None

    def __call__(self, point):
        p = as_point(point, self.dim)
        self.check(p)
        return self.func(p)

    def check(self, point) -> None:
        if self.valid is not None and not self.valid(as_point(point, self.dim)):
            raise ChartError(f"point {[float(v) for v in np.round(as_point(point), 12)]} is outside the chart domain")


def constant_field(value, dim: int) -> Field:
    return Field(lambda _p: value, dim)


def _raw(obj) -> Callable[[np.ndarray], Any]:
    if isinstance(obj, Field):
        return obj.func
    if callable(obj) and not isinstance(obj, (Multiform, Extensor)):
        return obj
    return lambda _p: obj


def _components(value) -> np.ndarray:
    if isinstance(value, Multiform):
        return value.vector_part().copy()
    return np.asarray(value, dtype=np.float64).reshape(-1)


def vector_field(obj) -> Callable[[np.ndarray], np.ndarray]:
    """Component function of a 1-form field given as a constant, an array or a callable."""
    raw = _raw(obj)
    return lambda p: _components(raw(p))


def _along(func, point: np.ndarray, direction: np.ndarray, fd: FDConfig):
    # the step is a coordinate displacement sized by the point's extent along
    # the direction, so an angle next to a large radius gets an angle-sized step
    length = float(np.linalg.norm(direction))
    if length == 0.0:
        return difference(lambda s: func(point), 0.0, 1.0, fd.scheme)
    step = fd.step_at(abs(float(point @ direction)) / length) / length
    return difference(lambda s: func(point + s * direction), 0.0, step, fd.scheme)


def partials(func, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """Stack of coordinate partial derivatives of an array-valued function."""
    p = as_point(point)
    eye = np.eye(p.size)
    return np.array([_along(func, p, eye[k], fd) for k in range(p.size)])


def field_dir_derivative(X, a, point, fd: FDConfig = DEFAULT_FD):
    """``a . d X`` at ``point`` for a field of any value type supporting linear arithmetic."""
    p = as_point(point)
    direction = vector_field(a)(p)
    return _along(_raw(X), p, direction, fd)


def _bracket(a_func, b_func, p: np.ndarray, fd: FDConfig, constant: tuple[bool, bool] = (False, False)) -> np.ndarray:
    out = np.zeros(p.size)
    if not constant[1]:
        out = out + _along(b_func, p, a_func(p), fd)
    if not constant[0]:
        out = out - _along(a_func, p, b_func(p), fd)
    return out


def lie_bracket(a, b, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``[a, b] = a . d b - b . d a``."""
    p = as_point(point)
    return Multiform.vector(algebra(p.size), _bracket(vector_field(a), vector_field(b), p, fd))


def _inverse(matrix: np.ndarray, what: str = "metric") -> np.ndarray:
    det = np.linalg.det(matrix)
    if abs(det) <= DEGENERACY_TOL:
        raise DegenerateMetricError(f"{what} is degenerate (det = {det:.3e})")
    return np.linalg.inv(matrix)


@dataclass(frozen=True)
class MetricField(Field):
    """A field of covariant metric matrices ``g_{mu nu} = beta_mu . g(beta_nu)``."""

    def matrix(self, point) -> np.ndarray:
        return np.asarray(self(point), dtype=np.float64)

    def at(self, point) -> MetricExtensor:
        return MetricExtensor.from_matrix(self.matrix(point))

    def inverse_matrix(self, point) -> np.ndarray:
        return _inverse(self.matrix(point))

    def derivatives(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        """``dG[alpha] = d_alpha g`` as an ``(n, n, n)`` array."""
        self.check(point)
        return partials(self.func, point, fd)


@dataclass(frozen=True)
class DistortionField(Field):
    """A field of distortion matrices ``h`` with ``g = h^T eta h``."""

    eta: np.ndarray | None = None

    def eta_matrix(self) -> np.ndarray:
        return eta_standard(self.dim).matrix if self.eta is None else np.asarray(self.eta, dtype=np.float64)

    def matrix(self, point) -> np.ndarray:
        return np.asarray(self(point), dtype=np.float64)

    def inverse_matrix(self, point) -> np.ndarray:
        return _inverse(self.matrix(point), "distortion")

    def metric(self) -> MetricField:
        eta = self.eta_matrix()
        func = self.func

        def metric_matrix(p):
            h = np.asarray(func(p), dtype=np.float64)
            m = h.T @ eta @ h
            return 0.5 * (m + m.T)

        return MetricField(metric_matrix, self.dim, self.valid)


# frames ---------------------------------------------------------------------


@dataclass(frozen=True)
class FrameSpec:
    """A frame field whose column ``i`` holds the components of ``e_i``."""

    frame: Callable[[np.ndarray], np.ndarray]
    dim: int
    kind: str = "custom"

    def __post_init__(self):
        if self.kind not in ("coordinate", "orthonormal", "custom"):
            raise ValueError(f"unknown frame kind {self.kind!r}")

    def matrix(self, point) -> np.ndarray:
        e = np.asarray(self.frame(as_point(point, self.dim)), dtype=np.float64)
        if abs(np.linalg.det(e.T @ e)) <= FRAME_GRAM_TOL:
            raise SingularExtensorError("frame is not linearly independent here", float(np.linalg.det(e)))
        return e

    def coframe(self, point) -> np.ndarray:
        """Rows are the components of the dual coframe ``theta^i``."""
        return np.linalg.inv(self.matrix(point))

    def derivatives(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        return partials(self.frame, point, fd)

    def structure_coefficients(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        """``c[k, i, j]`` with ``[e_i, e_j] = c^k_{ij} e_k``."""
        p = as_point(point, self.dim)
        e = self.matrix(p)
        de = self.derivatives(p, fd)
        along = np.einsum("ai,asj->sij", e, de)
        brackets = along - along.transpose(0, 2, 1)
        return np.einsum("ks,sij->kij", np.linalg.inv(e), brackets)


def coordinate_frame(dim: int) -> FrameSpec:
    eye = np.eye(dim)
    return FrameSpec(lambda _p: eye, dim, "coordinate")


# connections ----------------------------------------------------------------


def _biform_matrix(coeffs2: np.ndarray, dim: int) -> np.ndarray:
    """Antisymmetric matrix ``A`` with ``B _ v = A v`` for the biform with these coefficients."""
    m = np.zeros((dim, dim))
    iu = np.triu_indices(dim, 1)
    m[iu] = coeffs2
    return m - m.T


def _bif_coefficients(matrix: np.ndarray) -> np.ndarray:
    """Biform coefficients of ``bif[t] = t(e^j) ^ e_j``."""
    iu = np.triu_indices(matrix.shape[0], 1)
    return (matrix - matrix.T)[iu]


def _biform(alg: Algebra, coeffs2: np.ndarray) -> Multiform:
    return Multiform.from_grade(alg, 2, coeffs2)


@dataclass(frozen=True)
class ConnectionJet:
    """Connection coefficients at a point and their coordinate derivatives."""

    coefficients: np.ndarray
    derivatives: np.ndarray

    def curvature_matrices(self) -> np.ndarray:
        """``M[alpha, beta]``: the matrix of ``c -> rho(beta_alpha, beta_beta, c)``."""
        c, dc = self.coefficients, self.derivatives
        ab = np.einsum("asm,bmn->absn", c, c)
        return dc - dc.transpose(1, 0, 2, 3) + ab - ab.transpose(1, 0, 2, 3)


class Connection:
    """A connection 2-extensor field ``gamma``: ``D_a b = a . d b + gamma_a(b)``."""

    dim: int
    valid: Callable[[np.ndarray], bool] | None = None

    def coefficients(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        """``C[mu, s, nu]``: component ``s`` of ``gamma_{beta_mu}(beta_nu)``."""
        p = as_point(point, self.dim)
        self.check(p)
        return self._coefficients(p, fd)

    def _coefficients(self, p: np.ndarray, fd: FDConfig) -> np.ndarray:
        raise NotImplementedError

    def check(self, point) -> None:
        if self.valid is not None and not self.valid(as_point(point, self.dim)):
            raise ChartError(f"point {[float(v) for v in np.round(as_point(point), 12)]} is outside the chart domain")

    @property
    def algebra(self) -> Algebra:
        return algebra(self.dim)

    def matrix(self, a, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        """Matrix of the (1,1)-extensor ``gamma_a`` at ``point``."""
        p = as_point(point, self.dim)
        self.check(p)
        return np.einsum("m,msn->sn", vector_field(a)(p), self.coefficients(p, fd))

    def gamma(self, a, b, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
        p = as_point(point, self.dim)
        return Multiform.vector(self.algebra, self.matrix(a, p, fd) @ vector_field(b)(p))

    def extensor(self, a, point, fd: FDConfig = DEFAULT_FD) -> Extensor:
        return Extensor.from_matrix(self.matrix(a, point, fd), self.algebra)

    def generalized(self, a, point, fd: FDConfig = DEFAULT_FD) -> Extensor:
        """The derivation ``Gamma_a`` acting on all grades."""
        return generalization(self.extensor(a, point, fd))

    def rotation(self, a, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
        """``omega(a) = bif[gamma_a] / 2``."""
        return _biform(self.algebra, 0.5 * _bif_coefficients(self.matrix(a, point, fd)))

    def jet(self, point, fd: FDConfig = DEFAULT_FD) -> ConnectionJet:
        p = as_point(point, self.dim)
        self.check(p)
        coeffs = self.coefficients(p, fd)
        derivs = partials(lambda q: self.coefficients(q, fd), p, fd.outer())
        return ConnectionJet(coeffs, derivs)


@dataclass(frozen=True)
class ZeroConnection(Connection):
    """``gamma = 0``: parallel transport keeps coordinate components fixed."""

    dim: int
    valid: Callable[[np.ndarray], bool] | None = None

    def _coefficients(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        return np.zeros((self.dim,) * 3)


@dataclass(frozen=True)
class LeviCivitaConnection(Connection):
    """The symmetric metric-compatible connection of a metric field."""

    metric: MetricField

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def valid(self):
        return self.metric.valid

    def _coefficients(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        p = as_point(point, self.dim)
        ginv = _inverse(np.asarray(self.metric.func(p), dtype=np.float64))
        dg = partials(self.metric.func, p, fd)
        first = 0.5 * (np.einsum("mnr->rmn", dg) + np.einsum("nrm->rmn", dg) - dg)
        return np.einsum("sr,rmn->msn", ginv, first)


@dataclass(frozen=True)
class FrameConnection(Connection):
    """A connection given by ``D_{e_i} e_j = coeffs[k, i, j] e_k`` in a frame."""

    frame: FrameSpec
    coeffs: Callable[[np.ndarray], np.ndarray] | None = None
    valid: Callable[[np.ndarray], bool] | None = None

    @property
    def dim(self) -> int:
        return self.frame.dim

    def frame_coefficients(self, point) -> np.ndarray:
        if self.coeffs is None:
            return np.zeros((self.dim,) * 3)
        return np.asarray(self.coeffs(as_point(point, self.dim)), dtype=np.float64)

    def _coefficients(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        p = as_point(point, self.dim)
        e = self.frame.matrix(p)
        theta = np.linalg.inv(e)
        de = self.frame.derivatives(p, fd)
        transported = np.einsum("sk,kij->sij", e, self.frame_coefficients(p))
        along = np.einsum("ai,asj->sij", e, de)
        in_frame = transported - along
        return np.einsum("im,jn,sij->msn", theta, theta, in_frame)


def frame_coefficients(conn: Connection, frame: FrameSpec, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """``w[k, i, j]`` with ``D_{e_i} e_j = w^k_{ij} e_k`` in the given frame."""
    p = as_point(point, conn.dim)
    conn.check(p)
    e = frame.matrix(p)
    along = np.einsum("ai,asj->sij", e, frame.derivatives(p, fd))
    in_frame = np.einsum("msn,mi,nj->sij", conn.coefficients(p, fd), e, e)
    return np.einsum("ks,sij->kij", np.linalg.inv(e), in_frame + along)


@dataclass(frozen=True)
class CoefficientConnection(Connection):
    """A connection given directly by its coordinate coefficient array."""

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    valid: Callable[[np.ndarray], bool] | None = None

    def _coefficients(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        return np.asarray(self.func(as_point(point, self.dim)), dtype=np.float64)


@dataclass(frozen=True)
class DeformedConnection(Connection):
    """``gamma_a(b) = h^-1((a . d h)(b) + Omega(a) x_eta h(b))`` for a rotation field ``Omega``.

    ``rotation(xi)`` returns the biform coefficients of ``Omega(beta_alpha)`` row by row.
    """

    distortion: DistortionField
    rotation_field: Callable[[np.ndarray], np.ndarray]

    @property
    def dim(self) -> int:
        return self.distortion.dim

    @property
    def valid(self):
        return self.distortion.valid

    def _coefficients(self, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
        p = as_point(point, self.dim)
        h = np.asarray(self.distortion.func(p), dtype=np.float64)
        hinv = _inverse(h, "distortion")
        dh = partials(self.distortion.func, p, fd)
        eta = self.distortion.eta_matrix()
        omega = np.asarray(self.rotation_field(p), dtype=np.float64)
        return np.array([hinv @ (dh[m] + _biform_matrix(omega[m], self.dim) @ eta @ h) for m in range(self.dim)])


def levi_civita_connection(g: MetricField) -> LeviCivitaConnection:
    return LeviCivitaConnection(g)


# covariant derivatives -------------------------------------------------------


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def cov_deriv(conn: Connection, X, a, point, variant: str = "plus", fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``D_a X = a . d X + Gamma_a(X)`` or ``D^-_a X = a . d X - Gamma_a^dagger(X)``."""
    _check_variant(variant)
    p = as_point(point, conn.dim)
    value = _raw(X)(p)
    gen = conn.generalized(vector_field(a)(p), p, fd)
    flat = field_dir_derivative(X, a, p, fd)
    if variant == "plus":
        return flat + apply(gen, value)
    return flat - apply(adjoint(gen), value)


def _extensor_value(value) -> Extensor:
    if isinstance(value, MetricExtensor):
        return value.base
    if isinstance(value, Extensor):
        return value
    return Extensor.from_matrix(np.asarray(value, dtype=np.float64))


def cov_deriv_extensor(conn: Connection, t, a, point, variant: str = "plus", fd: FDConfig = DEFAULT_FD) -> Extensor:
    """Covariant derivative of an extensor field, Leibniz-compatible with ``cov_deriv``.

    ``(D_a t)(X) = D_a t(X) - t(D^-_a X)`` and the mirrored rule for ``D^-``.
    """
    _check_variant(variant)
    p = as_point(point, conn.dim)
    raw = _raw(t)
    value = _extensor_value(raw(p))
    flat = _along(lambda q: _extensor_value(raw(q)), p, vector_field(a)(p), fd)
    gen = conn.generalized(vector_field(a)(p), p, fd)
    gen_adj = adjoint(gen)
    outer, inner = (gen, gen_adj) if variant == "plus" else (gen_adj, gen)
    sign = 1.0 if variant == "plus" else -1.0

    def action(x: Multiform) -> Multiform:
        return apply(flat, x) + (apply(outer, apply(value, x)) + apply(value, apply(inner, x))) * sign

    return Extensor.from_function(value.algebra, value.domain, value.codomain, action)


# Christoffel operators --------------------------------------------------------


def christoffel_first(g: MetricField, a, b, c, point, fd: FDConfig = DEFAULT_FD) -> float:
    """The first Christoffel operator ``[a, b, c]`` for 1-form fields ``a, b, c``."""
    p = as_point(point, g.dim)
    g.check(p)
    metric = g.func
    fa, fb, fc = vector_field(a), vector_field(b), vector_field(c)
    ca, cb, cc = _is_constant(a), _is_constant(b), _is_constant(c)
    av, bv, cv = fa(p), fb(p), fc(p)
    gm = np.asarray(metric(p), dtype=np.float64)
    _inverse(gm)

    def paired(u, v):
        return lambda q: float(u(q) @ np.asarray(metric(q)) @ v(q))

    derivs = _along(paired(fb, fc), p, av, fd) + _along(paired(fc, fa), p, bv, fd) - _along(paired(fa, fb), p, cv, fd)
    brackets = (
        cv @ gm @ _bracket(fa, fb, p, fd, (ca, cb))
        + bv @ gm @ _bracket(fc, fa, p, fd, (cc, ca))
        - av @ gm @ _bracket(fb, fc, p, fd, (cb, cc))
    )
    return 0.5 * float(derivs + brackets)


def christoffel_second(g: MetricField, a, b, c, point, fd: FDConfig = DEFAULT_FD) -> float:
    """``{c; a, b} = [a, b, g^-1(c)]``."""
    fc = vector_field(c)
    metric = g.func
    raised = lambda q: _inverse(np.asarray(metric(q), dtype=np.float64)) @ fc(q)
    return christoffel_first(g, a, b, raised, point, fd)


# torsion and nonmetricity ---------------------------------------------------


def torsion(conn: Connection, a, b, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``tau(a, b) = gamma_a(b) - gamma_b(a)``."""
    return conn.gamma(a, b, point, fd) - conn.gamma(b, a, point, fd)


def torsion_components(conn: Connection, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """``T[s, mu, nu]``: component ``s`` of ``tau(beta_mu, beta_nu)``."""
    c = conn.coefficients(as_point(point, conn.dim), fd)
    return np.einsum("msn->smn", c) - np.einsum("nsm->smn", c)


def torsion_extensor(conn: Connection, B: Multiform, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``T(B) = (1/2) B.(d_a ^ d_b) tau(a, b)``."""
    t = torsion_components(conn, point, fd)
    iu = np.triu_indices(conn.dim, 1)
    return Multiform.vector(conn.algebra, np.einsum("k,sk->s", B.grade_values(2), t[:, iu[0], iu[1]]))


def nonmetricity_components(conn: Connection, g: MetricField, point, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """``Q[a, b, c] = (D^-_{beta_a} g)(beta_b) . beta_c``."""
    p = as_point(point, conn.dim)
    gm = g.matrix(p)
    dg = g.derivatives(p, fd)
    coeffs = conn.coefficients(p, fd)
    lowered = np.einsum("sc,asb->abc", gm, coeffs)
    return dg - lowered - lowered.transpose(0, 2, 1)


def nonmetricity(conn: Connection, g: MetricField, a, b, c, point, fd: FDConfig = DEFAULT_FD) -> float:
    p = as_point(point, conn.dim)
    q = nonmetricity_components(conn, g, p, fd)
    return float(np.einsum("abc,a,b,c->", q, vector_field(a)(p), vector_field(b)(p), vector_field(c)(p)))


# curvature ------------------------------------------------------------------


def _is_constant(obj) -> bool:
    return not (isinstance(obj, Field) or (callable(obj) and not isinstance(obj, (Multiform, Extensor))))


def _cov_vector(conn: Connection, a_func, c_func, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    av = a_func(q)
    return _along(c_func, q, av, fd) + np.einsum("m,msn,n->s", av, conn.coefficients(q, fd), c_func(q))


def curvature_operator(conn: Connection, a, b, c, point, fd: FDConfig = DEFAULT_FD, method: str | None = None) -> Multiform:
    """``rho(a, b, c) = [D_a, D_b] c - D_[a,b] c``.

    Constant arguments use the connection jet; field arguments (or
    ``method="nested"``) use nested finite differences of the definition.
    """
    p = as_point(point, conn.dim)
    conn.check(p)
    if method is None:
        method = "jet" if all(_is_constant(v) for v in (a, b, c)) else "nested"
    fa, fb, fc = vector_field(a), vector_field(b), vector_field(c)
    if method == "jet":
        m = conn.jet(p, fd).curvature_matrices()
        value = np.einsum("a,b,absn,n->s", fa(p), fb(p), m, fc(p))
    elif method == "nested":
        outer = fd.outer()
        db_c = lambda q: _cov_vector(conn, fb, fc, q, fd)
        da_c = lambda q: _cov_vector(conn, fa, fc, q, fd)
        gamma_a = conn.matrix(fa(p), p, fd)
        gamma_b = conn.matrix(fb(p), p, fd)
        first = _along(db_c, p, fa(p), outer) + gamma_a @ db_c(p)
        second = _along(da_c, p, fb(p), outer) + gamma_b @ da_c(p)
        bracket = _bracket(fa, fb, p, fd)
        value = first - second - _cov_vector(conn, lambda _q: bracket, fc, p, fd)
    else:
        raise ValueError(f"unknown curvature method {method!r}")
    return Multiform.vector(conn.algebra, value)


@dataclass(frozen=True)
class CurvatureAtPoint:
    """All curvature tensors of a connection and metric at one point.

    ``operator[a, b]`` is the matrix of ``c -> rho(beta_a, beta_b, c)`` and
    ``metric`` the covariant metric matrix.
    """

    operator: np.ndarray
    metric: np.ndarray

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    @cached_property
    def inverse_metric(self) -> np.ndarray:
        return _inverse(self.metric)

    @cached_property
    def riemann_array(self) -> np.ndarray:
        """``R3[a, b, c, w] = -rho(a, b, c) . g(w)``."""
        return -np.einsum("absc,sw->abcw", self.operator, self.metric)

    def rho(self, a, b, c) -> np.ndarray:
        return np.einsum("a,b,absn,n->s", a, b, self.operator, c)

    def riemann4(self, a, b, c, w) -> float:
        return float(np.einsum("abcw,a,b,c,w->", self.riemann_array, a, b, c, w))

    def curvature4(self, w, a, b, c) -> float:
        """``R1(w, a, b, c) = w . rho(b, c, a)``."""
        return float(w @ self.rho(b, c, a))

    @cached_property
    def riemann22_matrix(self) -> np.ndarray:
        """Row ``(k, l)``, column ``(i, j)``: ``R2(beta_i ^ beta_j) . (beta_k ^ beta_l)``."""
        iu = np.triu_indices(self.dim, 1)
        r3 = self.riemann_array
        return r3[iu[0], iu[1]][:, iu[0], iu[1]].T

    @cached_property
    def ricci_matrix(self) -> np.ndarray:
        """Column ``nu`` holds ``R1(beta_nu) = g^-1(d_a) _| R2(a ^ beta_nu)``."""
        return np.einsum("mr,mnrl->ln", self.inverse_metric, self.riemann_array)

    @cached_property
    def ricci_trace_matrix(self) -> np.ndarray:
        """The same extensor from ``R1(b) . c = beta^mu . rho(beta_mu, b, c)``."""
        return np.einsum("mbmc->cb", self.operator)

    @cached_property
    def scalar(self) -> float:
        return float(np.einsum("nl,ln->", self.inverse_metric, self.ricci_matrix))

    @cached_property
    def einstein_matrix(self) -> np.ndarray:
        return self.ricci_matrix - 0.5 * self.metric * self.scalar

    @cached_property
    def kretschmann(self) -> float:
        """Full contraction of the Riemann array with itself through the inverse metric.

        Unlike the Frobenius norm of ``riemann22_matrix`` this does not
        depend on the chart.
        """
        gi = self.inverse_metric
        raised = np.einsum("abcw,ai,bj,ck,wl->ijkl", self.riemann_array, gi, gi, gi, gi)
        return float(np.einsum("abcw,abcw->", self.riemann_array, raised))


def curvature_at(conn: Connection, g: MetricField, point, fd: FDConfig = DEFAULT_FD) -> CurvatureAtPoint:
    p = as_point(point, conn.dim)
    return CurvatureAtPoint(conn.jet(p, fd).curvature_matrices(), g.matrix(p))


def riemann4(conn: Connection, g: MetricField, a, b, c, w, point, fd: FDConfig = DEFAULT_FD) -> float:
    p = as_point(point, conn.dim)
    rho = curvature_operator(conn, a, b, c, p, fd).vector_part()
    return float(-rho @ g.matrix(p) @ vector_field(w)(p))


def curvature4(conn: Connection, w, a, b, c, point, fd: FDConfig = DEFAULT_FD) -> float:
    p = as_point(point, conn.dim)
    return float(vector_field(w)(p) @ curvature_operator(conn, b, c, a, p, fd).vector_part())


def riemann22_extensor(conn: Connection, g: MetricField, point, fd: FDConfig = DEFAULT_FD) -> Extensor:
    alg = conn.algebra
    return Extensor(alg, (2,), (2,), {(2, 2): curvature_at(conn, g, point, fd).riemann22_matrix})


def riemann22(conn: Connection, g: MetricField, B: Multiform, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    return apply(riemann22_extensor(conn, g, point, fd), B)


def ricci(conn: Connection, g: MetricField, b, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    p = as_point(point, conn.dim)
    return Multiform.vector(conn.algebra, curvature_at(conn, g, p, fd).ricci_matrix @ vector_field(b)(p))


def scalar_curvature(conn: Connection, g: MetricField, point, fd: FDConfig = DEFAULT_FD) -> float:
    return curvature_at(conn, g, point, fd).scalar


def einstein(conn: Connection, g: MetricField, a, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    p = as_point(point, conn.dim)
    return Multiform.vector(conn.algebra, curvature_at(conn, g, p, fd).einstein_matrix @ vector_field(a)(p))


# gauge rotation fields -------------------------------------------------------


def _eta_matrix(dim: int, eta=None) -> np.ndarray:
    return eta_standard(dim).matrix if eta is None else np.asarray(eta, dtype=np.float64)


def _wedge_sum(kernel: np.ndarray, up: np.ndarray) -> np.ndarray:
    """Biform coefficients of ``sum_{mu,nu} K[mu,nu] u_mu ^ u_nu`` for columns ``u`` of ``up``."""
    return _bif_coefficients(up @ kernel @ up.T)


def gauge_rotation_small(g: MetricField, a, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``omega(a) = -(1/2) g^-1(d_b ^ d_c) A(a, b, c)`` of the Levi-Civita connection."""
    p = as_point(point, g.dim)
    av = vector_field(a)(p)
    ginv = g.inverse_matrix(p)
    dg = g.derivatives(p, fd)
    kernel = np.einsum("s,bsc->bc", av, dg)
    kernel = 0.5 * (kernel - kernel.T)
    return _biform(algebra(g.dim), -0.5 * _wedge_sum(kernel, ginv))


def rotation_part(conn: Connection, g: MetricField, a, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``omega(a)`` read off a metric-compatible connection.

    The part of ``gamma_a`` left after removing ``(1/2) g^-1 (a . d g)`` is
    ``b -> omega(a) x g(b)``.
    """
    p = as_point(point, conn.dim)
    av = vector_field(a)(p)
    ginv = g.inverse_matrix(p)
    stretch = 0.5 * ginv @ np.einsum("a,amn->mn", av, g.derivatives(p, fd))
    rest = conn.matrix(av, p, fd) - stretch
    return _biform(conn.algebra, 0.5 * _bif_coefficients(rest @ ginv))


def _memoized(func, limit: int = 4096):
    """Cache an array function of a point; finite-difference stencils revisit points often."""
    cache: dict[bytes, np.ndarray] = {}

    def wrapped(q):
        key = np.asarray(q, dtype=np.float64).tobytes()
        if key not in cache:
            if len(cache) >= limit:
                cache.clear()
            cache[key] = func(q)
        return cache[key]

    return wrapped


def _big_rotation_christoffel(h: DistortionField, p: np.ndarray, fd: FDConfig) -> np.ndarray:
    n = h.dim
    g = h.metric()
    g = MetricField(_memoized(g.func), g.dim, g.valid)
    eta = h.eta_matrix()
    inverse_at = _memoized(lambda q: _inverse(np.asarray(h.func(q), dtype=np.float64), "distortion"))
    hinv_cols = [lambda q, j=j: inverse_at(q)[:, j] for j in range(n)]
    eye = np.eye(n)
    rows = []
    for alpha in range(n):
        kernel = np.zeros((n, n))
        for mu in range(n):
            for nu in range(n):
                if mu != nu:
                    kernel[mu, nu] = christoffel_first(g, eye[alpha], hinv_cols[mu], hinv_cols[nu], p, fd)
        rows.append(-0.5 * _wedge_sum(kernel, np.linalg.inv(eta)))
    return np.array(rows)


def _big_rotation_deformation(h: DistortionField, p: np.ndarray, fd: FDConfig) -> np.ndarray:
    hm = h.matrix(p)
    hinv = _inverse(hm, "distortion")
    eta = h.eta_matrix()
    dhinv = partials(lambda q: np.linalg.inv(np.asarray(h.func(q), dtype=np.float64)), p, fd)
    coeffs = LeviCivitaConnection(h.metric()).coefficients(p, fd)
    return np.array([0.5 * _bif_coefficients((hm @ dhinv[m] + hm @ coeffs[m] @ hinv) @ np.linalg.inv(eta)) for m in range(h.dim)])


def big_rotation_table(h: DistortionField, point, fd: FDConfig = DEFAULT_FD, route: str = "christoffel") -> np.ndarray:
    """Biform coefficients of ``Omega(beta_alpha)`` for every ``alpha``.

    ``route="christoffel"`` evaluates the Christoffel-operator formula;
    ``route="deformation"`` reads ``Omega`` off ``Omega(a) x_eta v = h(D_a h^-1 v) - a . d v``.
    """
    p = as_point(point, h.dim)
    h.check(p)
    if route == "christoffel":
        return _big_rotation_christoffel(h, p, fd)
    if route == "deformation":
        return _big_rotation_deformation(h, p, fd)
    raise ValueError(f"unknown route {route!r}")


def gauge_rotation_big(h: DistortionField, a, point, fd: FDConfig = DEFAULT_FD, route: str = "christoffel") -> Multiform:
    """``Omega(a) = -(1/2) eta^-1(d_b ^ d_c) [a, h^-1(b), h^-1(c)]``."""
    p = as_point(point, h.dim)
    table = big_rotation_table(h, p, fd, route)
    return _biform(algebra(h.dim), vector_field(a)(p) @ table)


def deformed_derivative(h: DistortionField, rotation: Multiform, b, a, point, fd: FDConfig = DEFAULT_FD, variant: str = "plus") -> Multiform:
    """``calD_a b = a . d b + Omega(a) x_eta b`` or ``calD^-_a b = a . d b + eta(Omega(a) x b)``."""
    _check_variant(variant)
    p = as_point(point, h.dim)
    eta = h.eta_matrix()
    rot = _biform_matrix(rotation.grade_values(2), h.dim)
    value = vector_field(b)(p)
    flat = _along(vector_field(b), p, vector_field(a)(p), fd)
    turn = rot @ eta @ value if variant == "plus" else eta @ rot @ value
    return Multiform.vector(algebra(h.dim), flat + turn)


def coupling_field(h: DistortionField, a, point, fd: FDConfig = DEFAULT_FD) -> Extensor:
    """``f_a = (a . d h) h^-1 - (1/2) eta h^clubs (a . d g) h^-1``."""
    p = as_point(point, h.dim)
    av = vector_field(a)(p)
    hm = h.matrix(p)
    hinv = _inverse(hm, "distortion")
    eta = h.eta_matrix()
    dh = np.einsum("a,amn->mn", av, partials(h.func, p, fd))
    dg = np.einsum("a,amn->mn", av, h.metric().derivatives(p, fd))
    return Extensor.from_matrix(dh @ hinv - 0.5 * eta @ hinv.T @ dg @ hinv, algebra(h.dim))


def eta_adjoint(t: Extensor, eta=None) -> Extensor:
    """``t^dagger(eta) = eta t^dagger eta^-1``."""
    e = _eta_matrix(t.dim, eta)
    return Extensor.from_matrix(e @ t.block(1, 1).T @ np.linalg.inv(e), t.algebra)


def eta_biform(t: Extensor, eta=None) -> Multiform:
    """``bif_eta[t] = bif[t eta^-1]``, so that ``t(b) = (1/2) bif_eta[t] x_eta b`` for eta-antisymmetric ``t``."""
    e = _eta_matrix(t.dim, eta)
    return _biform(t.algebra, _bif_coefficients(t.block(1, 1) @ np.linalg.inv(e)))


@dataclass(frozen=True)
class GaugeCurvature:
    """The gauge Riemann, Ricci, scalar and Einstein fields at a point."""

    riemann: Extensor
    ricci: Extensor
    scalar: float
    einstein: Extensor


def gauge_curvature(h: DistortionField, point, fd: FDConfig = DEFAULT_FD, route: str = "christoffel", rotation=None) -> GaugeCurvature:
    """Curvature of ``Omega`` through the structure formula.

    ``rotation``, when given, replaces ``Omega`` by a field returning its
    biform table; otherwise ``Omega`` comes from ``big_rotation_table``.
    """
    p = as_point(point, h.dim)
    h.check(p)
    n = h.dim
    alg = algebra(n)
    eta = MetricExtensor.from_matrix(h.eta_matrix())
    table_of = rotation if rotation is not None else (lambda q: big_rotation_table(h, q, fd, route))
    table = np.asarray(table_of(p))
    dtable = partials(table_of, p, fd.outer())
    iu = np.triu_indices(n, 1)
    rot = [_biform(alg, table[m]) for m in range(n)]
    columns = []
    for i, j in zip(*iu):
        value = dtable[i, j] - dtable[j, i] + metric_commutator(eta, rot[i], rot[j]).grade_values(2)
        columns.append(value)
    riemann = np.array(columns).T
    full = np.zeros((n, n, riemann.shape[0]))
    full[iu[0], iu[1]] = riemann.T
    full[iu[1], iu[0]] = -riemann.T
    clubs = _inverse(h.matrix(p), "distortion").T
    ricci_cols = []
    for nu in range(n):
        acc = Multiform.zero(alg)
        for mu in range(n):
            acc = acc + left_contract(Multiform.vector(alg, clubs[:, mu]), _biform(alg, full[mu, nu]))
        ricci_cols.append(acc.vector_part())
    ricci_m = np.array(ricci_cols).T
    scalar = float(np.einsum("ln,ln->", clubs, ricci_m))
    einstein_m = ricci_m - 0.5 * h.matrix(p) * scalar
    return GaugeCurvature(
        Extensor(alg, (2,), (2,), {(2, 2): riemann}),
        Extensor.from_matrix(ricci_m, alg),
        scalar,
        Extensor.from_matrix(einstein_m, alg),
    )


# Levi-Civita differential operators -------------------------------------------


def lc_differential(g: MetricField, X, point, kind: str = "grad", fd: FDConfig = DEFAULT_FD) -> Multiform:
    """Gradient, divergence or rotational ``sum_mu beta^mu (*) D^-_{beta_mu} X``.

    Products take the inverse metric, matching the coordinate divergence
    of ``g^-1(X)``.
    """
    if kind not in DIFFERENTIAL_KINDS:
        raise ValueError(f"kind must be one of {DIFFERENTIAL_KINDS}, got {kind!r}")
    p = as_point(point, g.dim)
    alg = algebra(g.dim)
    conn = LeviCivitaConnection(g)
    ginv = g.at(p).inverse
    out = Multiform.zero(alg)
    for mu in range(g.dim):
        up = Multiform.basis_vector(alg, mu + 1)
        term = cov_deriv(conn, X, up, p, "minus", fd)
        if kind == "grad":
            out = out + metric_clifford(ginv, up, term)
        elif kind == "div":
            out = out + metric_left_contract(ginv, up, term)
        else:
            out = out + wedge(up, term)
    return out


def lc_divergence_formula(g: MetricField, X, point, fd: FDConfig = DEFAULT_FD) -> Multiform:
    """``|det g|^-1/2 g(d _| |det g|^1/2 g^-1(X))`` with extended ``g``."""
    p = as_point(point, g.dim)
    alg = algebra(g.dim)
    raw = _raw(X)

    def weighted(q):
        metric = MetricExtensor.from_matrix(g.func(q))
        return metric.inverse.ext(raw(q)) * metric.volume_factor

    out = Multiform.zero(alg)
    for mu in range(g.dim):
        up = Multiform.basis_vector(alg, mu + 1)
        out = out + left_contract(up, field_dir_derivative(weighted, up, p, fd))
    metric = g.at(p)
    return metric.ext(out) / metric.volume_factor
