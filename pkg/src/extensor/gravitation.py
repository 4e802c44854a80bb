"""Gravitational potentials and the exterior-calculus description of gravitation.

Forms live in the chart coordinate coframe ``beta^mu = dx^mu`` of a
four-dimensional geometry.  The potentials are the 1-forms
``g^alpha = h^dagger(theta^alpha)``: their components are the rows of the
distortion matrix ``h``.  Hodge stars, contractions and Clifford products
use the metric ``g = h^T eta h`` of the distortion.

Every quantity is evaluated pointwise.  Internally forms are coefficient
arrays whose last axis runs over the 16 blades; public functions return
:class:`~extensor.algebra.Multiform` values.  Nested exterior derivatives
take ``fd`` for the innermost level and ``fd.outer()`` for each further
level.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .algebra import Algebra, Multiform, algebra
from .calculus import DEFAULT_FD, FDConfig
from .errors import ChartError, ConfigError, DimensionError
from .extensors import apply
from .fields import (
    DistortionField,
    LeviCivitaConnection,
    _memoized,
    as_point,
    cov_deriv,
    curvature_at,
    partials,
    riemann22_extensor,
)
from .metric import HodgeStar, MetricExtensor, metric_clifford

GRAVITY_DIM = 4
MIN_QUADRATURE_ORDER = 4
ORTHONORMALITY_TOL = 1e-10


# coefficient-array algebra ----------------------------------------------------


class _Tables:
    """Product tensors of the four-dimensional algebra as plain arrays."""

    def __init__(self, alg: Algebra):
        self.alg = alg
        self.wedge = np.asarray(alg.product_tensor("wedge"))
        self.left = np.asarray(alg.product_tensor("left"))
        unit = [1 << m for m in range(alg.dim)]
        # d F = sum_mu beta^mu ^ d_mu F uses the wedge by each coordinate 1-form
        self.coframe_wedge = np.stack([self.wedge[:, b, :] for b in unit])
        self.coframe_left = np.stack([self.left[:, b, :] for b in unit])
        self.unit = np.array(unit)
        self.grades = np.asarray(alg.grades)

        self.blade_factors = {
            k: np.array([[i for i in range(alg.dim) if b >> i & 1] for b in alg.blades_of_grade(k)], dtype=int)
            for k in range(1, alg.dim + 1)
        }
        self.reversion = np.where((self.grades * (self.grades - 1) // 2) % 2, -1.0, 1.0)
        self.into_volume = self.left[:, :, alg.size - 1]

    def extension_matrix(self, matrix: np.ndarray) -> np.ndarray:
        """Blade-ordered matrix of the extension of a (1,1) map, entries are minors."""
        out = np.zeros((self.alg.size, self.alg.size))
        out[0, 0] = 1.0
        for k in range(1, self.alg.dim + 1):
            blades = self.alg.blades_of_grade(k)
            factors = self.blade_factors[k]
            sub = matrix[factors[:, None, :, None], factors[None, :, None, :]]
            out[np.ix_(blades, blades)] = np.linalg.det(sub)
        return out

    def star_matrix(self, g: np.ndarray, ginv: np.ndarray) -> np.ndarray:
        """``X -> g^-1(reverse X) _| tau_g`` as a blade-ordered matrix."""
        scale = np.sqrt(abs(np.linalg.det(g)))
        return scale * (self.into_volume @ self.extension_matrix(ginv)) * self.reversion[None, :]

    def one_forms(self, components: np.ndarray) -> np.ndarray:
        components = np.asarray(components, dtype=np.float64)
        out = np.zeros(components.shape[:-1] + (self.alg.size,))
        out[..., self.unit] = components
        return out

    def wedge_(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("kij,...i,...j->...k", self.wedge, x, y)

    def contract(self, vector: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Left contraction of ``x`` by the 1-form with canonical components ``vector``."""
        return np.einsum("mkj,...m,...j->...k", self.coframe_left, vector, x)

    def grade_sign(self, x: np.ndarray) -> np.ndarray:
        return x * np.where(self.grades % 2, -1.0, 1.0)


_TABLES = _Tables(algebra(GRAVITY_DIM))


def _as_multiforms(arr: np.ndarray):
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return Multiform(_TABLES.alg, arr)
    return [_as_multiforms(a) for a in arr]


def _as_array(value) -> np.ndarray:
    if isinstance(value, Multiform):
        return value.coeffs
    if isinstance(value, (list, tuple)):
        return np.stack([_as_array(v) for v in value])
    return np.asarray(value, dtype=np.float64)


# form fields ---------------------------------------------------------------------


@dataclass(frozen=True)
class FormField:
    """A homogeneous form field of fixed degree over a four-dimensional chart."""

    degree: int
    func: Callable[[np.ndarray], Multiform]
    dim: int = GRAVITY_DIM

    def __call__(self, point) -> Multiform:
        value = self.func(as_point(point, self.dim))
        if not value.is_homogeneous(self.degree, tol=1e-9 * max(1.0, value.norm())):
            raise ValueError(f"form field of degree {self.degree} produced grades {sorted(value.grades_present(1e-12))}")
        return value


def _array_function(F) -> Callable[[np.ndarray], np.ndarray]:
    func = F.func if isinstance(F, FormField) else F
    return lambda q: _as_array(func(q))


def _d(func: Callable[[np.ndarray], np.ndarray], q: np.ndarray, fd: FDConfig) -> np.ndarray:
    return np.einsum("mkj,m...j->...k", _TABLES.coframe_wedge, partials(func, q, fd))


def exterior_derivative(F, point, fd: FDConfig = DEFAULT_FD):
    """``dF = sum_mu beta^mu ^ d_mu F`` by finite differences of the coefficients.

    ``F`` is a :class:`FormField` or a callable returning a multiform or a
    (nested) list of multiforms; the result has the same shape.
    """
    q = as_point(point, GRAVITY_DIM)
    return _as_multiforms(_d(_array_function(F), q, fd))


# gravity configuration -----------------------------------------------------------


@dataclass(frozen=True)
class GravityConfig:
    """Graviton mass, cosmological constant and an optional algebraic matter field.

    ``matter`` maps a point to the matrix of the energy-momentum extensor
    ``T`` acting on 1-form components; ``None`` means vacuum.
    """

    graviton_mass_sq: float = 0.0
    cosmological_const: float = 0.0
    matter: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not np.isfinite(self.graviton_mass_sq) or self.graviton_mass_sq < 0:
            raise ConfigError(f"graviton mass squared must be a non-negative number, got {self.graviton_mass_sq}")
        if not np.isfinite(self.cosmological_const):
            raise ConfigError("cosmological constant must be finite")

    def matter_matrix(self, q: np.ndarray) -> np.ndarray:
        if self.matter is None:
            return np.zeros((GRAVITY_DIM, GRAVITY_DIM))
        return np.asarray(self.matter(q), dtype=np.float64)


VACUUM = GravityConfig()


# potentials --------------------------------------------------------------------


@dataclass(frozen=True)
class _Local:
    """Pointwise data: potentials, metric and Hodge star."""

    h: np.ndarray
    eta: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    star: np.ndarray
    star_inv: np.ndarray

    @cached_property
    def up(self) -> np.ndarray:
        return _TABLES.one_forms(self.h)

    @cached_property
    def down(self) -> np.ndarray:
        return _TABLES.one_forms(self.eta @ self.h)

    @cached_property
    def raised(self) -> np.ndarray:
        """``g^-1`` applied to each upper potential, used by the metric contraction."""
        return self.h @ self.ginv.T

    @cached_property
    def raised_down(self) -> np.ndarray:
        return self.eta @ self.raised

    def hodge(self, x: np.ndarray) -> np.ndarray:
        return x @ self.star.T

    def hodge_inv(self, x: np.ndarray) -> np.ndarray:
        return x @ self.star_inv.T

    def contract(self, covector: np.ndarray, x: np.ndarray) -> np.ndarray:
        """``a _|_g X``: contraction through the inverse metric."""
        return _TABLES.contract(covector @ self.ginv.T, x)


class PotentialFrame:
    """The potentials ``g^alpha`` of a distortion field on a four-dimensional chart.

    ``upper(point)`` holds the components of ``g^alpha`` as rows and
    ``lower(point)`` those of ``g_alpha = eta_{alpha beta} g^beta``; the dual
    vectors ``e_alpha`` are the columns of ``h^-1``.
    """

    labels = ("g^0", "g^1", "g^2", "g^3")

    def __init__(self, distortion: DistortionField, coords: tuple[str, ...] | None = None):
        if distortion.dim != GRAVITY_DIM:
            raise DimensionError(f"gravitation needs a {GRAVITY_DIM}-dimensional chart, got n = {distortion.dim}")
        self.distortion = distortion
        self.coords = coords
        self.eta = distortion.eta_matrix()
        self.eta_inv = np.linalg.inv(self.eta)
        self.metric = distortion.metric()
        self._h = _memoized(lambda q: np.asarray(distortion.func(q), dtype=np.float64))
        self._local_cache = _memoized(self._build_local)

    @property
    def dim(self) -> int:
        return GRAVITY_DIM

    def check(self, point) -> np.ndarray:
        q = as_point(point, GRAVITY_DIM)
        self.distortion.check(q)
        return q

    def _build_local(self, q: np.ndarray) -> _Local:
        h = self._h(q)
        g = h.T @ self.eta @ h
        g = 0.5 * (g + g.T)
        ginv = np.linalg.inv(g)
        matrix = _TABLES.star_matrix(g, ginv)
        return _Local(h, self.eta, g, ginv, matrix, np.linalg.inv(matrix))

    def local(self, q: np.ndarray) -> _Local:
        return self._local_cache(q)

    def upper(self, point) -> np.ndarray:
        return self._h(self.check(point)).copy()

    def lower(self, point) -> np.ndarray:
        return self.eta @ self.upper(point)

    def dual_vectors(self, point) -> np.ndarray:
        """Columns are the vectors ``e_alpha`` with ``g^beta(e_alpha) = delta``."""
        return np.linalg.inv(self.upper(point))

    def upper_forms(self, point) -> list[Multiform]:
        return _as_multiforms(_TABLES.one_forms(self.upper(point)))

    def lower_forms(self, point) -> list[Multiform]:
        return _as_multiforms(_TABLES.one_forms(self.lower(point)))

    def hodge(self, point) -> HodgeStar:
        return HodgeStar(MetricExtensor.from_matrix(self.local(self.check(point)).g))

    def orthonormality_residual(self, point) -> float:
        """``max |g^alpha ._{g^-1} g^beta - eta^{alpha beta}|``."""
        loc = self.local(self.check(point))
        return float(np.max(np.abs(loc.h @ loc.ginv @ loc.h.T - self.eta_inv)))


def potentials(h, eta=None, coords: tuple[str, ...] | None = None) -> PotentialFrame:
    """Potentials of a distortion field; a geometry spec contributes its distortion and coordinates."""
    if hasattr(h, "distortion") and hasattr(h, "coords"):
        if h.dim != GRAVITY_DIM:
            raise DimensionError(f"gravitation needs a {GRAVITY_DIM}-dimensional chart, got n = {h.dim}")
        if h.distortion is None:
            raise ConfigError(f"geometry {h.name!r} has no distortion field")
        return PotentialFrame(h.distortion, tuple(h.coords))
    if not isinstance(h, DistortionField):
        h = DistortionField(h, GRAVITY_DIM, None, eta)
    return PotentialFrame(h, coords)


# first-derivative quantities ------------------------------------------------------


def _dg(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``d g^alpha`` stacked over alpha."""
    return _d(lambda p: _TABLES.one_forms(frame._h(p)), q, fd)


def _codifferential(frame: PotentialFrame, func, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``(-1)^r star^-1 d star`` applied grade by grade."""

    def starred(p):
        return frame.local(p).hodge(_TABLES.grade_sign(func(p)))

    return frame.local(q).hodge_inv(_d(starred, q, fd))


def hodge_codifferential(frame: PotentialFrame, F, point, fd: FDConfig = DEFAULT_FD):
    """``delta A_r = (-1)^r star^-1 d star A_r`` with the star of the potentials' metric."""
    q = frame.check(point)
    return _as_multiforms(_codifferential(frame, _array_function(F), q, fd))


def _omega_upper(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``omega^{gamma delta}`` from the potentials and their exterior derivatives."""
    loc = frame.local(q)
    dg = _dg(frame, q, fd)
    dg_low = np.einsum("ab,bk->ak", frame.eta, dg)
    # first[d, c] = g^d _| d g^c
    first = np.stack([loc.contract(loc.h[d], dg) for d in range(4)])
    # inner[c, d, a] = g^c _| (g^d _| d g_a), a scalar
    inner = np.stack([[loc.contract(loc.h[c], loc.contract(loc.h[d], dg_low))[:, 0] for d in range(4)] for c in range(4)])
    packed = np.einsum("cda,ak->cdk", inner, loc.up)
    return 0.5 * (np.transpose(first, (1, 0, 2)) - first + packed)


def _omega_mixed(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``omega^alpha_beta = omega^{alpha gamma} eta_{gamma beta}``."""
    return np.einsum("agk,gb->abk", _omega_upper(frame, q, fd), frame.eta)


def _omega_lower(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    return np.einsum("ag,gdk,db->abk", frame.eta, _omega_upper(frame, q, fd), frame.eta)


def connection_one_forms(frame: PotentialFrame, point, fd: FDConfig = DEFAULT_FD) -> list[list[Multiform]]:
    """``omega^{gamma delta}`` indexed ``[gamma][delta]``."""
    return _as_multiforms(_omega_upper(frame, frame.check(point), fd))


@dataclass(frozen=True)
class CartanResiduals:
    first_structure: float
    antisymmetry: float


def cartan_residuals(frame: PotentialFrame, point, fd: FDConfig = DEFAULT_FD) -> CartanResiduals:
    """Residuals of ``d g^alpha + omega^alpha_beta ^ g^beta = 0`` and of ``omega^{gd} = -omega^{dg}``."""
    q = frame.check(point)
    loc = frame.local(q)
    upper = _omega_upper(frame, q, fd)
    mixed = np.einsum("agk,gb->abk", upper, frame.eta)
    first = _dg(frame, q, fd) + np.einsum("abk->ak", _TABLES.wedge_(mixed, loc.up[None, :, :]))
    antisym = upper + np.transpose(upper, (1, 0, 2))
    return CartanResiduals(float(np.max(np.abs(first))), float(np.max(np.abs(antisym))))


def _curvature_mixed(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``R^alpha_beta = d omega^alpha_beta + omega^alpha_gamma ^ omega^gamma_beta``."""
    mixed = _omega_mixed(frame, q, fd)
    d_omega = _d(lambda p: _omega_mixed(frame, p, fd), q, fd.outer())
    quadratic = np.einsum("agbk->abk", _TABLES.wedge_(mixed[:, :, None, :], mixed[None, :, :, :]))
    return d_omega + quadratic


def _curvature_lower(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    return np.einsum("ag,gbk->abk", frame.eta, _curvature_mixed(frame, q, fd))


def curvature_two_forms(frame: PotentialFrame, point, fd: FDConfig = DEFAULT_FD) -> list[list[Multiform]]:
    """``R^alpha_beta`` indexed ``[alpha][beta]`` from the second structure equation."""
    return _as_multiforms(_curvature_mixed(frame, frame.check(point), fd))


def curvature_from_riemann(frame: PotentialFrame, point, fd: FDConfig = DEFAULT_FD) -> list[list[Multiform]]:
    """``R_2(e_kappa ^ e_iota)`` from the Levi-Civita curvature of the metric, indexed ``[kappa][iota]``.

    The arguments are the dual vectors ``e_kappa = g^-1(g_kappa)``.
    """
    q = frame.check(point)
    loc = frame.local(q)
    conn = LeviCivitaConnection(frame.metric)
    r2 = riemann22_extensor(conn, frame.metric, q, fd)
    duals = _TABLES.one_forms(loc.raised_down)
    out = np.zeros((4, 4, 16))
    for k in range(4):
        for i in range(4):
            out[k, i] = apply(r2, Multiform(_TABLES.alg, _TABLES.wedge_(duals[k], duals[i]))).coeffs
    return _as_multiforms(out)


# Lagrangian densities ------------------------------------------------------------


def _wedge_star(loc: _Local, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``x ^ star y`` summed over any leading axes."""
    return np.sum(np.reshape(_TABLES.wedge_(x, loc.hodge(y)), (-1, 16)), axis=0)


def _vorticity(loc: _Local, dg: np.ndarray) -> np.ndarray:
    """``d g^alpha ^ g_alpha`` summed over alpha."""
    return np.sum(_TABLES.wedge_(dg, loc.down), axis=0)


def _lagrangian_g(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    loc = frame.local(q)
    dg = _dg(frame, q, fd)
    dg_low = frame.eta @ dg
    div = _codifferential(frame, lambda p: _TABLES.one_forms(frame._h(p)), q, fd)
    div_low = frame.eta @ div
    vort = _vorticity(loc, dg)
    return -0.5 * _wedge_star(loc, dg, dg_low) + 0.5 * _wedge_star(loc, div, div_low) + 0.25 * _wedge_star(loc, vort, vort)


def _lagrangian_g_alt(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    loc = frame.local(q)
    dg = _dg(frame, q, fd)
    dg_low = frame.eta @ dg
    left = _TABLES.wedge_(dg[:, None, :], loc.up[None, :, :])
    right = np.transpose(_TABLES.wedge_(dg_low[:, None, :], loc.down[None, :, :]), (1, 0, 2))
    vort = _vorticity(loc, dg)
    return -0.5 * _wedge_star(loc, left, right) + 0.25 * _wedge_star(loc, vort, vort)


def _exact_term(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``-d(g^alpha ^ star d g_alpha)``."""

    def inner(p):
        loc = frame.local(p)
        return _wedge_star(loc, loc.up, frame.eta @ _dg(frame, p, fd))

    return -_d(inner, q, fd.outer())


def _lagrangian_eh(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    loc = frame.local(q)
    pairs = _TABLES.wedge_(loc.up[:, None, :], loc.up[None, :, :])
    return 0.5 * _wedge_star(loc, pairs, _curvature_lower(frame, q, fd))


def _volume(scale: float) -> np.ndarray:
    out = np.zeros(_TABLES.alg.size)
    out[-1] = scale
    return out


def _lagrangian_h(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """The Minkowski-side density from ``h^club`` images and the ``eta^-1`` scalar product."""
    loc = frame.local(q)
    club = _TABLES.extension_matrix(np.linalg.inv(loc.h).T)
    eta_inv = _TABLES.extension_matrix(frame.eta_inv)
    dg = _dg(frame, q, fd)
    dg_low = frame.eta @ dg
    left = _TABLES.wedge_(dg[:, None, :], loc.up[None, :, :]) @ club.T
    right = np.transpose(_TABLES.wedge_(dg_low[:, None, :], loc.down[None, :, :]), (1, 0, 2)) @ club.T
    vort = _vorticity(loc, dg) @ club.T
    scalar = -0.5 * np.sum(left * (right @ eta_inv.T)) + 0.25 * float(vort @ eta_inv @ vort)
    return _volume(scalar * np.sqrt(abs(np.linalg.det(frame.eta))))


@dataclass(frozen=True)
class LagrangianDensities:
    einstein_hilbert: Multiform
    potential: Multiform
    potential_alt: Multiform
    exact_term: Multiform
    minkowski_side: Multiform
    minkowski_pullback: Multiform
    scalar_density: Multiform

    @property
    def identity_residual(self) -> float:
        """``L_eh - (L_g - d(g^alpha ^ star d g_alpha))``."""
        return (self.einstein_hilbert - self.exact_term - self.potential).norm()

    @property
    def alternative_residual(self) -> float:
        return (self.potential - self.potential_alt).norm()

    @property
    def minkowski_residual(self) -> float:
        return (self.minkowski_side - self.minkowski_pullback).norm()

    @property
    def scalar_residual(self) -> float:
        return (self.einstein_hilbert - self.scalar_density).norm()


def lagrangian_densities(frame: PotentialFrame, point, fd: FDConfig = DEFAULT_FD) -> LagrangianDensities:
    """Einstein-Hilbert and potential densities with their cross-check forms."""
    q = frame.check(point)
    loc = frame.local(q)
    conn = LeviCivitaConnection(frame.metric)
    scalar = curvature_at(conn, frame.metric, q, fd).scalar
    club_volume = 1.0 / np.linalg.det(loc.h)
    return LagrangianDensities(
        einstein_hilbert=Multiform(_TABLES.alg, _lagrangian_eh(frame, q, fd)),
        potential=Multiform(_TABLES.alg, _lagrangian_g(frame, q, fd)),
        potential_alt=Multiform(_TABLES.alg, _lagrangian_g_alt(frame, q, fd)),
        exact_term=Multiform(_TABLES.alg, _exact_term(frame, q, fd)),
        minkowski_side=Multiform(_TABLES.alg, _lagrangian_h(frame, q, fd)),
        minkowski_pullback=Multiform(_TABLES.alg, _lagrangian_g(frame, q, fd) * club_volume),
        scalar_density=Multiform(_TABLES.alg, _volume(0.5 * scalar * abs(np.linalg.det(loc.h)))),
    )


# superpotentials and energy-momentum ----------------------------------------------


def _superpotential_lower(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star S_kappa = -g_l ^ star(d g^l ^ g_kappa) + 1/2 g_kappa ^ star(d g^l ^ g_l)``."""
    loc = frame.local(q)
    dg = _dg(frame, q, fd)
    vort_star = loc.hodge(_vorticity(loc, dg))
    out = np.zeros((4, 16))
    for k in range(4):
        inner = loc.hodge(_TABLES.wedge_(dg, loc.down[k]))
        out[k] = -np.sum(_TABLES.wedge_(loc.down, inner), axis=0) + 0.5 * _TABLES.wedge_(loc.down[k], vort_star)
    return out


def _superpotential(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    return frame.eta_inv @ _superpotential_lower(frame, q, fd)


def _superpotential_packed(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star S^gamma = 1/2 omega_{ab} ^ star(g^a ^ g^b ^ g^gamma)``."""
    loc = frame.local(q)
    omega = _omega_lower(frame, q, fd)
    pairs = _TABLES.wedge_(loc.up[:, None, :], loc.up[None, :, :])
    out = np.zeros((4, 16))
    for c in range(4):
        triple = loc.hodge(_TABLES.wedge_(pairs, loc.up[c]))
        out[c] = 0.5 * np.sum(np.reshape(_TABLES.wedge_(omega, triple), (-1, 16)), axis=0)
    return out


def _codiff_potentials_lower(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star d star g_alpha``, the scalar codifferentials up to sign."""
    return frame.local(q).hodge(_d(lambda p: frame.local(p).hodge(_TABLES.one_forms(frame.eta @ frame._h(p))), q, fd))


def _k_part(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star K^kappa = -(g^kappa _| star g^a) ^ star d star g_a + 1/2 g^kappa ^ star(d g^a ^ g_a)``."""
    loc = frame.local(q)
    dg = _dg(frame, q, fd)
    vort_star = loc.hodge(_vorticity(loc, dg))
    codiff = _codiff_potentials_lower(frame, q, fd)
    star_up = loc.hodge(loc.up)
    out = np.zeros((4, 16))
    for k in range(4):
        contracted = loc.contract(loc.h[k], star_up)
        out[k] = -np.sum(_TABLES.wedge_(contracted, codiff), axis=0) + 0.5 * _TABLES.wedge_(loc.up[k], vort_star)
    return out


def _energy_momentum_lower(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star t_a = g_a _| L_g - (g_a _| d g^k) ^ star S_k`` without the mass term."""
    loc = frame.local(q)
    dg = _dg(frame, q, fd)
    lag = _lagrangian_g(frame, q, fd)
    sup = _superpotential_lower(frame, q, fd)
    out = np.zeros((4, 16))
    for a in range(4):
        low = frame.eta[a] @ loc.h
        out[a] = loc.contract(low, lag) - np.sum(_TABLES.wedge_(loc.contract(low, dg), sup), axis=0)
    return out


def _energy_momentum(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    return frame.eta_inv @ _energy_momentum_lower(frame, q, fd)


def _energy_momentum_packed(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star t^d = -1/2 omega_{ab} ^ [omega^d_r ^ star(g^a g^b g^r) + omega^b_r ^ star(g^a g^r g^d)]``."""
    loc = frame.local(q)
    lower = _omega_lower(frame, q, fd)
    mixed = _omega_mixed(frame, q, fd)
    up = loc.up
    triple = np.empty((4, 4, 4, 16))
    for a in range(4):
        for b in range(4):
            pair = _TABLES.wedge_(up[a], up[b])
            triple[a, b] = loc.hodge(_TABLES.wedge_(pair, up))
    out = np.zeros((4, 16))
    for d in range(4):
        total = np.zeros(16)
        for a in range(4):
            for b in range(4):
                bracket = np.sum(_TABLES.wedge_(mixed[d], triple[a, b]), axis=0)
                bracket = bracket + np.sum(_TABLES.wedge_(mixed[b], triple[a, :, d]), axis=0)
                total = total + _TABLES.wedge_(lower[a, b], bracket)
        out[d] = -0.5 * total
    return out


def _einstein_forms_lower(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star G_mu = -1/2 R_{ab} ^ star(g^a ^ g^b ^ g_mu)`` from the curvature 2-forms."""
    loc = frame.local(q)
    curv = _curvature_lower(frame, q, fd)
    pairs = _TABLES.wedge_(loc.up[:, None, :], loc.up[None, :, :])
    out = np.zeros((4, 16))
    for m in range(4):
        triple = loc.hodge(_TABLES.wedge_(pairs, loc.down[m]))
        out[m] = -0.5 * np.sum(np.reshape(_TABLES.wedge_(curv, triple), (-1, 16)), axis=0)
    return out


def _einstein_forms(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    return frame.eta_inv @ _einstein_forms_lower(frame, q, fd)


def _einstein_forms_tensor(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star G^alpha`` built from the Levi-Civita Einstein tensor applied to the dual vectors."""
    loc = frame.local(q)
    curv = curvature_at(LeviCivitaConnection(frame.metric), frame.metric, q, fd)
    einstein = curv.einstein_matrix
    ones = np.einsum("mn,an->am", einstein, loc.raised)
    return loc.hodge(_TABLES.one_forms(ones))


@dataclass(frozen=True)
class Superpotentials:
    raised: list[Multiform]
    lowered: list[Multiform]
    packed: list[Multiform]
    k_part: list[Multiform]
    star_dg: list[Multiform]

    @property
    def packed_residual(self) -> float:
        return float(np.max(np.abs(_as_array(self.raised) - _as_array(self.packed))))

    @property
    def split_residual(self) -> float:
        """``star S^k - (-star d g^k + star K^k)``."""
        return float(np.max(np.abs(_as_array(self.raised) + _as_array(self.star_dg) - _as_array(self.k_part))))

    @property
    def split_residual_printed_sign(self) -> float:
        """The same split with ``+star d g^k``; nonzero off Minkowski."""
        return float(np.max(np.abs(_as_array(self.raised) - _as_array(self.star_dg) - _as_array(self.k_part))))


def superpotential(frame: PotentialFrame, point, fd: FDConfig = DEFAULT_FD) -> Superpotentials:
    """Superpotential 2-forms ``star S^kappa`` with the packed and split forms."""
    q = frame.check(point)
    lowered = _superpotential_lower(frame, q, fd)
    return Superpotentials(
        raised=_as_multiforms(frame.eta_inv @ lowered),
        lowered=_as_multiforms(lowered),
        packed=_as_multiforms(_superpotential_packed(frame, q, fd)),
        k_part=_as_multiforms(_k_part(frame, q, fd)),
        star_dg=_as_multiforms(frame.local(q).hodge(_dg(frame, q, fd))),
    )


@dataclass(frozen=True)
class EnergyMomentum:
    total: list[Multiform]
    gravitational: list[Multiform]
    packed: list[Multiform]
    mass_term: list[Multiform]

    @property
    def packed_residual(self) -> float:
        return float(np.max(np.abs(_as_array(self.gravitational) - _as_array(self.packed))))


def energy_momentum(frame: PotentialFrame, config: GravityConfig = VACUUM, point=None, fd: FDConfig = DEFAULT_FD) -> EnergyMomentum:
    """Energy-momentum 3-forms ``star t^kappa`` plus the graviton-mass term ``m^2 star g^kappa``."""
    q = frame.check(point)
    grav = _energy_momentum(frame, q, fd)
    mass = config.graviton_mass_sq * frame.local(q).hodge(frame.local(q).up)
    return EnergyMomentum(
        total=_as_multiforms(grav + mass),
        gravitational=_as_multiforms(grav),
        packed=_as_multiforms(_energy_momentum_packed(frame, q, fd)),
        mass_term=_as_multiforms(mass),
    )


# conservation and field equations ------------------------------------------------


def _matter_forms(frame: PotentialFrame, config: GravityConfig, q: np.ndarray) -> np.ndarray:
    """``T^kappa = -T(g^-1 g^kappa)``, matching ``G(a) = -T(a)`` when ``lambda = 0``.

    ``config.matter`` returns covariant components, like the Einstein matrix.
    """
    loc = frame.local(q)
    return _TABLES.one_forms(-(loc.raised @ config.matter_matrix(q).T))


@dataclass(frozen=True)
class ConservationReport:
    einstein_forms: list[Multiform]
    einstein_forms_tensor: list[Multiform]
    superpotential_derivative: list[Multiform]
    energy_momentum: list[Multiform]
    residual: float
    einstein_route_residual: float
    field_equation_residual: float


def conservation_identity(frame: PotentialFrame, config: GravityConfig = VACUUM, point=None, fd: FDConfig = DEFAULT_FD) -> ConservationReport:
    """``d star S^a + star t^a + star G^a`` and the field-equation residual ``G(a) - lambda g(a) + T(a)``."""
    q = frame.check(point)
    d_sup = _d(lambda p: _superpotential(frame, p, fd), q, fd.outer())
    t = _energy_momentum(frame, q, fd)
    einstein_cartan = _einstein_forms(frame, q, fd)
    einstein_tensor = _einstein_forms_tensor(frame, q, fd)
    curv = curvature_at(LeviCivitaConnection(frame.metric), frame.metric, q, fd)
    loc = frame.local(q)
    field_eq = curv.einstein_matrix - config.cosmological_const * loc.g + config.matter_matrix(q)
    return ConservationReport(
        einstein_forms=_as_multiforms(einstein_cartan),
        einstein_forms_tensor=_as_multiforms(einstein_tensor),
        superpotential_derivative=_as_multiforms(d_sup),
        energy_momentum=_as_multiforms(t),
        residual=float(np.max(np.abs(d_sup + t + einstein_cartan))),
        einstein_route_residual=float(np.max(np.abs(einstein_cartan - einstein_tensor))),
        field_equation_residual=float(np.max(np.abs(field_eq))),
    )


# Maxwell-like split ----------------------------------------------------------------


def _star_sources(frame: PotentialFrame, config: GravityConfig, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star(t^k + T^k + delta K^k + m^2 g^k)``, the on-shell value of ``d star F^k``."""
    loc = frame.local(q)
    d_k = _d(lambda p: _k_part(frame, p, fd), q, fd.outer())
    matter = loc.hodge(_matter_forms(frame, config, q))
    mass = config.graviton_mass_sq * loc.hodge(loc.up)
    return _energy_momentum(frame, q, fd) + matter + d_k + mass


@dataclass(frozen=True)
class MaxwellSplit:
    field_strength: list[Multiform]
    closure_residual: float
    source_residual: float
    codifferential: list[Multiform]
    sources: list[Multiform]


def maxwell_split(frame: PotentialFrame, config: GravityConfig = VACUUM, point=None, fd: FDConfig = DEFAULT_FD) -> MaxwellSplit:
    """``F^k = d g^k`` with the residuals of ``d F^k = 0`` and ``delta F^k = t^k + T'^k + m^2 g^k``.

    ``T'^k = T^k + delta K^k`` folds the split-off part of the superpotential
    into the source.
    """
    q = frame.check(point)
    loc = frame.local(q)
    strength = _dg(frame, q, fd)
    closure = _d(lambda p: _dg(frame, p, fd), q, fd.outer())
    codiff = _codifferential(frame, lambda p: _dg(frame, p, fd), q, fd.outer())
    sources = loc.hodge_inv(_star_sources(frame, config, q, fd))
    return MaxwellSplit(
        field_strength=_as_multiforms(strength),
        closure_residual=float(np.max(np.abs(closure))),
        source_residual=float(np.max(np.abs(codiff - sources))),
        codifferential=_as_multiforms(codiff),
        sources=_as_multiforms(sources),
    )


# angular momentum ------------------------------------------------------------------


def _orbital_total(frame: PotentialFrame, config: GravityConfig, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star L_m^{ab} + star L_g^{ab}`` with ``star T^a`` from the sources."""
    loc = frame.local(q)
    total = _star_sources(frame, config, q, fd)
    star_f = loc.hodge(_dg(frame, q, fd))
    coframe = np.eye(16)[_TABLES.unit]
    matter = q[:, None, None] * total[None, :, :]
    field_part = _TABLES.wedge_(coframe[:, None, :], star_f[None, :, :])
    out = matter + field_part
    return out - np.transpose(out, (1, 0, 2))


def _spin(frame: PotentialFrame, q: np.ndarray, fd: FDConfig) -> np.ndarray:
    """``star S_g^{ki}``, the derivative of ``L_eh`` with respect to ``omega_{ki}``.

    This is half of ``omega^k_a ^ star(g^a ^ g^i) + omega^i_a ^ star(g^k ^ g^a)``.
    """
    loc = frame.local(q)
    mixed = _omega_mixed(frame, q, fd)
    pairs = loc.hodge(_TABLES.wedge_(loc.up[:, None, :], loc.up[None, :, :]))
    first = np.einsum("kaij->kij", _TABLES.wedge_(mixed[:, :, None, :], pairs[None, :, :, :]))
    second = np.einsum("iakj->kij", _TABLES.wedge_(mixed[:, :, None, :], pairs.transpose(1, 0, 2)[None, :, :, :]))
    return 0.5 * (first + second)


@dataclass(frozen=True)
class AngularMomentum:
    orbital_matter: list[list[Multiform]]
    orbital_field: list[list[Multiform]]
    spin_field: list[list[Multiform]]
    orbital_closure: float
    spin_closure: float
    spin_divergence: float
    total_divergence: float


def angular_momentum(frame: PotentialFrame, config: GravityConfig = VACUUM, point=None, fd: FDConfig = DEFAULT_FD) -> AngularMomentum:
    """Orbital and spin angular-momentum 3-forms in the chart coordinates and their closures.

    ``orbital_closure`` is ``max |d star L_t^{ab}|``; ``spin_closure`` is
    ``max |d star(g^k ^ g^i) + 2 star S_g^{ki}|`` and
    ``spin_divergence`` and ``total_divergence`` are reported values of
    ``d star S_g`` and ``d star J`` without an asserted outcome.
    """
    q = frame.check(point)
    loc = frame.local(q)
    total = _star_sources(frame, config, q, fd)
    matter = q[:, None, None] * total[None, :, :]
    matter = matter - np.transpose(matter, (1, 0, 2))
    coframe = np.eye(16)[_TABLES.unit]
    field_part = _TABLES.wedge_(coframe[:, None, :], loc.hodge(_dg(frame, q, fd))[None, :, :])
    field_part = field_part - np.transpose(field_part, (1, 0, 2))
    outer = fd.outer()
    d_orbital = _d(lambda p: _orbital_total(frame, config, p, fd), q, outer.outer())
    spin = _spin(frame, q, fd)
    d_pairs = _d(lambda p: frame.local(p).hodge(_TABLES.wedge_(frame.local(p).up[:, None, :], frame.local(p).up[None, :, :])), q, fd)
    d_spin = _d(lambda p: _spin(frame, p, fd), q, outer)
    return AngularMomentum(
        orbital_matter=_as_multiforms(matter),
        orbital_field=_as_multiforms(field_part),
        spin_field=_as_multiforms(spin),
        orbital_closure=float(np.max(np.abs(d_orbital))),
        spin_closure=float(np.max(np.abs(d_pairs + 2.0 * spin))),
        spin_divergence=float(np.max(np.abs(d_spin))),
        total_divergence=float(np.max(np.abs(d_orbital + d_spin))),
    )


# Dirac operator and the Ricci 1-forms -------------------------------------------------


@dataclass(frozen=True)
class RicciViaDirac:
    wedge_part: list[Multiform]
    dot_part: list[Multiform]
    laplacian: list[Multiform]
    ricci_forms: list[Multiform]

    @property
    def ricci_residual(self) -> float:
        """``max |d ^ d g^k + R^k_i g^i|``.

        With the curvature sign used throughout (positive scalar curvature on
        the round sphere) the Ricci operator returns minus the Ricci 1-forms.
        """
        return float(np.max(np.abs(_as_array(self.wedge_part) + _as_array(self.ricci_forms))))

    @property
    def decomposition_residual(self) -> float:
        """``max |d^2 g^k - (d . d g^k + d ^ d g^k)|`` with ``d^2 = -delta d - d delta``."""
        return float(np.max(np.abs(_as_array(self.laplacian) - _as_array(self.dot_part) - _as_array(self.wedge_part))))


def ricci_via_dirac(frame: PotentialFrame, point, fd: FDConfig = DEFAULT_FD) -> RicciViaDirac:
    """Square of the Dirac operator on the potentials, split into its scalar and bivector parts.

    The bivector part ``g^a ^ g^b (D^-_{e_a} D^-_{e_b} - L^r_{ab} D^-_{e_r})`` acts
    through the ``g^-1`` Clifford product and is compared with the Ricci
    1-forms ``R^k_i g^i`` of the Levi-Civita connection.
    """
    q = frame.check(point)
    loc = frame.local(q)
    conn = LeviCivitaConnection(frame.metric)
    ginv_metric = MetricExtensor.from_matrix(loc.ginv)
    duals_at = _memoized(lambda p: np.linalg.inv(frame._h(p)))
    duals = duals_at(q)
    outer = fd.outer()
    pairs = _TABLES.wedge_(loc.up[:, None, :], loc.up[None, :, :])

    wedge_part, dot_part = [], []
    for k in range(4):
        potential = (lambda p, k=k: Multiform(_TABLES.alg, _TABLES.one_forms(frame._h(p)[k])))
        first = [
            (lambda p, b=b: cov_deriv(conn, potential, duals_at(p)[:, b], p, "minus", fd))
            for b in range(4)
        ]
        first_here = np.array([f(q).coeffs for f in first])
        # L^r_{ab} = -(D^-_{e_a} g^r)(e_b)
        coeffs = np.zeros((4, 4, 4))
        for a in range(4):
            for r in range(4):
                rotated = cov_deriv(conn, (lambda p, r=r: Multiform(_TABLES.alg, _TABLES.one_forms(frame._h(p)[r]))), duals[:, a], q, "minus", fd)
                coeffs[r, a] = -(rotated.vector_part() @ duals)
        terms = np.zeros((4, 4, 16))
        for a in range(4):
            for b in range(4):
                second = cov_deriv(conn, first[b], duals[:, a], q, "minus", outer).coeffs
                terms[a, b] = second - np.einsum("r,rk->k", coeffs[:, a, b], first_here)
        bivector = sum(
            metric_clifford(ginv_metric, Multiform(_TABLES.alg, pairs[a, b]), Multiform(_TABLES.alg, terms[a, b])).coeffs
            for a in range(4)
            for b in range(4)
        )
        wedge_part.append(bivector)
        dot_part.append(np.einsum("ab,abk->k", frame.eta_inv, terms))

    potentials_at = lambda p: _TABLES.one_forms(frame._h(p))
    delta_d = _codifferential(frame, lambda p: _dg(frame, p, fd), q, outer)
    d_delta = _d(lambda p: _codifferential(frame, potentials_at, p, fd), q, outer)
    ricci_m = curvature_at(conn, frame.metric, q, fd).ricci_matrix
    ricci_forms = _TABLES.one_forms(frame.eta_inv @ (ricci_m @ duals).T)
    return RicciViaDirac(
        wedge_part=_as_multiforms(np.array(wedge_part)),
        dot_part=_as_multiforms(np.array(dot_part)),
        laplacian=_as_multiforms(-delta_d - d_delta),
        ricci_forms=_as_multiforms(ricci_forms),
    )


# energy integrals -----------------------------------------------------------------


@dataclass(frozen=True)
class Sphere:
    """A coordinate 2-sphere of given radius at fixed time.

    ``chart="cartesian"`` embeds it around ``center`` in the spatial
    coordinates; ``chart="spherical"`` uses the chart's own ``(r, theta, phi)``.
    """

    radius: float
    center: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    order: int = 16
    chart: str = "cartesian"

    def __post_init__(self):
        if not isinstance(self.order, (int, np.integer)) or self.order < MIN_QUADRATURE_ORDER:
            raise ConfigError(f"quadrature order must be an integer >= {MIN_QUADRATURE_ORDER}, got {self.order!r}")
        if not self.radius > 0:
            raise ConfigError(f"sphere radius must be positive, got {self.radius}")
        if self.chart not in ("cartesian", "spherical"):
            raise ConfigError(f"unknown sphere chart {self.chart!r}")

    def embedding(self, theta: float, phi: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Point and the two tangent vectors ``d/dtheta``, ``d/dphi``."""
        c = np.asarray(self.center, dtype=np.float64)
        if self.chart == "spherical":
            return np.array([c[0], self.radius, theta, phi]), np.eye(4)[2], np.eye(4)[3]
        st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
        point = c + self.radius * np.array([0.0, st * cp, st * sp, ct])
        d_theta = self.radius * np.array([0.0, ct * cp, ct * sp, -st])
        d_phi = self.radius * np.array([0.0, -st * sp, st * cp, 0.0])
        return point, d_theta, d_phi


def _two_form_on(coeffs: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Evaluate stacked 2-forms on the tangent pair ``(u, v)``."""
    out = np.zeros(coeffs.shape[:-1])
    for i in range(4):
        for j in range(i + 1, 4):
            out = out + coeffs[..., (1 << i) | (1 << j)] * (u[i] * v[j] - u[j] * v[i])
    return out


@dataclass(frozen=True)
class EnergyIntegral:
    from_field_strength: np.ndarray
    from_superpotential: np.ndarray
    radius: float
    order: int


def energy_integral(frame: PotentialFrame, sphere: Sphere, fd: FDConfig = DEFAULT_FD) -> EnergyIntegral:
    """``P_k`` as the sphere integral of ``star d g_k`` and ``P'_k`` from ``star S_k``.

    Gauss-Legendre product quadrature in ``(theta, phi)`` on the pulled-back
    2-forms; the values are raw, without any ``8 pi`` normalisation.
    """
    nodes, weights = np.polynomial.legendre.leggauss(sphere.order)
    thetas = 0.5 * np.pi * (nodes + 1.0)
    phis = np.pi * (nodes + 1.0)
    total_f = np.zeros(4)
    total_s = np.zeros(4)
    for theta, wt in zip(thetas, weights):
        for phi, wp in zip(phis, weights):
            point, u, v = sphere.embedding(theta, phi)
            try:
                q = frame.check(point)
            except ChartError as exc:
                raise ChartError(f"sphere of radius {sphere.radius} leaves the chart domain: {exc}") from exc
            loc = frame.local(q)
            star_dg = loc.hodge(frame.eta @ _dg(frame, q, fd))
            star_s = _superpotential_lower(frame, q, fd)
            jac = 0.5 * np.pi * np.pi * wt * wp
            total_f += jac * _two_form_on(star_dg, u, v)
            total_s += jac * _two_form_on(star_s, u, v)
    return EnergyIntegral(total_f, total_s, float(sphere.radius), int(sphere.order))
