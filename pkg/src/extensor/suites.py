"""Randomized identity suites for the algebraic and calculus layers.

Each suite draws random inputs from a seeded generator, evaluates both
sides of an identity by independent routes and reports the largest
relative residual per identity as a :class:`Check`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .algebra import (
    Algebra,
    Multiform,
    algebra,
    canonical_dot,
    grades_part,
    hat,
    k_part,
    left_contract,
    tilde,
)
from .calculus import (
    DEFAULT_FD,
    ExtensorFunctional,
    FDConfig,
    derivative,
    derivative_star,
    directional_derivative,
    functional_directional,
    real_derivative,
    variational,
)
from .extensors import (
    Extensor,
    adjoint,
    apply,
    biform,
    determinant,
    extension,
    generalization,
    inverse,
    random_extensor,
    random_pair,
    trace,
)
from .metric import (
    PRODUCTS,
    Distortion,
    HodgeStar,
    MetricExtensor,
    eta_standard,
    factorize_metric,
    gauge_transform,
    golden_rule_check,
    hodge_relation_check,
    metric_clifford,
    metric_dot,
    metric_left_contract,
    metric_right_contract,
)

ALGEBRA_TOL = 1e-12
EXTENSOR_TOL = 1e-9
FACTOR_TOL = 1e-10
METRIC_TOL = 1e-9
METRIC_ALGEBRA_TOL = 1e-10
CALCULUS_TOL = 1e-8
RULES_TOL = 1e-6


@dataclass(frozen=True)
class Check:
    """Outcome of one identity: worst residual against its tolerance."""

    name: str
    residual: float
    tolerance: float
    value: float | None = None
    reference: float | None = None

    def __post_init__(self):
        for name in ("residual", "tolerance", "value", "reference"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, float(value))

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = self.passed
        return out


class _Worst:
    """Running maximum of residuals keyed by identity name, in insertion order."""

    def __init__(self, tolerances: dict[str, float]):
        self.tolerances = tolerances
        self.values = {name: 0.0 for name in tolerances}

    def add(self, name: str, residual: float) -> None:
        self.values[name] = max(self.values[name], float(residual))

    def checks(self, prefix: str) -> list[Check]:
        return [Check(f"{prefix}.{name}", value, self.tolerances[name]) for name, value in self.values.items()]


def relative_residual(left, right) -> float:
    """``max |left - right|`` scaled by the larger magnitude, floored at one."""
    a = left.coeffs if isinstance(left, Multiform) else np.asarray(left, dtype=float)
    b = right.coeffs if isinstance(right, Multiform) else np.asarray(right, dtype=float)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return float(np.max(np.abs(a - b), initial=0.0)) / scale


def random_multiform(alg: Algebra, rng: np.random.Generator, grades=None) -> Multiform:
    """Coefficients uniform in [-1, 1], optionally restricted to some grades."""
    x = Multiform(alg, rng.uniform(-1.0, 1.0, alg.size))
    return x if grades is None else grades_part(x, [grades] if isinstance(grades, int) else grades)


def random_vector(alg: Algebra, rng: np.random.Generator) -> Multiform:
    return Multiform.vector(alg, rng.uniform(-1.0, 1.0, alg.dim))


# multiform algebra ----------------------------------------------------------------


def algebra_checks(dim: int, trials: int, rng: np.random.Generator, tol: float = ALGEBRA_TOL) -> list[Check]:
    alg = algebra(dim)
    tau = Multiform.pseudoscalar(alg)
    names = [
        "clifford_associativity", "wedge_associativity", "hat_wedge", "tilde_wedge",
        "hat_dot", "tilde_dot", "hat_clifford", "tilde_clifford", "left_decomposition",
        "wedge_decomposition", "left_ladder", "right_ladder", "duality", "contraction_leibniz",
        "grade_flip", "dot_as_scalar_part", "contraction_duality",
    ]
    worst = _Worst({name: tol for name in names})
    for _ in range(trials):
        x, y, z = (random_multiform(alg, rng) for _ in range(3))
        a = random_vector(alg, rng)
        worst.add("clifford_associativity", relative_residual((x * y) * z, x * (y * z)))
        worst.add("wedge_associativity", relative_residual((x ^ y) ^ z, x ^ (y ^ z)))
        worst.add("hat_wedge", relative_residual(hat(x ^ y), hat(x) ^ hat(y)))
        worst.add("tilde_wedge", relative_residual(tilde(x ^ y), tilde(y) ^ tilde(x)))
        worst.add("hat_dot", relative_residual(canonical_dot(hat(x), y), canonical_dot(x, hat(y))))
        worst.add("tilde_dot", relative_residual(canonical_dot(tilde(x), y), canonical_dot(x, tilde(y))))
        worst.add("hat_clifford", relative_residual(hat(x * y), hat(x) * hat(y)))
        worst.add("tilde_clifford", relative_residual(tilde(x * y), tilde(y) * tilde(x)))
        worst.add("left_decomposition", relative_residual(a << x, (a * x - hat(x) * a) * 0.5))
        worst.add("wedge_decomposition", relative_residual(a ^ x, (a * x + hat(x) * a) * 0.5))
        worst.add("left_ladder", relative_residual(x << (y << z), (x ^ y) << z))
        worst.add("right_ladder", relative_residual((x >> y) >> z, x >> (y ^ z)))
        sign = (-1.0) ** (dim - 1)
        worst.add("duality", relative_residual(tau * (a ^ x), (a << (tau * x)) * sign))
        worst.add("contraction_leibniz", relative_residual(a << (x ^ y), ((a << x) ^ y) + (hat(x) ^ (a << y))))
        j, k = sorted(rng.integers(0, dim + 1, size=2))
        xj, yk = k_part(x, int(j)), k_part(y, int(k))
        worst.add("grade_flip", relative_residual(xj << yk, (yk >> xj) * (-1.0) ** (j * (k - j))))
        worst.add("dot_as_scalar_part", relative_residual(canonical_dot(x, y), (tilde(x) * y).scalar_part()))
        worst.add("contraction_duality", relative_residual(canonical_dot(x << y, z), canonical_dot(y, tilde(x) ^ z)))
    return worst.checks("algebra")


# extensors ------------------------------------------------------------------------


def _inverse_by_elimination(matrix: np.ndarray) -> np.ndarray:
    return np.linalg.solve(matrix, np.eye(matrix.shape[0]))


def eta_checks(dims=range(2, 7)) -> list[Check]:
    """Trace and determinant of the Minkowski extensor, compared exactly."""
    out = []
    for n in dims:
        eta = eta_standard(n).base
        tr, det = trace(eta), determinant(eta)
        out.append(Check(f"extensor.eta_trace_n{n}", abs(tr - (2 - n)), 1e-300, tr, 2 - n))
        out.append(Check(f"extensor.eta_det_n{n}", abs(det - (-1) ** (n - 1)), 1e-300, det, (-1) ** (n - 1)))
    return out


def extensor_checks(dim: int, trials: int, pairs: int, rng: np.random.Generator, tol: float = EXTENSOR_TOL) -> list[Check]:
    alg = algebra(dim)
    names = [
        "adjoint_pairing", "adjoint_involution", "adjoint_composition", "extension_wedge",
        "extension_composition", "extension_contraction", "extension_adjoint",
        "determinant_product", "determinant_classical", "determinant_adjoint", "pseudoscalar_scaling",
        "inverse_elimination", "inverse_identity", "inverse_determinant", "inverse_extension",
        "generalization_leibniz", "generalization_adjoint", "antisymmetric_part_biform",
        "basis_adjoint", "basis_extension", "basis_trace", "basis_determinant", "basis_biform",
        "basis_generalization",
    ]
    worst = _Worst({name: tol for name in names})
    tau = Multiform.pseudoscalar(alg)
    for _ in range(trials):
        t, u = random_extensor(alg, rng), random_extensor(alg, rng)
        x, y = random_multiform(alg, rng), random_multiform(alg, rng)
        a, b = random_vector(alg, rng), random_vector(alg, rng)
        ta = adjoint(t)
        worst.add("adjoint_pairing", relative_residual(canonical_dot(t(a), b), canonical_dot(a, ta(b))))
        worst.add("adjoint_involution", relative_residual(adjoint(ta).block(1, 1), t.block(1, 1)))
        worst.add("adjoint_composition", relative_residual(adjoint(t @ u).block(1, 1), (adjoint(u) @ ta).block(1, 1)))
        et, eu = extension(t), extension(u)
        worst.add("extension_wedge", relative_residual(et(x ^ y), et(x) ^ et(y)))
        worst.add("extension_composition", relative_residual(extension(t @ u)(x), et(eu(x))))
        worst.add("extension_contraction", relative_residual(x << et(y), et(extension(ta)(x) << y)))
        worst.add("extension_adjoint", relative_residual(extension(ta)(x), adjoint(et)(x)))
        dt, du = determinant(t), determinant(u)
        worst.add("determinant_product", relative_residual(determinant(t @ u), dt * du))
        worst.add("determinant_classical", relative_residual(dt, np.linalg.det(t.block(1, 1))))
        worst.add("determinant_adjoint", relative_residual(determinant(ta), dt))
        worst.add("pseudoscalar_scaling", relative_residual(et(tau), tau * dt))
        if abs(dt) > 1e-3:
            ti = inverse(t)
            worst.add("inverse_elimination", relative_residual(ti.block(1, 1), _inverse_by_elimination(t.block(1, 1))))
            worst.add("inverse_identity", relative_residual((t @ ti).block(1, 1), np.eye(dim)))
            worst.add("inverse_determinant", relative_residual(determinant(ti) * dt, 1.0))
            worst.add("inverse_extension", relative_residual(extension(ti)(et(x)), x))
        gt = generalization(t)
        worst.add("generalization_leibniz", relative_residual(gt(x ^ y), (gt(x) ^ y) + (x ^ gt(y))))
        worst.add("generalization_adjoint", relative_residual(generalization(ta)(x), adjoint(gt)(x)))
        minus = (t - ta) * 0.5
        worst.add("antisymmetric_part_biform", relative_residual(minus(a), (biform(t) >> a) * 0.5))
    for _ in range(pairs):
        t = random_extensor(alg, rng)
        pair = random_pair(alg, rng)
        x = random_multiform(alg, rng)
        worst.add("basis_adjoint", relative_residual(adjoint(t, pair).block(1, 1), adjoint(t).block(1, 1)))
        worst.add("basis_extension", relative_residual(extension(t, pair)(x), extension(t)(x)))
        worst.add("basis_trace", relative_residual(trace(t, pair), trace(t)))
        worst.add("basis_determinant", relative_residual(determinant(t, pair), determinant(t)))
        worst.add("basis_biform", relative_residual(biform(t, pair), biform(t)))
        worst.add("basis_generalization", relative_residual(generalization(t, pair)(x), generalization(t)(x)))
    return worst.checks("extensor")


# factorization ----------------------------------------------------------------------


def random_lorentz_transform(dim: int, rng: np.random.Generator, scale: float = 0.5,
                             max_condition: float = 50.0) -> Extensor:
    """Cayley transform of a random generator that is antisymmetric against eta.

    Near-singular ``1 - K`` gives extreme boosts; those are redrawn so the
    condition number (``exp(2 |rapidity|)`` for a pure boost) stays bounded.
    """
    eta = np.diag([1.0] + [-1.0] * (dim - 1))
    while True:
        s = rng.uniform(-scale, scale, (dim, dim))
        k = eta @ (s - s.T)
        lorentz = np.linalg.solve(np.eye(dim) - k, np.eye(dim) + k)
        if np.linalg.cond(lorentz) < max_condition:
            return Extensor.from_matrix(lorentz)


def random_distortion_matrix(dim: int, rng: np.random.Generator, max_condition: float = 50.0) -> np.ndarray:
    while True:
        h = rng.uniform(-1.0, 1.0, (dim, dim)) + 1.5 * np.eye(dim)
        if np.linalg.cond(h) < max_condition:
            return h


def random_lorentz_metric(dim: int, rng: np.random.Generator) -> MetricExtensor:
    h = random_distortion_matrix(dim, rng)
    eta = np.diag([1.0] + [-1.0] * (dim - 1))
    g = h.T @ eta @ h
    return MetricExtensor.from_matrix(0.5 * (g + g.T))


def factorization_checks(dim: int, trials: int, gauges: int, rng: np.random.Generator, tol: float = FACTOR_TOL) -> list[Check]:
    worst = _Worst({"reconstruction": tol, "gauge_reconstruction": tol, "determinism": 1e-300})
    eta = eta_standard(dim)
    for _ in range(trials):
        g = random_lorentz_metric(dim, rng)
        d = factorize_metric(g, eta)
        worst.add("reconstruction", d.residual(g))
        again = factorize_metric(MetricExtensor.from_matrix(g.matrix), eta)
        worst.add("determinism", float(np.max(np.abs(again.h.block(1, 1) - d.h.block(1, 1)))))
    g = random_lorentz_metric(dim, rng)
    d = factorize_metric(g, eta)
    for _ in range(gauges):
        worst.add("gauge_reconstruction", gauge_transform(d, random_lorentz_transform(dim, rng)).residual(g))
    checks = worst.checks("factorization")
    example = np.diag([4.0] + [-1.0] * (dim - 1))
    h = factorize_metric(MetricExtensor.from_matrix(example), eta).h.block(1, 1)
    expected = np.diag([2.0] + [1.0] * (dim - 1))
    checks.append(Check("factorization.diagonal_example", float(np.max(np.abs(h - expected))), 1e-300))
    return checks


# metric products and Hodge stars ------------------------------------------------------


def _random_distortion(dim: int, rng: np.random.Generator, sign: float) -> Distortion:
    h = random_distortion_matrix(dim, rng)
    if np.sign(np.linalg.det(h)) != sign:
        h[:, 0] = -h[:, 0]
    return Distortion(Extensor.from_matrix(h), eta_standard(dim))


def metric_checks(dim: int, trials: int, rng: np.random.Generator, tol: float = METRIC_TOL, algebra_tol: float = METRIC_ALGEBRA_TOL) -> list[Check]:
    alg = algebra(dim)
    tau = Multiform.pseudoscalar(alg)
    hodge_names = [
        "hodge_wedge_symmetry", "hodge_dot_exchange", "hodge_wedge_contraction", "hodge_contraction_wedge",
        "hodge_as_contraction", "hodge_as_clifford", "hodge_of_volume", "hodge_of_one",
    ]
    other = [f"golden_rule_{p}" for p in PRODUCTS] + [
        "hodge_scaled_metric", "hodge_pullback_positive", "hodge_pullback_negative", "metric_duality",
    ]
    algebraic = [
        "contraction_duality_left", "contraction_duality_right", "contraction_grade_flip", "contraction_equal_grades",
        "contraction_vector_flip", "contraction_leibniz", "clifford_hat", "clifford_tilde", "clifford_left_decomposition",
        "clifford_wedge_decomposition", "clifford_scalar_part", "contraction_left_ladder", "contraction_right_ladder",
        "clifford_associativity",
    ]
    worst = _Worst({**{n: tol for n in hodge_names + other}, **{n: algebra_tol for n in algebraic}})
    for trial in range(trials):
        sign = 1.0 if trial % 2 == 0 else -1.0
        d = _random_distortion(dim, rng, sign)
        g = d.metric
        ginv = g.inverse
        star = HodgeStar(g)
        vol = tau * g.volume_factor
        r, s = (int(v) for v in rng.integers(0, dim + 1, size=2))
        ar = random_multiform(alg, rng, r)
        br = random_multiform(alg, rng, r)
        worst.add("hodge_wedge_symmetry", relative_residual(ar ^ star(br), br ^ star(ar)))
        bc = random_multiform(alg, rng, dim - r)
        worst.add("hodge_dot_exchange", relative_residual(
            metric_dot(ginv, ar, star(bc)), (-1.0) ** (r * (dim - r)) * metric_dot(ginv, bc, star(ar))))
        lo, hi = sorted((r, s))
        a_lo, b_hi = random_multiform(alg, rng, lo), random_multiform(alg, rng, hi)
        worst.add("hodge_wedge_contraction", relative_residual(
            a_lo ^ star(b_hi), star(metric_left_contract(ginv, tilde(a_lo), b_hi)) * (-1.0) ** (lo * (hi - 1))))
        s_fit = int(rng.integers(0, dim - r + 1))
        b_fit = random_multiform(alg, rng, s_fit)
        worst.add("hodge_contraction_wedge", relative_residual(
            metric_left_contract(ginv, ar, star(b_fit)), star(tilde(ar) ^ b_fit) * (-1.0) ** (r * s_fit)))
        worst.add("hodge_as_contraction", relative_residual(star(ar), metric_left_contract(ginv, tilde(ar), vol)))
        worst.add("hodge_as_clifford", relative_residual(star(ar), metric_clifford(ginv, tilde(ar), vol)))
        worst.add("hodge_of_volume", relative_residual(star(vol), Multiform.scalar(alg, g.sign)))
        worst.add("hodge_of_one", relative_residual(star(Multiform.scalar(alg, 1.0)), vol))

        x, y, z = (random_multiform(alg, rng) for _ in range(3))
        a = random_vector(alg, rng)
        for product in PRODUCTS:
            scale = max(1.0, apply(d.extended, x).norm() * apply(d.extended, y).norm())
            worst.add(f"golden_rule_{product}", golden_rule_check(d, x, y, product) / scale)
        rel = hodge_relation_check(d, x)
        worst.add("hodge_scaled_metric", rel.scaled_metric / max(1.0, star(x).norm()))
        worst.add("hodge_pullback_positive" if sign > 0 else "hodge_pullback_negative",
                  (rel.pullback_unsigned if sign > 0 else rel.pullback_signed) / max(1.0, star(x).norm()))
        worst.add("metric_duality", relative_residual(
            metric_clifford(g, tau, a ^ x), metric_left_contract(g, a, metric_clifford(g, tau, x)) * (-1.0) ** (dim - 1)))

        worst.add("contraction_duality_left", relative_residual(
            metric_dot(g, metric_left_contract(g, x, y), z), metric_dot(g, y, tilde(x) ^ z)))
        worst.add("contraction_duality_right", relative_residual(
            metric_dot(g, metric_right_contract(g, x, y), z), metric_dot(g, x, z ^ tilde(y))))
        j, k = sorted(int(v) for v in rng.integers(0, dim + 1, size=2))
        xj, yk = k_part(x, j), k_part(y, k)
        worst.add("contraction_grade_flip", relative_residual(
            metric_left_contract(g, xj, yk), metric_right_contract(g, yk, xj) * (-1.0) ** (j * (k - j))))
        xk, yk2 = k_part(x, k), k_part(y, k)
        worst.add("contraction_equal_grades", relative_residual(
            metric_left_contract(g, xk, yk2).scalar_part(), metric_dot(g, tilde(xk), yk2)))
        worst.add("contraction_vector_flip", relative_residual(metric_left_contract(g, a, x), -metric_right_contract(g, hat(x), a)))
        worst.add("contraction_leibniz", relative_residual(
            metric_left_contract(g, a, x ^ y), (metric_left_contract(g, a, x) ^ y) + (hat(x) ^ metric_left_contract(g, a, y))))
        xy = metric_clifford(g, x, y)
        worst.add("clifford_hat", relative_residual(hat(xy), metric_clifford(g, hat(x), hat(y))))
        worst.add("clifford_tilde", relative_residual(tilde(xy), metric_clifford(g, tilde(y), tilde(x))))
        worst.add("clifford_left_decomposition", relative_residual(
            metric_left_contract(g, a, x), (metric_clifford(g, a, x) - metric_clifford(g, hat(x), a)) * 0.5))
        worst.add("clifford_wedge_decomposition", relative_residual(
            a ^ x, (metric_clifford(g, a, x) + metric_clifford(g, hat(x), a)) * 0.5))
        worst.add("clifford_scalar_part", relative_residual(metric_dot(g, x, y), metric_clifford(g, tilde(x), y).scalar_part()))
        worst.add("contraction_left_ladder", relative_residual(
            metric_left_contract(g, x, metric_left_contract(g, y, z)), metric_left_contract(g, x ^ y, z)))
        worst.add("contraction_right_ladder", relative_residual(
            metric_right_contract(g, metric_right_contract(g, x, y), z), metric_right_contract(g, x, y ^ z)))
        worst.add("clifford_associativity", relative_residual(
            metric_clifford(g, metric_clifford(g, x, y), z), metric_clifford(g, x, metric_clifford(g, y, z))))
    return worst.checks("metric")


# calculus ------------------------------------------------------------------------------


def _exact_form(name: str, computed: Multiform, expected: Multiform, tol: float) -> Check:
    return Check(f"calculus.{name}", relative_residual(computed, expected), tol)


def calculus_checks(dim: int, trials: int, rng: np.random.Generator, fd: FDConfig = DEFAULT_FD,
                    tol: float = CALCULUS_TOL, rules_tol: float = RULES_TOL) -> list[Check]:
    alg = algebra(dim)
    worst = _Worst({
        "wedge_derivative": tol, "wedge_rotational": tol, "contraction_rotational": tol,
        "contraction_divergence": tol, "square_norm": tol, "linear_scalar": tol, "sandwich": tol,
        "star_square": tol, "kform_functional": tol, "trace_functional": tol, "biform_functional": tol, "adjoint_functional": tol,
        "pseudoscalar_functional": tol, "determinant_functional": tol, "determinant_variation": tol,
        "leibniz": rules_tol, "chain_composition": rules_tol, "chain_real": rules_tol, "chain_scalar": rules_tol,
        "pair_independence": rules_tol, "gradient_identity": rules_tol,
    })
    tau = Multiform.pseudoscalar(alg)
    for _ in range(trials):
        x1 = random_vector(alg, rng)
        b2 = random_multiform(alg, rng, 2)
        worst.add("wedge_derivative", relative_residual(derivative(lambda v: v ^ b2, x1, fd, domain=[1]), b2 * (dim - 2)))
        worst.add("wedge_rotational", relative_residual(derivative_star(lambda v: v ^ b2, x1, "wedge", fd, domain=[1]), Multiform.zero(alg)))
        worst.add("contraction_rotational", relative_residual(derivative_star(lambda v: v << b2, x1, "wedge", fd, domain=[1]), b2 * 2.0))
        worst.add("contraction_divergence", relative_residual(derivative_star(lambda v: v << b2, x1, "lcontract", fd, domain=[1]), Multiform.zero(alg)))
        big = random_multiform(alg, rng)
        worst.add("square_norm", relative_residual(derivative(lambda v: canonical_dot(v, v), big, fd), big * 2.0))
        bb, cc, x2 = random_multiform(alg, rng), random_multiform(alg, rng), random_multiform(alg, rng, 2)
        worst.add("linear_scalar", relative_residual(derivative(lambda v: canonical_dot(bb, v), x2, fd, domain=[2]), k_part(bb, 2)))
        worst.add("sandwich", relative_residual(
            derivative(lambda v: canonical_dot(bb * v * cc, v), x2, fd, domain=[2]),
            k_part(bb * x2 * cc + tilde(bb) * x2 * tilde(cc), 2)))
        r = int(rng.integers(0, dim + 1))
        xr = random_multiform(alg, rng, r)
        canon = HodgeStar(None, alg)
        worst.add("star_square", relative_residual(
            derivative(lambda v: v ^ canon(v), xr, fd, domain=[r]), canon(xr) * (2.0 * (-1.0) ** (r * (r - 1) // 2))))

        h = random_extensor(alg, rng)
        a = random_vector(alg, rng)
        anchors = tuple(Multiform.basis_vector(alg, j + 1) for j in range(dim))
        k = int(rng.integers(1, dim + 1))
        vectors = [random_vector(alg, rng) for _ in range(k)]
        coeffs = [v.vector_part() for v in vectors]

        def kform(*images, coeffs=coeffs):
            out = Multiform.scalar(alg, 1.0)
            for c in coeffs:
                out = out ^ sum((img * float(cj) for img, cj in zip(images, c)), Multiform.zero(alg))
            return out

        blade = Multiform.scalar(alg, 1.0)
        for v in vectors:
            blade = blade ^ v
        worst.add("kform_functional", relative_residual(
            functional_directional(ExtensorFunctional(anchors, kform), h, a, fd), extension(h)(a << blade) * (dim - k + 1)))
        worst.add("trace_functional", relative_residual(functional_directional(ExtensorFunctional(
            anchors, lambda *xs: sum(canonical_dot(xi, e) for xi, e in zip(xs, anchors))), h, a, fd), a))
        worst.add("biform_functional", relative_residual(functional_directional(ExtensorFunctional(
            anchors, lambda *xs: sum((xi ^ e for xi, e in zip(xs, anchors)), Multiform.zero(alg))), h, a, fd), a * (dim - 1)))
        bvec = random_vector(alg, rng)
        worst.add("adjoint_functional", relative_residual(functional_directional(ExtensorFunctional(
            anchors, lambda *xs: sum((e * canonical_dot(bvec, xi) for xi, e in zip(xs, anchors)), Multiform.zero(alg))), h, a, fd),
            bvec * a))
        ext_tau = ExtensorFunctional(anchors, lambda *xs: kform(*xs, coeffs=np.eye(dim)))
        worst.add("pseudoscalar_functional", relative_residual(functional_directional(ext_tau, h, a, fd), extension(h)(a * tau)))
        det_h = determinant(h)
        if abs(det_h) > 1e-2:
            det_functional = ExtensorFunctional(anchors, lambda *xs: kform(*xs, coeffs=np.eye(dim)).coeffs[-1] * canonical_dot(tau, tau))
            clubs = inverse(adjoint(h))
            worst.add("determinant_functional", relative_residual(
                functional_directional(det_functional, h, a, fd), clubs(a) * det_h))
            w = random_extensor(alg, rng)
            expected = sum(left_contract(w(e), clubs(e)).scalar_part() for e in anchors) * det_h
            worst.add("determinant_variation", relative_residual(variational(determinant, h, w, fd), expected))

        f_poly = lambda v, c1=bb, c2=cc: c1 * v * c2 + (v ^ c1)
        g_poly = lambda v, c1=cc: v * v + c1
        xx, aa = random_multiform(alg, rng), random_multiform(alg, rng)
        fa = directional_derivative(f_poly, xx, aa, fd)
        ga = directional_derivative(g_poly, xx, aa, fd)
        worst.add("leibniz", relative_residual(
            directional_derivative(lambda v: f_poly(v) * g_poly(v), xx, aa, fd), fa * g_poly(xx) + f_poly(xx) * ga))
        worst.add("chain_composition", relative_residual(
            directional_derivative(lambda v: f_poly(g_poly(v)), xx, aa, fd), directional_derivative(f_poly, g_poly(xx), ga, fd)))
        lam = float(rng.uniform(-1.0, 1.0))
        path = lambda s, p=aa, q=bb: p * s + q * (s * s)
        velocity = aa + bb * (2.0 * lam)
        worst.add("chain_real", relative_residual(
            real_derivative(lambda s: f_poly(path(s)), lam, fd), directional_derivative(f_poly, path(lam), velocity, fd)))
        psi = lambda v: canonical_dot(v, v)
        worst.add("chain_scalar", relative_residual(
            directional_derivative(lambda v: np.sin(psi(v)), xx, aa, fd), np.cos(psi(xx)) * directional_derivative(psi, xx, aa, fd)))
        pair = random_pair(alg, rng)
        worst.add("pair_independence", relative_residual(derivative(f_poly, xx, fd, pair=pair), derivative(f_poly, xx, fd)))
        phi = lambda v, c1=bb, c2=cc: canonical_dot(c1 * v, v * c2)
        worst.add("gradient_identity", relative_residual(
            directional_derivative(phi, xx, aa, fd), canonical_dot(aa, derivative(phi, xx, fd))))
    return worst.checks("calculus")


SUITES: dict[str, Callable[..., list[Check]]] = {
    "algebra": algebra_checks,
    "extensor": extensor_checks,
    "factorization": factorization_checks,
    "metric": metric_checks,
    "calculus": calculus_checks,
}
