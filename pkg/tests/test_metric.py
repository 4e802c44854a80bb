"""Metric extensors, factorization, metric products and Hodge stars."""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extensor import (
    DegenerateMetricError,
    Distortion,
    Extensor,
    HodgeStar,
    MetricExtensor,
    Multiform,
    NotSymmetricError,
    SignatureError,
    algebra,
    eta_standard,
    factorize_metric,
    wedge,
)
from extensor.eigen import jacobi_eigh
from extensor.metric import (
    PRODUCTS,
    canonical_metric,
    gauge_transform,
    golden_rule_check,
    hodge_relation_check,
    metric_dot,
)
from extensor.suites import random_lorentz_metric, random_lorentz_transform

seeds = st.integers(0, 2**32 - 1)
ETA4 = np.diag([1.0, -1.0, -1.0, -1.0])


def _perm_sign(seq) -> int:
    seq, sign = list(seq), 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign


def oracle_star(g: np.ndarray, blade: tuple[int, ...]) -> dict[tuple[int, ...], float]:
    """Component form of the star fixed by ``a ^ *b = <a, b> sqrt|det g| e_1..n``."""
    n = g.shape[0]
    gi = np.linalg.inv(g)
    vol = np.sqrt(abs(np.linalg.det(g)))
    out = {}
    for rows in itertools.combinations(range(n), len(blade)):
        rest = tuple(x for x in range(n) if x not in rows)
        minor = np.linalg.det(gi[np.ix_(rows, blade)]) if blade else 1.0
        out[rest] = vol * minor * _perm_sign(rows + rest)
    return out


def _lorentz(seed: int, n: int = 4) -> np.ndarray:
    return random_lorentz_metric(n, np.random.default_rng(seed)).matrix


@pytest.mark.parametrize("g", [np.eye(3), ETA4, _lorentz(0), _lorentz(1, 3)], ids=["euclid3", "eta4", "lorentz4", "lorentz3"])
def test_hodge_star_matches_component_oracle(g):
    n = g.shape[0]
    alg = algebra(n)
    star = HodgeStar(MetricExtensor.from_matrix(g))
    for k in range(n + 1):
        for blade in itertools.combinations(range(n), k):
            got = star(Multiform.blade(alg, *[i + 1 for i in blade]))
            expected = Multiform.zero(alg)
            for rest, c in oracle_star(g, blade).items():
                expected = expected + Multiform.blade(alg, *[i + 1 for i in rest], coeff=c)
            assert got.allclose(expected, atol=1e-12), blade


def test_hodge_matrix_agrees_with_direct_application_and_inverts():
    """Regression: the blade-ordered matrix used to be transposed."""
    g = MetricExtensor.from_matrix(_lorentz(4))
    star = HodgeStar(g)
    rng = np.random.default_rng(2)
    x = Multiform(g.algebra, rng.uniform(-1, 1, 16))
    assert np.allclose(star.matrix @ x.coeffs, star(x).coeffs, atol=1e-12)
    assert star.inverse(star(x)).allclose(x, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_wedge_with_star_is_the_metric_product_times_volume(seed):
    rng = np.random.default_rng(seed)
    g = MetricExtensor.from_matrix(_lorentz(seed))
    star = HodgeStar(g)
    for k in range(5):
        a = Multiform.from_grade(g.algebra, k, rng.uniform(-1, 1, len(g.algebra.blades_of_grade(k))))
        b = Multiform.from_grade(g.algebra, k, rng.uniform(-1, 1, len(g.algebra.blades_of_grade(k))))
        assert wedge(a, star(b)).allclose(wedge(b, star(a)), rtol=1e-10, atol=1e-10)
        expected = metric_dot(g.inverse, a, b) * star.volume
        assert wedge(a, star(b)).allclose(expected, rtol=1e-10, atol=1e-10)


def test_star_of_one_and_of_volume():
    g = MetricExtensor.from_matrix(_lorentz(6))
    star = HodgeStar(g)
    one = Multiform.scalar(g.algebra, 1.0)
    assert star(one).allclose(star.volume, atol=1e-12)
    assert star(star.volume).scalar_part() == pytest.approx(g.sign, abs=1e-12)


# factorization -------------------------------------------------------------------


def test_diagonal_example_is_exact():
    d = factorize_metric(MetricExtensor.from_matrix(np.diag([4.0, -1.0, -1.0, -1.0])), eta_standard(4))
    assert np.array_equal(d.h.block(1, 1), np.diag([2.0, 1.0, 1.0, 1.0]))


def test_minkowski_factors_to_identity():
    d = factorize_metric(eta_standard(4), eta_standard(4))
    assert np.array_equal(d.h.block(1, 1), np.eye(4))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 6))
def test_factorization_reconstructs_and_is_gauge_invariant(seed, n):
    rng = np.random.default_rng(seed)
    g = random_lorentz_metric(n, rng)
    d = factorize_metric(g, eta_standard(n))
    assert d.residual(g) < 1e-10
    gauged = gauge_transform(d, random_lorentz_transform(n, rng))
    assert gauged.residual(g) < 1e-10
    assert not np.allclose(gauged.h.block(1, 1), d.h.block(1, 1))


def test_factorization_guards():
    with pytest.raises(SignatureError):
        factorize_metric(MetricExtensor.from_matrix(np.eye(4)), eta_standard(4))
    with pytest.raises(DegenerateMetricError):
        factorize_metric(MetricExtensor.from_matrix(np.diag([1.0, -1.0, 0.0, -1.0])), eta_standard(4))
    with pytest.raises(NotSymmetricError):
        MetricExtensor.from_matrix(np.array([[1.0, 2.0], [0.0, -1.0]]))


def test_euclidean_pairing_factorizes_positive_metrics():
    g = MetricExtensor.from_matrix(np.array([[2.0, 0.5], [0.5, 1.0]]))
    d = factorize_metric(g, canonical_metric(2))
    assert d.residual(g) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_jacobi_matches_numpy_eigh(seed):
    m = np.random.default_rng(seed).normal(size=(6, 6))
    m = m + m.T
    values, vectors = jacobi_eigh(m)
    assert np.allclose(np.sort(values), np.linalg.eigvalsh(m), atol=1e-10)
    assert np.allclose(vectors @ np.diag(values) @ vectors.T, m, atol=1e-10)


# golden rule and star relations ------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_golden_rule_for_every_product(seed):
    rng = np.random.default_rng(seed)
    h = rng.uniform(-1, 1, (4, 4)) + 1.5 * np.eye(4)
    d = Distortion(Extensor.from_matrix(h), eta_standard(4))
    x = Multiform(d.algebra, rng.uniform(-1, 1, 16))
    y = Multiform(d.algebra, rng.uniform(-1, 1, 16))
    for product in PRODUCTS:
        assert golden_rule_check(d, x, y, product) < 1e-9, product


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_star_relations_depend_on_the_sign_of_det_h(sign):
    rng = np.random.default_rng(8)
    h = rng.uniform(-1, 1, (4, 4)) + 1.5 * np.eye(4)
    if np.sign(np.linalg.det(h)) != sign:
        h[:, 0] *= -1
    d = Distortion(Extensor.from_matrix(h), eta_standard(4))
    x = Multiform(d.algebra, rng.uniform(-1, 1, 16))
    res = hodge_relation_check(d, x)
    assert res.scaled_metric < 1e-9
    assert res.pullback_signed < 1e-9
    if sign > 0:
        assert res.pullback_unsigned < 1e-9
    else:
        assert res.pullback_unsigned > 1e-3
