"""Extensor operations against linear-algebra oracles (minors, numpy det/inv)."""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extensor import (
    Extensor,
    Multiform,
    SingularExtensorError,
    adjoint,
    algebra,
    apply,
    compose,
    determinant,
    eta_standard,
    extension,
    generalization,
    inverse,
    trace,
    wedge,
)
from extensor.extensors import random_extensor, random_pair, sym_antisym_parts

seeds = st.integers(0, 2**32 - 1)


def _matrix(seed: int, n: int = 4) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-1, 1, (n, n)) + 1.5 * np.eye(n)


def _blade_index(factors: tuple[int, ...]) -> int:
    return sum(1 << (f - 1) for f in factors)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_extension_is_the_compound_matrix(n):
    """Coefficient of e_J in t(e_I) is the minor det M[J, I]."""
    m = _matrix(n, n)
    alg = algebra(n)
    ext = extension(Extensor.from_matrix(m, alg))
    for k in range(n + 1):
        for cols in itertools.combinations(range(1, n + 1), k):
            image = apply(ext, Multiform.blade(alg, *cols))
            for rows in itertools.combinations(range(1, n + 1), k):
                minor = np.linalg.det(m[np.ix_([r - 1 for r in rows], [c - 1 for c in cols])]) if k else 1.0
                assert image.coeffs[_blade_index(rows)] == pytest.approx(minor, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_trace_determinant_inverse_match_numpy(seed):
    m = _matrix(seed)
    t = Extensor.from_matrix(m)
    assert trace(t) == pytest.approx(np.trace(m), abs=1e-12)
    assert determinant(t) == pytest.approx(np.linalg.det(m), rel=1e-11)
    assert np.allclose(inverse(t).block(1, 1), np.linalg.inv(m), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_adjoint_is_the_transpose_for_any_reciprocal_pair(seed):
    rng = np.random.default_rng(seed)
    alg = algebra(4)
    t = random_extensor(alg, rng)
    for pair in (None, random_pair(alg, rng)):
        assert np.allclose(adjoint(t, pair).block(1, 1), t.block(1, 1).T, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_extension_is_multiplicative_and_basis_independent(seed):
    rng = np.random.default_rng(seed)
    alg = algebra(4)
    t, u = random_extensor(alg, rng), random_extensor(alg, rng)
    left = extension(compose(t, u))
    right = compose(extension(t), extension(u))
    x = Multiform(alg, rng.uniform(-1, 1, alg.size))
    assert apply(left, x).allclose(apply(right, x), atol=1e-10)
    pair = random_pair(alg, rng)
    assert apply(extension(t, pair), x).allclose(apply(extension(t), x), atol=1e-9)
    assert determinant(compose(t, u)) == pytest.approx(determinant(t) * determinant(u), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_generalization_is_a_derivation_over_wedge(seed):
    rng = np.random.default_rng(seed)
    alg = algebra(4)
    t = random_extensor(alg, rng)
    big = generalization(t)
    a = Multiform.vector(alg, rng.uniform(-1, 1, 4))
    b = Multiform(alg, rng.uniform(-1, 1, alg.size))
    lhs = apply(big, wedge(a, b))
    rhs = wedge(apply(big, a), b) + wedge(a, apply(big, b))
    assert lhs.allclose(rhs, atol=1e-10)
    assert apply(big, a).allclose(apply(t, a), atol=1e-12)


def test_symmetric_and_antisymmetric_parts():
    t = Extensor.from_matrix(_matrix(11))
    sym, anti = sym_antisym_parts(t)
    assert np.allclose(sym.block(1, 1), sym.block(1, 1).T)
    assert np.allclose(anti.block(1, 1), -anti.block(1, 1).T)
    assert np.allclose(sym.block(1, 1) + anti.block(1, 1), t.block(1, 1))


@pytest.mark.parametrize("n", range(2, 7))
def test_minkowski_trace_and_determinant_are_exact(n):
    eta = eta_standard(n).base
    assert trace(eta) == 2 - n
    assert determinant(eta) == (-1) ** (n - 1)


def test_singular_inverse_raises():
    with pytest.raises(SingularExtensorError):
        inverse(Extensor.from_matrix(np.diag([1.0, 0.0, 2.0])))


def test_json_round_trip():
    t = Extensor.from_matrix(_matrix(5))
    assert Extensor.from_json(t.to_json()).allclose(t, atol=0.0)
