"""Finite-difference multiform calculus against closed-form derivatives."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extensor import (
    DEFAULT_FD,
    Extensor,
    FDConfig,
    Multiform,
    algebra,
    canonical_dot,
    derivative,
    derivative_star,
    determinant,
    directional_derivative,
    k_part,
)
from extensor.calculus import real_derivative, variational

seeds = st.integers(0, 2**32 - 1)
ALG = algebra(4)


def _random(seed: int, grades=None) -> Multiform:
    x = Multiform(ALG, np.random.default_rng(seed).uniform(-1, 1, 16))
    return x if grades is None else sum((k_part(x, k) for k in grades), Multiform.zero(ALG))


def test_real_derivative_schemes():
    exact = np.cos(0.7)
    central = real_derivative(np.sin, 0.7, FDConfig(scheme="central"))
    richardson = real_derivative(np.sin, 0.7, FDConfig(scheme="richardson"))
    assert abs(central - exact) < 1e-9
    assert abs(richardson - exact) < 1e-11


@pytest.mark.parametrize("kwargs", [{"scheme": "forward"}, {"step": -1.0}, {"step": 1e-3, "step2": 1e-4}])
def test_fd_config_rejects_bad_settings(kwargs):
    with pytest.raises(ValueError):
        FDConfig(**kwargs)


def test_outer_step_defaults_to_square_root_of_inner():
    assert FDConfig(step=1e-4).outer().step == pytest.approx(1e-2)
    assert FDConfig(step=1e-4, step2=1e-3).outer().step == 1e-3


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_derivative_of_the_square_norm_is_twice_the_point(seed):
    x = _random(seed)
    got = derivative(lambda y: canonical_dot(y, y), x)
    assert got.allclose(2 * x, atol=1e-8)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_derivative_of_a_linear_scalar_is_its_coefficient_projected(seed):
    b = _random(seed)
    x = _random(seed + 1, grades=[2])
    got = derivative(lambda y: canonical_dot(y, b), x, domain=[2])
    assert got.allclose(k_part(b, 2), atol=1e-8)


@pytest.mark.parametrize("tag, expected", [("clifford", 4.0), ("lcontract", 4.0), ("wedge", 0.0)])
def test_vector_derivative_of_the_identity(tag, expected):
    x = _random(3, grades=[1])
    got = derivative_star(lambda y: y, x, tag, domain=[1])
    assert got.allclose(Multiform.scalar(ALG, expected), atol=1e-8)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_directional_derivative_of_the_clifford_square(seed):
    x, a = _random(seed), _random(seed + 7)
    got = directional_derivative(lambda y: y * y, x, a)
    assert got.allclose(a * x + x * a, atol=1e-8)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_determinant_variation_is_jacobi_formula(seed):
    rng = np.random.default_rng(seed)
    t = Extensor.from_matrix(rng.uniform(-1, 1, (4, 4)) + 1.5 * np.eye(4))
    w = Extensor.from_matrix(rng.uniform(-1, 1, (4, 4)))
    m = t.block(1, 1)
    expected = np.linalg.det(m) * np.trace(np.linalg.solve(m, w.block(1, 1)))
    assert variational(determinant, t, w, DEFAULT_FD) == pytest.approx(expected, rel=1e-8, abs=1e-10)
