"""Gravitational potentials: Lagrangian, superpotential, conservation and energy identities."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extensor import ConfigError, DimensionError, catalog_load
from extensor.catalog import load_config
from extensor.fields import DistortionField
from extensor.gravitation import (
    GravityConfig,
    Sphere,
    _as_array,
    angular_momentum,
    cartan_residuals,
    conservation_identity,
    curvature_from_riemann,
    curvature_two_forms,
    energy_integral,
    energy_momentum,
    lagrangian_densities,
    maxwell_split,
    potentials,
    ricci_via_dirac,
    superpotential,
)

POINT = np.array([0.3, 6.0, -4.0, 3.0])


@pytest.fixture(scope="module")
def schwarzschild():
    return potentials(catalog_load("schwarzschild_cartesian"))


def test_minkowski_potentials_carry_no_field():
    frame = potentials(catalog_load("minkowski"))
    p = [0.1, 0.2, -0.3, 0.4]
    assert np.abs(_as_array(superpotential(frame, p).raised)).max() < 1e-10
    assert np.abs(_as_array(energy_momentum(frame, point=p).total)).max() < 1e-10
    assert lagrangian_densities(frame, p).potential.norm() < 1e-10


def test_potentials_are_orthonormal(schwarzschild):
    assert schwarzschild.orthonormality_residual(POINT) < 1e-10


def test_lagrangian_and_superpotential_identities(schwarzschild):
    lag = lagrangian_densities(schwarzschild, POINT)
    assert lag.identity_residual < 1e-4
    assert lag.alternative_residual < 1e-4
    sup = superpotential(schwarzschild, POINT)
    assert sup.packed_residual < 1e-4
    assert sup.split_residual < 1e-4
    assert energy_momentum(schwarzschild, point=POINT).packed_residual < 1e-4


def test_cartan_structure_and_both_curvature_routes(schwarzschild):
    cartan = cartan_residuals(schwarzschild, POINT)
    assert cartan.first_structure < 1e-5
    assert cartan.antisymmetry < 1e-5
    structure = np.array([[f.coeffs for f in row] for row in curvature_two_forms(schwarzschild, POINT)])
    riemann = np.array([[f.coeffs for f in row] for row in curvature_from_riemann(schwarzschild, POINT)])
    lowered = np.einsum("ag,gbk->abk", schwarzschild.eta, structure)
    assert np.abs(lowered - riemann).max() < 1e-4
    assert np.abs(riemann).max() > 1e-3


def test_conservation_and_momentum_closures(schwarzschild):
    cons = conservation_identity(schwarzschild, point=POINT)
    assert cons.residual < 1e-3
    assert cons.einstein_route_residual < 1e-3
    assert cons.field_equation_residual < 1e-4
    maxwell = maxwell_split(schwarzschild, point=POINT)
    assert maxwell.closure_residual < 1e-3
    assert maxwell.source_residual < 1e-3
    am = angular_momentum(schwarzschild, point=POINT)
    assert am.orbital_closure < 1e-3
    assert am.spin_closure < 1e-3
    dirac = ricci_via_dirac(schwarzschild, POINT)
    assert dirac.ricci_residual < 1e-3
    assert dirac.decomposition_residual < 1e-3


def test_graviton_mass_adds_a_term_to_the_energy_momentum(schwarzschild):
    plain = energy_momentum(schwarzschild, point=POINT)
    massive = energy_momentum(schwarzschild, GravityConfig(graviton_mass_sq=0.25), POINT)
    assert np.abs(_as_array(massive.mass_term)).max() > 0.1
    assert np.allclose(_as_array(massive.total), _as_array(plain.total) + _as_array(massive.mass_term))


def test_field_equation_sees_the_cosmological_constant(schwarzschild):
    cons = conservation_identity(schwarzschild, GravityConfig(cosmological_const=0.5), POINT)
    g = catalog_load("schwarzschild_cartesian").metric.matrix(POINT)
    assert cons.field_equation_residual == pytest.approx(0.5 * np.abs(g).max(), rel=1e-3)


def _boost(q, rate):
    b = rate * q[1]
    out = np.eye(4)
    out[0, 0] = out[1, 1] = np.cosh(b)
    out[0, 1] = out[1, 0] = np.sinh(b)
    return out


@settings(max_examples=5, deadline=None)
@given(st.floats(0.02, 0.2))
def test_energy_momentum_depends_on_the_gauge_but_conservation_does_not(rate):
    h = catalog_load("schwarzschild_cartesian").distortion
    gauged = potentials(DistortionField(lambda q: _boost(q, rate) @ h.matrix(q), 4, h.valid, h.eta))
    plain = potentials(catalog_load("schwarzschild_cartesian"))
    assert conservation_identity(gauged, point=POINT).residual < 1e-3
    t_plain = _as_array(energy_momentum(plain, point=POINT).total)
    t_gauged = _as_array(energy_momentum(gauged, point=POINT).total)
    assert np.abs(t_gauged - _boost(POINT, rate) @ t_plain).max() > 1e-5


def test_energy_on_a_centred_sphere_matches_the_closed_form(schwarzschild):
    result = energy_integral(schwarzschild, Sphere(50.0))
    expected = 4.0 * np.pi / np.sqrt(1.0 - 2.0 / 50.0)
    assert result.from_field_strength[0] == pytest.approx(expected, rel=1e-6)
    assert np.abs(result.from_field_strength[1:]).max() < 1e-6 * expected


def test_guards():
    with pytest.raises(DimensionError):
        potentials(catalog_load("sphere_levi_civita"))
    with pytest.raises(DimensionError):
        potentials(catalog_load("torus_teleparallel"))
    flat4 = load_config({"name": "flat4", "coords": ["t", "x", "y", "z"], "metric": [[str(v) for v in row] for row in np.diag([1, -1, -1, -1])]})
    with pytest.raises(ConfigError):
        potentials(flat4)
    with pytest.raises(ConfigError):
        Sphere(10.0, order=3)
    with pytest.raises(ConfigError):
        Sphere(-1.0)
    with pytest.raises(ConfigError):
        GravityConfig(graviton_mass_sq=-1.0)
