"""Catalog geometries, user JSON configs and the expression evaluator."""

from __future__ import annotations

import json

import numpy as np
import pytest

from extensor import ConfigError, catalog_load, curvature_at
from extensor.catalog import CATALOG_NAMES, chart_valid, load_config
from extensor.expressions import Expression
from extensor.fields import torsion_components

SPHERE = {
    "name": "user_sphere",
    "coords": ["theta", "phi"],
    "params": {"a": 1.0},
    "metric": [["a^2", "0"], ["0", "a^2*sin(theta)^2"]],
    "valid": ["theta > 0", "theta < pi"],
}


def test_every_catalog_entry_loads_and_has_a_symmetric_metric():
    points = {2: [1.0, 0.5], 4: [0.0, 7.0, 1.0, 0.5]}
    for name in CATALOG_NAMES:
        spec = catalog_load(name)
        g = spec.metric.matrix(points[spec.dim])
        assert np.allclose(g, g.T)
        assert len(spec.coords) == spec.dim


def test_unknown_geometry_and_parameters_are_config_errors():
    with pytest.raises(ConfigError):
        catalog_load("klein_bottle")
    with pytest.raises(ConfigError):
        catalog_load("sphere_levi_civita", {"mass": 2.0})
    with pytest.raises(ConfigError):
        catalog_load("sphere_levi_civita", {"radius": -1.0})


def test_user_sphere_matches_the_catalog_sphere():
    user = load_config(SPHERE, {"a": 2.0})
    built_in = catalog_load("sphere_levi_civita", {"radius": 2.0})
    point = [1.2, 0.3]
    assert np.allclose(user.metric.matrix(point), built_in.metric.matrix(point))
    assert curvature_at(user.connection(), user.metric, point).scalar == pytest.approx(0.5, abs=1e-6)


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "sphere.json"
    path.write_text(json.dumps(SPHERE))
    spec = catalog_load(str(path))
    assert spec.name == "user_sphere"
    assert spec.params == {"a": 1.0}


def test_missing_config_file():
    with pytest.raises(ConfigError):
        catalog_load("/nonexistent/geometry.json")


def test_chart_validity_uses_a_margin():
    spec = load_config(SPHERE)
    assert chart_valid(spec, [1.0, 0.0])
    assert not chart_valid(spec, [0.0, 0.0])
    assert not chart_valid(spec, [5e-7, 0.0])
    assert not chart_valid(spec, [np.pi, 0.0])


def test_explicit_frame_connection_reproduces_the_nunes_torsion():
    config = dict(SPHERE, connection={"kind": "explicit", "frame": [["1/a", "0"], ["0", "1/(a*sin(theta))"]]})
    user = load_config(config)
    nunes = catalog_load("sphere_nunes")
    point = [0.8, 1.0]
    assert np.allclose(torsion_components(user.connection(), point), torsion_components(nunes.connection(), point), atol=1e-8)


@pytest.mark.parametrize(
    "broken",
    [
        {"coords": ["x"], "metric": [["1"]]},
        dict(SPHERE, metric=[["1", "0"]]),
        dict(SPHERE, dim=3),
        dict(SPHERE, connection={"kind": "mystery"}),
        dict(SPHERE, connection={"kind": "explicit", "coeffs": {"1,2": "0"}}),
        dict(SPHERE, connection={"kind": "explicit", "coeffs": {"1,2,3": "0"}}),
    ],
)
def test_malformed_configs_are_rejected(broken):
    with pytest.raises(ConfigError):
        load_config(broken)


@pytest.mark.parametrize(
    "text, env, expected",
    [
        ("2^3 + 1", {}, 9.0),
        ("-x*sin(pi/2)", {"x": 3.0}, -3.0),
        ("sqrt(abs(x))", {"x": -4.0}, 2.0),
        ("x > 1", {"x": 3.0}, 2.0),
        ("x <= 1", {"x": 3.0}, -2.0),
    ],
)
def test_expression_evaluation(text, env, expected):
    assert Expression(text, tuple(env))(env) == pytest.approx(expected)


@pytest.mark.parametrize(
    "text",
    ["__import__('os')", "x.real", "y + 1", "'a'", "1 < x < 2", "x % 2", "sin(x, 2)", "lambda: 1", "[1]", "2 +"],
)
def test_expression_rejects_unsupported_syntax(text):
    with pytest.raises(ConfigError):
        Expression(text, ("x",))
