"""Closed-form geometries and a JSON format for user-defined ones."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError
from .expressions import Expression
from .fields import (
    Connection,
    DistortionField,
    FrameConnection,
    FrameSpec,
    LeviCivitaConnection,
    MetricField,
    ZeroConnection,
    as_point,
)
from .metric import MetricExtensor, factorize_metric

CHART_MARGIN = 1e-6
ETA4 = np.diag([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class GeometrySpec:
    """A chart with its metric, named connections, frames and an optional distortion field."""

    name: str
    dim: int
    coords: tuple[str, ...]
    metric: MetricField
    connections: Mapping[str, Connection]
    default_connection: str
    frames: Mapping[str, FrameSpec]
    distortion: DistortionField | None = None
    params: Mapping[str, float] = field(default_factory=dict)

    def connection(self, name: str | None = None) -> Connection:
        key = name or self.default_connection
        if key not in self.connections:
            raise ConfigError(f"geometry {self.name!r} has no connection {key!r}; available: {sorted(self.connections)}")
        return self.connections[key]

    def valid(self, point) -> bool:
        return self.metric.valid is None or bool(self.metric.valid(as_point(point, self.dim)))


def chart_valid(spec: GeometrySpec, point) -> bool:
    """True when ``point`` lies in the chart domain with the catalog margin."""
    try:
        return spec.valid(point)
    except (ValueError, ArithmeticError):
        return False


# catalog entries -------------------------------------------------------------


def _positive(params: Mapping[str, float], key: str) -> float:
    value = float(params[key])
    if not value > 0:
        raise ConfigError(f"parameter {key} must be positive, got {value}")
    return value


def _merge(defaults: Mapping[str, float], given: Mapping[str, float] | None) -> dict[str, float]:
    given = dict(given or {})
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown parameters {sorted(unknown)}; expected {sorted(defaults)}")
    return {**defaults, **{k: float(v) for k, v in given.items()}}


def _minkowski(params: Mapping[str, float]) -> GeometrySpec:
    metric = MetricField(lambda _p: ETA4, 4)
    identity = np.eye(4)
    return GeometrySpec(
        "minkowski",
        4,
        ("t", "x", "y", "z"),
        metric,
        {"levi_civita": LeviCivitaConnection(metric)},
        "levi_civita",
        {"coordinate": FrameSpec(lambda _p: identity, 4, "coordinate"), "orthonormal": FrameSpec(lambda _p: identity, 4, "orthonormal")},
        DistortionField(lambda _p: identity, 4),
        params,
    )


def _schwarzschild_cartesian(params: Mapping[str, float]) -> GeometrySpec:
    mass = _positive(params, "m")

    def radius(p):
        return float(np.linalg.norm(p[1:]))

    def valid(p):
        r = radius(p)
        return r > CHART_MARGIN and abs(r - 2 * mass) > CHART_MARGIN

    def exterior(p):
        return radius(p) > 2 * mass + CHART_MARGIN

    def metric(p):
        r = radius(p)
        lapse = 1.0 - 2.0 * mass / r
        n = p[1:] / r
        g = np.zeros((4, 4))
        g[0, 0] = lapse
        g[1:, 1:] = -np.eye(3) - (1.0 / lapse - 1.0) * np.outer(n, n)
        return g

    def distortion(p):
        r = radius(p)
        lapse = 1.0 - 2.0 * mass / r
        n = p[1:] / r
        radial = np.outer(n, n)
        h = np.zeros((4, 4))
        h[0, 0] = np.sqrt(lapse)
        h[1:, 1:] = np.eye(3) - radial + radial / np.sqrt(lapse)
        return h

    g = MetricField(metric, 4, valid)
    h = DistortionField(distortion, 4, exterior)
    return GeometrySpec(
        "schwarzschild_cartesian",
        4,
        ("t", "x", "y", "z"),
        g,
        {"levi_civita": LeviCivitaConnection(g), "flat": ZeroConnection(4, valid)},
        "levi_civita",
        {"coordinate": FrameSpec(lambda _p: np.eye(4), 4, "coordinate"), "orthonormal": FrameSpec(lambda p: np.linalg.inv(distortion(p)), 4, "orthonormal")},
        h,
        params,
    )


def _schwarzschild_spherical(params: Mapping[str, float]) -> GeometrySpec:
    mass = _positive(params, "m")

    def valid(p):
        r, theta = p[1], p[2]
        return r > CHART_MARGIN and abs(r - 2 * mass) > CHART_MARGIN and CHART_MARGIN < theta < np.pi - CHART_MARGIN

    def exterior(p):
        return valid(p) and p[1] > 2 * mass + CHART_MARGIN

    def metric(p):
        r, theta = p[1], p[2]
        lapse = 1.0 - 2.0 * mass / r
        return np.diag([lapse, -1.0 / lapse, -(r**2), -(r * np.sin(theta)) ** 2])

    def distortion(p):
        r, theta = p[1], p[2]
        lapse = 1.0 - 2.0 * mass / r
        return np.diag([np.sqrt(lapse), 1.0 / np.sqrt(lapse), r, r * np.sin(theta)])

    g = MetricField(metric, 4, valid)
    return GeometrySpec(
        "schwarzschild_spherical",
        4,
        ("t", "r", "theta", "phi"),
        g,
        {"levi_civita": LeviCivitaConnection(g)},
        "levi_civita",
        {"coordinate": FrameSpec(lambda _p: np.eye(4), 4, "coordinate"), "orthonormal": FrameSpec(lambda p: np.linalg.inv(distortion(p)), 4, "orthonormal")},
        DistortionField(distortion, 4, exterior),
        params,
    )


def _torus_parts(params: Mapping[str, float]):
    big, small = _positive(params, "R"), _positive(params, "r")
    if not big > small:
        raise ConfigError(f"torus needs R > r, got R={big}, r={small}")
    g = MetricField(lambda p: np.diag([small**2, (big + small * np.cos(p[0])) ** 2]), 2)
    frames = {
        "coordinate": FrameSpec(lambda _p: np.eye(2), 2, "coordinate"),
        "orthonormal": FrameSpec(lambda p: np.diag([1.0 / small, 1.0 / (big + small * np.cos(p[0]))]), 2, "orthonormal"),
    }
    return g, frames


def _torus_flat_nonmetric(params: Mapping[str, float]) -> GeometrySpec:
    g, frames = _torus_parts(params)
    return GeometrySpec(
        "torus_flat_nonmetric",
        2,
        ("x1", "x2"),
        g,
        {"flat": ZeroConnection(2), "levi_civita": LeviCivitaConnection(g)},
        "flat",
        frames,
        None,
        params,
    )


def _torus_teleparallel(params: Mapping[str, float]) -> GeometrySpec:
    g, frames = _torus_parts(params)
    return GeometrySpec(
        "torus_teleparallel",
        2,
        ("x1", "x2"),
        g,
        {"teleparallel": FrameConnection(frames["orthonormal"]), "levi_civita": LeviCivitaConnection(g)},
        "teleparallel",
        frames,
        None,
        params,
    )


def _sphere_parts(params: Mapping[str, float]):
    radius = _positive(params, "radius")

    def valid(p):
        return CHART_MARGIN < p[0] < np.pi - CHART_MARGIN

    g = MetricField(lambda p: radius**2 * np.diag([1.0, np.sin(p[0]) ** 2]), 2, valid)
    frames = {
        "coordinate": FrameSpec(lambda _p: np.eye(2), 2, "coordinate"),
        "orthonormal": FrameSpec(lambda p: np.diag([1.0, 1.0 / np.sin(p[0])]) / radius, 2, "orthonormal"),
    }
    return g, frames, valid


def _sphere_levi_civita(params: Mapping[str, float]) -> GeometrySpec:
    g, frames, _valid = _sphere_parts(params)
    return GeometrySpec("sphere_levi_civita", 2, ("theta", "phi"), g, {"levi_civita": LeviCivitaConnection(g)}, "levi_civita", frames, None, params)


def _sphere_nunes(params: Mapping[str, float]) -> GeometrySpec:
    g, frames, valid = _sphere_parts(params)
    connections = {"nunes": FrameConnection(frames["orthonormal"], valid=valid), "levi_civita": LeviCivitaConnection(g)}
    return GeometrySpec("sphere_nunes", 2, ("theta", "phi"), g, connections, "nunes", frames, None, params)


_ENTRIES: dict[str, tuple[Callable[[Mapping[str, float]], GeometrySpec], dict[str, float]]] = {
    "minkowski": (_minkowski, {}),
    "schwarzschild_cartesian": (_schwarzschild_cartesian, {"m": 1.0}),
    "schwarzschild_spherical": (_schwarzschild_spherical, {"m": 1.0}),
    "torus_flat_nonmetric": (_torus_flat_nonmetric, {"R": 2.0, "r": 1.0}),
    "torus_teleparallel": (_torus_teleparallel, {"R": 2.0, "r": 1.0}),
    "sphere_levi_civita": (_sphere_levi_civita, {"radius": 1.0}),
    "sphere_nunes": (_sphere_nunes, {"radius": 1.0}),
}
CATALOG_NAMES = tuple(_ENTRIES)


def catalog_load(name: str, params: Mapping[str, float] | None = None) -> GeometrySpec:
    """A catalog geometry by name, or a user geometry from a JSON config path."""
    if name in _ENTRIES:
        build, defaults = _ENTRIES[name]
        return build(_merge(defaults, params))
    path = Path(name)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise ConfigError(f"geometry config {name!r} not found")
        return load_config(json.loads(path.read_text()), params)
    raise ConfigError(f"unknown geometry {name!r}; expected one of {CATALOG_NAMES} or a JSON config path")


# user configs ----------------------------------------------------------------


def _matrix_function(rows, coords: tuple[str, ...], params: Mapping[str, float], what: str):
    dim = len(coords)
    if len(rows) != dim or any(len(row) != dim for row in rows):
        raise ConfigError(f"{what} must be a {dim}x{dim} array of expressions")
    names = coords + tuple(params)
    compiled = [[Expression(str(entry), names) for entry in row] for row in rows]

    def evaluate(p):
        env = {**params, **dict(zip(coords, p))}
        return np.array([[expr(env) for expr in row] for row in compiled])

    return evaluate


def _frame_coefficients(coeffs: Mapping[str, str], coords, params, dim: int):
    names = tuple(coords) + tuple(params)
    compiled = []
    for key, text in coeffs.items():
        try:
            k, i, j = (int(part) - 1 for part in key.split(","))
        except ValueError as exc:
            raise ConfigError(f"coefficient key {key!r} must look like 'k,i,j'") from exc
        if not all(0 <= v < dim for v in (k, i, j)):
            raise ConfigError(f"coefficient key {key!r} is out of range for dimension {dim}")
        compiled.append(((k, i, j), Expression(str(text), names)))

    def evaluate(p):
        env = {**params, **dict(zip(coords, p))}
        out = np.zeros((dim,) * 3)
        for index, expr in compiled:
            out[index] = expr(env)
        return out

    return evaluate


def _pointwise_orthonormal(metric: Callable[[np.ndarray], np.ndarray], dim: int) -> FrameSpec:
    def frame(p):
        g = MetricExtensor.from_matrix(metric(p))
        plus, minus = g.signature
        eta = MetricExtensor.from_matrix(np.diag([1.0] * plus + [-1.0] * minus))
        return np.linalg.inv(factorize_metric(g, eta).h.block(1, 1))

    return FrameSpec(frame, dim, "orthonormal")


def load_config(data: Mapping, params: Mapping[str, float] | None = None) -> GeometrySpec:
    """Build a geometry from a config mapping (see the README for the schema)."""
    try:
        name = str(data["name"])
        coords = tuple(str(c) for c in data["coords"])
        rows = data["metric"]
    except KeyError as exc:
        raise ConfigError(f"geometry config is missing {exc.args[0]!r}") from exc
    dim = int(data.get("dim", len(coords)))
    if dim != len(coords):
        raise ConfigError(f"config dim {dim} does not match {len(coords)} coordinates")
    merged = _merge({k: float(v) for k, v in data.get("params", {}).items()}, params)
    metric = _matrix_function(rows, coords, merged, "metric")
    predicates = data.get("valid", [])
    if isinstance(predicates, str):
        predicates = [predicates]
    checks = [Expression(text, coords + tuple(merged)) for text in predicates]

    def valid(p):
        env = {**merged, **dict(zip(coords, p))}
        return all(check(env) > CHART_MARGIN for check in checks)

    g = MetricField(metric, dim, valid if checks else None)
    frames = {"coordinate": FrameSpec(lambda _p: np.eye(dim), dim, "coordinate"), "orthonormal": _pointwise_orthonormal(metric, dim)}
    connections: dict[str, Connection] = {"levi_civita": LeviCivitaConnection(g)}
    spec = data.get("connection", {"kind": "levi_civita"})
    kind = spec.get("kind", "levi_civita")
    if kind == "explicit":
        vectors = spec.get("frame")
        if vectors is None:
            frame = frames["coordinate"]
        else:
            columns = _matrix_function(vectors, coords, merged, "frame")
            frame = FrameSpec(lambda p: columns(p).T, dim, "custom")
        coeffs = _frame_coefficients(spec.get("coeffs", {}), coords, merged, dim)
        connections["explicit"] = FrameConnection(frame, coeffs, g.valid)
        default = "explicit"
    elif kind == "levi_civita":
        default = "levi_civita"
    else:
        raise ConfigError(f"unknown connection kind {kind!r}")
    return GeometrySpec(name, dim, coords, g, connections, default, frames, None, merged)
