"""Command-line front end: identity suites, geometry and gravitation reports, metric factorization.

Exit status is 0 when every check passes, 1 when some check fails, 2 for
usage errors and 3 for domain errors (chart, dimension, signature, degeneracy).
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from .calculus import FDConfig
from .catalog import CATALOG_NAMES, GeometrySpec, catalog_load
from .errors import ChartError, ExtensorError
from .fields import (
    FrameSpec,
    curvature_at,
    frame_coefficients,
    nonmetricity_components,
    torsion_components,
)
from .gravitation import (
    GravityConfig,
    Sphere,
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
from .metric import MetricExtensor, canonical_metric, eta_standard, factorize_metric
from .suites import (
    ALGEBRA_TOL,
    CALCULUS_TOL,
    EXTENSOR_TOL,
    FACTOR_TOL,
    METRIC_ALGEBRA_TOL,
    METRIC_TOL,
    RULES_TOL,
    Check,
    algebra_checks,
    calculus_checks,
    eta_checks,
    extensor_checks,
    factorization_checks,
    metric_checks,
)

SCHEMA = "1"
EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
CSV_COLUMNS = ("name", "value", "reference", "residual", "tolerance", "pass")
SUITE_ORDER = ("algebra", "extensor", "factorization", "metric", "calculus")
MAX_PAIRS = 50
DEFAULT_SEED = 0


class DomainFailure(click.ClickException):
    """A library error surfaced with exit status 3."""

    exit_code = EXIT_DOMAIN

    def __init__(self, exc: ExtensorError):
        super().__init__(f"{type(exc).__name__}: {exc}")


# shared plumbing ------------------------------------------------------------------


def _fd_options(func):
    func = click.option("--fd-step2", type=click.FloatRange(min=0, min_open=True), default=None,
                        help="Outer step for nested derivatives (default: square root of the inner step).")(func)
    func = click.option("--fd-step", type=click.FloatRange(min=0, min_open=True), default=None,
                        help="Finite-difference step (default: scaled cube root of machine epsilon).")(func)
    func = click.option("--fd-scheme", type=click.Choice(["richardson", "central"]), default="richardson",
                        show_default=True, help="Finite-difference scheme.")(func)
    return func


def _format_option(func):
    return click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True,
                        help="JSON report, or CSV with one row per check.")(func)


def _fd_config(scheme: str, step: float | None, step2: float | None) -> FDConfig:
    try:
        return FDConfig(step=step, step2=step2, scheme=scheme)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--fd-step2") from exc


def _fd_echo(fd: FDConfig) -> dict:
    return {"scheme": fd.scheme, "step": fd.step, "step2": fd.step2}


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint=what) from exc


def _parse_params(text: str | None) -> dict[str, float]:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise click.BadParameter(f"expected k=v pairs, got {item!r}", param_hint="--params")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise click.BadParameter(f"parameter {key.strip()!r} is not a number", param_hint="--params") from exc
    return out


def _load_geometry(name: str, params: dict[str, float]) -> GeometrySpec:
    if name not in CATALOG_NAMES and not (name.endswith(".json") or Path(name).exists()):
        raise click.UsageError(f"unknown geometry {name!r}; choose one of {', '.join(CATALOG_NAMES)} or a JSON config path")
    return catalog_load(name, params)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if hasattr(value, "to_dict") and hasattr(value, "coeffs"):
        return value.to_dict()["coeffs"]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(report: dict, checks: list[Check], fmt: str, started: float) -> None:
    """Write the report and exit with the overall status."""
    failed = [c.name for c in checks if not c.passed]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in checks:
            writer.writerow([c.name, _blank(c.value), _blank(c.reference), repr(c.residual), repr(c.tolerance), str(c.passed).lower()])
        click.echo(buffer.getvalue(), nl=False)
    else:
        report = {
            "schema": SCHEMA,
            **report,
            "checks": [c.to_dict() for c in checks],
            "summary": {"checks": len(checks), "failed": len(failed), "failed_names": failed, "pass": not failed},
            # everything that varies between identical runs lives here
            "timestamp": {
                "utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "elapsed_s": round(time.perf_counter() - started, 3),
            },
        }
        click.echo(json.dumps(_jsonable(report), indent=2, allow_nan=True))
    sys.exit(EXIT_FAILED if failed else EXIT_OK)


def _blank(value) -> str:
    return "" if value is None else repr(float(value))


def _within(name: str, value: float, reference: float, tol: float) -> Check:
    return Check(name, float(abs(value - reference)), tol, float(value), float(reference))


def _small(name: str, value: float, tol: float) -> Check:
    return Check(name, float(abs(value)), tol, float(value), 0.0)


@click.group()
@click.version_option(package_name="extensor")
def main():
    """Multiform and extensor calculus: identity suites and geometry reports."""


# identities ----------------------------------------------------------------------


def _run_suite(name: str, dim: int, trials: int, seed: np.random.SeedSequence, fd: FDConfig, tols: dict) -> list[Check]:
    rng = np.random.default_rng(seed)
    if name == "algebra":
        return algebra_checks(dim, trials, rng, tols["algebra"])
    if name == "extensor":
        return extensor_checks(dim, trials, min(trials, MAX_PAIRS), rng, tols["extensor"]) + eta_checks()
    if name == "factorization":
        return factorization_checks(dim, trials, min(trials, MAX_PAIRS), rng, tols["factorization"])
    if name == "metric":
        return metric_checks(dim, trials, rng, tols["metric"], tols["metric_algebra"])
    return calculus_checks(dim, max(1, trials // 10), rng, fd, tols["calculus"], tols["rules"])


@main.command()
@click.option("--dim", type=click.IntRange(2, 6), default=4, show_default=True, help="Dimension of the algebra.")
@click.option("--trials", type=click.IntRange(min=1), default=200, show_default=True,
              help="Random trials per suite; the calculus suite runs a tenth of them.")
@click.option("--seed", type=int, envvar="EXTENSOR_SEED", default=DEFAULT_SEED, show_default=True,
              help="Seed; falls back to $EXTENSOR_SEED.")
@click.option("--suite", "suites", type=click.Choice(SUITE_ORDER), multiple=True, help="Run only these suites (repeatable).")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes across suites.")
@click.option("--algebra-tol", type=float, default=ALGEBRA_TOL, show_default=True)
@click.option("--extensor-tol", type=float, default=EXTENSOR_TOL, show_default=True)
@click.option("--factorization-tol", type=float, default=FACTOR_TOL, show_default=True)
@click.option("--metric-tol", type=float, default=METRIC_TOL, show_default=True)
@click.option("--metric-algebra-tol", type=float, default=METRIC_ALGEBRA_TOL, show_default=True)
@click.option("--calculus-tol", type=float, default=CALCULUS_TOL, show_default=True)
@click.option("--rules-tol", type=float, default=RULES_TOL, show_default=True)
@_fd_options
@_format_option
def identities(dim, trials, seed, suites, workers, algebra_tol, extensor_tol, factorization_tol, metric_tol,
               metric_algebra_tol, calculus_tol, rules_tol, fd_scheme, fd_step, fd_step2, fmt):
    """Run the randomized identity suites and report the worst residual of each identity."""
    started = time.perf_counter()
    fd = _fd_config(fd_scheme, fd_step, fd_step2)
    tols = {"algebra": algebra_tol, "extensor": extensor_tol, "factorization": factorization_tol, "metric": metric_tol,
            "metric_algebra": metric_algebra_tol, "calculus": calculus_tol, "rules": rules_tol}
    chosen = [s for s in SUITE_ORDER if not suites or s in suites]
    # one child seed per suite, independent of which suites run or how many workers
    seeds = dict(zip(SUITE_ORDER, np.random.SeedSequence(seed).spawn(len(SUITE_ORDER))))
    args = [(name, dim, trials, seeds[name], fd, tols) for name in chosen]
    try:
        if workers > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(args))) as pool:
                results = list(pool.map(_run_suite, *zip(*args)))
        else:
            results = [_run_suite(*a) for a in args]
    except ExtensorError as exc:
        raise DomainFailure(exc) from exc
    checks = [c for block in results for c in block]
    report = {
        "command": "identities",
        "args": {"dim": dim, "trials": trials, "calculus_trials": max(1, trials // 10), "suites": chosen, "workers": workers},
        "seed": seed,
        "fd": _fd_echo(fd),
        "tolerances": tols,
    }
    _emit(report, checks, fmt, started)


# curvature --------------------------------------------------------------------------

REFERENCE_TOL = 1e-5
CURVATURE_TOL = 1e-4
VACUUM_TOL = 1e-4
NONMETRICITY_TOL = 1e-6


def _to_frame(e: np.ndarray, coframe: np.ndarray, conn, spec: GeometrySpec, q: np.ndarray, fd: FDConfig) -> dict:
    """Torsion, nonmetricity and curvature tensors expressed in the frame ``e``."""
    g = spec.metric
    torsion = np.einsum("ks,smn,mi,nj->kij", coframe, torsion_components(conn, q, fd), e, e)
    nonmetricity = np.einsum("abc,ai,bj,ck->ijk", nonmetricity_components(conn, g, q, fd), e, e, e)
    curv = curvature_at(conn, g, q, fd)
    return {
        "metric": e.T @ g.matrix(q) @ e,
        "torsion": torsion,
        "nonmetricity": nonmetricity,
        "riemann": np.einsum("abcw,ai,bj,ck,wl->ijkl", curv.riemann_array, e, e, e, e),
        "ricci": e.T @ curv.ricci_matrix @ e,
        "scalar": curv.scalar,
        "einstein": e.T @ curv.einstein_matrix @ e,
        "kretschmann": curv.kretschmann,
    }


def _curvature_references(spec: GeometrySpec, connection: str, q: np.ndarray, fd: FDConfig) -> tuple[list[Check], dict]:
    """Closed-form comparisons that apply to catalog geometries."""
    checks: list[Check] = []
    notes: dict = {}
    p = spec.params
    conn = spec.connection(connection)
    g = spec.metric
    curv = curvature_at(conn, g, q, fd)
    torsion = torsion_components(conn, q, fd)
    nonmet = nonmetricity_components(conn, g, q, fd)
    name = spec.name
    if name == "minkowski":
        checks += [_small("minkowski.curvature", np.max(np.abs(curv.riemann_array)), REFERENCE_TOL),
                   _small("minkowski.torsion", np.max(np.abs(torsion)), REFERENCE_TOL),
                   _small("minkowski.nonmetricity", np.max(np.abs(nonmet)), REFERENCE_TOL)]
    elif name.startswith("sphere_"):
        theta = q[0]
        cot = np.cos(theta) / np.sin(theta)
        if connection in (None, spec.default_connection) and name == "sphere_nunes":
            # tau(d_theta, d_phi) has phi-component +cot in this library's sign convention
            checks += [_small("nunes.curvature", np.max(np.abs(curv.riemann_array)), REFERENCE_TOL),
                       _within("nunes.torsion_magnitude", abs(torsion[1, 0, 1]), abs(cot), REFERENCE_TOL),
                       _within("nunes.torsion_opposite_convention", -torsion[1, 0, 1], -cot, REFERENCE_TOL),
                       _small("nunes.nonmetricity", np.max(np.abs(nonmet)), REFERENCE_TOL)]
        else:
            w = frame_coefficients(conn, spec.frames["orthonormal"], q, fd)
            checks += [_within("levi_civita.cot_coefficient", w[1, 1, 0], cot, REFERENCE_TOL),
                       _within("levi_civita.minus_cot_coefficient", w[0, 1, 1], -cot, REFERENCE_TOL),
                       _within("levi_civita.scalar_curvature", curv.scalar, 2.0 / p["radius"] ** 2, CURVATURE_TOL)]
    elif name.startswith("torus_"):
        big, small, x1 = p["R"], p["r"], q[0]
        if conn is spec.connections.get("flat"):
            expected = -2.0 * small * (big + small * np.cos(x1)) * np.sin(x1)
            checks += [_small("torus_flat.curvature", np.max(np.abs(curv.riemann_array)), 1e-6),
                       _small("torus_flat.torsion", np.max(np.abs(torsion)), 1e-6),
                       _within("torus_flat.nonmetricity_122", nonmet[0, 1, 1], expected, REFERENCE_TOL)]
        elif conn is spec.connections.get("teleparallel"):
            e = spec.frames["orthonormal"].matrix(q)
            in_frame = np.einsum("ks,smn,mi,nj->kij", np.linalg.inv(e), torsion, e, e)
            expected = np.sin(x1) / (big + small * np.cos(x1))
            checks += [_small("torus_teleparallel.curvature", np.max(np.abs(curv.riemann_array)), REFERENCE_TOL),
                       _small("torus_teleparallel.nonmetricity", np.max(np.abs(nonmet)), REFERENCE_TOL),
                       _within("torus_teleparallel.torsion_magnitude_212", abs(in_frame[1, 0, 1]), abs(expected), REFERENCE_TOL)]
            # the alternative closed form carries an extra factor R/r; reported only
            notes["torus_teleparallel.alternative_form"] = abs(big * np.sin(x1) / (small * (big + small * np.cos(x1))))
    elif name.startswith("schwarzschild_"):
        lc = spec.connection("levi_civita")
        vac = curvature_at(lc, g, q, fd)
        checks += [_small("schwarzschild.ricci", np.max(np.abs(vac.ricci_matrix)), VACUUM_TOL),
                   _small("schwarzschild.scalar", vac.scalar, VACUUM_TOL),
                   _small("schwarzschild.einstein", np.max(np.abs(vac.einstein_matrix)), VACUUM_TOL)]
        if "flat" in spec.connections:
            x = q[1:]
            r = float(np.linalg.norm(x))
            q_flat = nonmetricity_components(spec.connection("flat"), g, q, fd)
            checks += [_within("schwarzschild.nonmetricity_100", q_flat[1, 0, 0], 2.0 * p["m"] * x[0] / r**3, NONMETRICITY_TOL)]
    return checks, notes


@main.command()
@click.option("--geometry", required=True, help=f"Catalog name ({', '.join(CATALOG_NAMES)}) or a JSON config path.")
@click.option("--params", default=None, help="Geometry parameters as k=v,k=v.")
@click.option("--point", required=True, help="Chart coordinates, comma separated.")
@click.option("--frame", "frame_kind", type=click.Choice(["coordinate", "orthonormal"]), default="coordinate", show_default=True)
@click.option("--connection", default=None, help="Connection name (default: the geometry's own).")
@_fd_options
@_format_option
def curvature(geometry, params, point, frame_kind, connection, fd_scheme, fd_step, fd_step2, fmt):
    """Connection, torsion, nonmetricity and curvature of a geometry at one point."""
    started = time.perf_counter()
    fd = _fd_config(fd_scheme, fd_step, fd_step2)
    coords = _parse_floats(point, "--point")
    try:
        spec = _load_geometry(geometry, _parse_params(params))
        if len(coords) != spec.dim:
            raise click.BadParameter(f"{spec.name} needs {spec.dim} coordinates, got {len(coords)}", param_hint="--point")
        q = np.array(coords)
        if not spec.valid(q):
            raise ChartError(f"point {coords} lies outside the chart of {spec.name}")
        conn = spec.connection(connection)
        frame: FrameSpec = spec.frames[frame_kind]
        e = frame.matrix(q)
        values = {"connection": frame_coefficients(conn, frame, q, fd)}
        values.update(_to_frame(e, np.linalg.inv(e), conn, spec, q, fd))
        checks, notes = _curvature_references(spec, connection, q, fd)
    except ExtensorError as exc:
        raise DomainFailure(exc) from exc
    report = {
        "command": "curvature",
        "geometry": spec.name,
        "params": dict(spec.params),
        "coords": list(spec.coords),
        "point": coords,
        "frame": frame_kind,
        "connection_name": connection or spec.default_connection,
        "fd": _fd_echo(fd),
        "values": values,
        "notes": notes,
    }
    _emit(report, checks, fmt, started)


# factorize --------------------------------------------------------------------------


def _read_matrix(text: str) -> np.ndarray:
    path = Path(text)
    source = path.read_text() if path.is_file() else text
    try:
        data = json.loads(source)
    except json.JSONDecodeError:
        # rows separated by semicolons, entries by commas
        try:
            data = [[float(v) for v in row.split(",")] for row in source.strip().split(";")]
        except ValueError as exc:
            raise click.BadParameter("expected a JSON array, 'a,b;c,d' rows or a file containing either", param_hint="--metric") from exc
    if isinstance(data, dict):
        data = data.get("metric", data)
    try:
        matrix = np.array(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise click.BadParameter("metric entries must be numbers", param_hint="--metric") from exc
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or not 1 <= matrix.shape[0] <= 12:
        raise click.BadParameter(f"metric must be a square matrix of size 1..12, got shape {matrix.shape}", param_hint="--metric")
    return matrix


@main.command()
@click.option("--metric", "metric_text", required=True, help="Metric matrix: a JSON file, a JSON array, or 'a,b;c,d' rows.")
@click.option("--eta", "eta_kind", type=click.Choice(["lorentz", "euclidean"]), default="lorentz", show_default=True,
              help="Pairing: diag(1,-1,...,-1) or the identity.")
@click.option("--tol", type=float, default=FACTOR_TOL, show_default=True, help="Reconstruction tolerance.")
@_format_option
def factorize(metric_text, eta_kind, tol, fmt):
    """Factor a metric as h^T eta h."""
    started = time.perf_counter()
    matrix = _read_matrix(metric_text)
    n = matrix.shape[0]
    try:
        g = MetricExtensor.from_matrix(matrix)
        eta = eta_standard(n) if eta_kind == "lorentz" else canonical_metric(n)
        dist = factorize_metric(g, eta)
    except ExtensorError as exc:
        raise DomainFailure(exc) from exc
    h = dist.h.block(1, 1)
    residual = dist.residual(g)
    report = {
        "command": "factorize",
        "args": {"eta": eta_kind, "dim": n},
        "metric": matrix,
        "h": h,
        "eigenvalues": np.sort(g.eigen[0]),
        "signature": list(g.signature),
    }
    _emit(report, [Check("factorize.reconstruction", residual, tol)], fmt, started)


# gravity ------------------------------------------------------------------------------

GRAVITY_TOLERANCES = {
    "lagrangian_identity": 1e-4,
    "lagrangian_alternative": 1e-4,
    "superpotential_packed": 1e-4,
    "superpotential_split": 1e-4,
    "energy_momentum_packed": 1e-4,
    "cartan_first_structure": 1e-5,
    "cartan_antisymmetry": 1e-5,
    "curvature_routes": 1e-4,
    "conservation": 1e-3,
    "einstein_routes": 1e-3,
    "maxwell_closure": 1e-3,
    "maxwell_source": 1e-3,
    "orbital_closure": 1e-3,
    "spin_closure": 1e-3,
    "ricci_via_dirac": 1e-3,
    "dirac_decomposition": 1e-3,
}


def _by_index(forms) -> dict:
    return {f"alpha{k}": form for k, form in enumerate(forms)}


def _gravity_point(frame, config: GravityConfig, q: np.ndarray, fd: FDConfig) -> tuple[dict, dict]:
    lag = lagrangian_densities(frame, q, fd)
    sup = superpotential(frame, q, fd)
    em = energy_momentum(frame, config, q, fd)
    cartan = cartan_residuals(frame, q, fd)
    cons = conservation_identity(frame, config, q, fd)
    maxwell = maxwell_split(frame, config, q, fd)
    am = angular_momentum(frame, config, q, fd)
    dirac = ricci_via_dirac(frame, q, fd)
    structure = np.array([[f.coeffs for f in row] for row in curvature_two_forms(frame, q, fd)])
    from_riemann = np.array([[f.coeffs for f in row] for row in curvature_from_riemann(frame, q, fd)])
    lowered = np.einsum("ag,gbk->abk", frame.eta, structure)
    residuals = {
        "lagrangian_identity": lag.identity_residual,
        "lagrangian_alternative": lag.alternative_residual,
        "superpotential_packed": sup.packed_residual,
        "superpotential_split": sup.split_residual,
        "energy_momentum_packed": em.packed_residual,
        "cartan_first_structure": cartan.first_structure,
        "cartan_antisymmetry": cartan.antisymmetry,
        "curvature_routes": float(np.max(np.abs(lowered - from_riemann))),
        "conservation": cons.residual,
        "einstein_routes": cons.einstein_route_residual,
        "maxwell_closure": maxwell.closure_residual,
        "maxwell_source": maxwell.source_residual,
        "orbital_closure": am.orbital_closure,
        "spin_closure": am.spin_closure,
        "ricci_via_dirac": dirac.ricci_residual,
        "dirac_decomposition": dirac.decomposition_residual,
    }
    values = {
        "S": _by_index(sup.raised),
        "t": _by_index(em.total),
        "G": _by_index(cons.einstein_forms),
        "field_equation": cons.field_equation_residual,
        "spin_divergence": am.spin_divergence,
        "total_divergence": am.total_divergence,
        "superpotential_split_printed_sign": sup.split_residual_printed_sign,
        "lagrangian_minkowski": lag.minkowski_residual,
        "lagrangian_scalar": lag.scalar_residual,
    }
    return values, residuals


KNOWN_CHARTS = {("t", "x", "y", "z"): "cartesian", ("t", "r", "theta", "phi"): "spherical"}


def _check_chart(spec: GeometrySpec, chart: str) -> None:
    """Catalog charts carry recognisable coordinate names; user charts take the tag on trust."""
    known = KNOWN_CHARTS.get(tuple(spec.coords))
    if known is not None and known != chart:
        raise click.BadParameter(f"{spec.name} uses {known} coordinates {spec.coords}, not {chart}", param_hint="--chart")


def schwarzschild_energy(mass: float, radius: float) -> float:
    """Closed-form ``P_0`` of the Cartesian Schwarzschild potentials on a centred sphere."""
    return 4.0 * np.pi * mass / np.sqrt(1.0 - 2.0 * mass / radius)


def _sphere_checks(spec: GeometrySpec, center: list[float], chart: str, spheres: list[dict],
                   closed_form_tol: float, stability_tol: float) -> list[Check]:
    checks = []
    if spec.name == "schwarzschild_cartesian" and chart == "cartesian" and not any(center[1:]):
        for s in spheres:
            expected = schwarzschild_energy(spec.params["m"], s["radius"])
            checks.append(Check(f"gravity.sphere_r{s['radius']:g}.closed_form_energy",
                                abs(s["P"][0] - expected) / abs(expected), closed_form_tol, float(s["P"][0]), expected))
    if len(spheres) > 1:
        energies = np.array([s["P"][0] for s in spheres])
        spread = float(np.ptp(energies) / np.max(np.abs(energies)))
        checks.append(Check("gravity.radius_stability", spread, stability_tol, spread, 0.0))
    return checks


@main.command()
@click.option("--geometry", required=True, help="A four-dimensional catalog geometry or JSON config path.")
@click.option("--params", default=None, help="Geometry parameters as k=v,k=v.")
@click.option("--point", default=None, help="Chart coordinates t,x1,x2,x3 (point mode).")
@click.option("--sphere", "radii", type=click.FloatRange(min=0, min_open=True), multiple=True,
              help="Coordinate sphere radius (sphere mode, repeatable).")
@click.option("--center", default="0,0,0,0", show_default=True, help="Sphere center in the chart (cartesian embedding).")
@click.option("--chart", type=click.Choice(["cartesian", "spherical"]), required=True,
              help="Coordinate type of the geometry's chart; fixes the angular-momentum coordinates and the sphere embedding.")
@click.option("--mass-sq", type=click.FloatRange(min=0), default=0.0, show_default=True, help="Graviton mass squared.")
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True, help="Cosmological constant.")
@click.option("--order", type=int, default=16, show_default=True, help="Gauss-Legendre order per angle (at least 4).")
@click.option("--closed-form-tol", type=float, default=1e-3, show_default=True,
              help="Relative tolerance against the closed-form Schwarzschild energy.")
@click.option("--stability-tol", type=float, default=0.02, show_default=True,
              help="Relative spread of P_0 allowed across several radii.")
@_fd_options
@_format_option
def gravity(geometry, params, point, radii, center, chart, mass_sq, lam, order, closed_form_tol, stability_tol, fd_scheme, fd_step, fd_step2, fmt):
    """Superpotentials, energy-momentum and conservation identities, or sphere energy integrals."""
    started = time.perf_counter()
    if (point is None) == (not radii):
        raise click.UsageError("give exactly one of --point or --sphere")
    fd = _fd_config(fd_scheme, fd_step, fd_step2)
    try:
        spec = _load_geometry(geometry, _parse_params(params))
        _check_chart(spec, chart)
        frame = potentials(spec)
        config = GravityConfig(mass_sq, lam)
        report = {
            "command": "gravity",
            "geometry": spec.name,
            "params": dict(spec.params),
            "coords": list(spec.coords),
            "chart": chart,
            "config": {"mass_sq": mass_sq, "lambda": lam},
            "fd": _fd_echo(fd),
        }
        if point is not None:
            coords = _parse_floats(point, "--point")
            if len(coords) != 4:
                raise click.BadParameter(f"gravity needs 4 coordinates, got {len(coords)}", param_hint="--point")
            values, residuals = _gravity_point(frame, config, np.array(coords), fd)
            report.update(point=coords, **values, residuals=residuals)
            checks = [Check(f"gravity.{k}", float(v), GRAVITY_TOLERANCES[k]) for k, v in residuals.items()]
        else:
            middle = _parse_floats(center, "--center")
            if len(middle) != 4:
                raise click.BadParameter("center needs 4 coordinates", param_hint="--center")
            spheres = []
            for radius in radii:
                result = energy_integral(frame, Sphere(radius, tuple(middle), order, chart), fd)
                spheres.append({"radius": radius, "order": order, "P": result.from_field_strength,
                                "P_superpotential": result.from_superpotential})
            report.update(center=middle, spheres=spheres)
            checks = _sphere_checks(spec, middle, chart, spheres, closed_form_tol, stability_tol)
    except ExtensorError as exc:
        raise DomainFailure(exc) from exc
    _emit(report, checks, fmt, started)


if __name__ == "__main__":  # pragma: no cover
    main()
