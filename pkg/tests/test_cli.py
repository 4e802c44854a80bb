"""Command-line behaviour: exit codes, report formats and determinism."""

from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from extensor.cli import main

FAST_IDENTITIES = ["identities", "--dim", "3", "--trials", "10"]


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, list(args), env=env, catch_exceptions=False)

    return invoke


def _report(result) -> dict:
    data = json.loads(result.output)
    data.pop("timestamp")
    return data


def test_identities_pass_and_are_deterministic(run):
    first = run(*FAST_IDENTITIES)
    second = run(*FAST_IDENTITIES)
    assert first.exit_code == 0, first.output
    assert _report(first) == _report(second)
    report = _report(first)
    assert report["schema"] == "1"
    assert report["summary"]["pass"] is True
    assert {c["name"].split(".")[0] for c in report["checks"]} >= {"algebra", "extensor", "metric"}


def test_seed_changes_the_draws_and_reads_the_environment(run):
    base = _report(run(*FAST_IDENTITIES, "--suite", "algebra"))
    other = _report(run(*FAST_IDENTITIES, "--suite", "algebra", "--seed", "7"))
    from_env = _report(run(*FAST_IDENTITIES, "--suite", "algebra", env={"EXTENSOR_SEED": "7"}))
    assert base != other
    assert other == from_env


def test_workers_do_not_change_the_report(run):
    serial = _report(run(*FAST_IDENTITIES, "--suite", "algebra", "--suite", "metric"))
    parallel = _report(run(*FAST_IDENTITIES, "--suite", "algebra", "--suite", "metric", "--workers", "2"))
    assert serial.pop("args").pop("workers") == 1
    assert parallel.pop("args").pop("workers") == 2
    assert serial == parallel


def test_csv_has_one_row_per_check(run):
    result = run("curvature", "--geometry", "sphere_nunes", "--point", "1.0,0.5", "--format", "csv")
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.output)))
    as_json = json.loads(run("curvature", "--geometry", "sphere_nunes", "--point", "1.0,0.5").output)
    assert [r["name"] for r in rows] == [c["name"] for c in as_json["checks"]]
    assert all(r["pass"] == "true" for r in rows)


def test_curvature_report_values(run):
    result = run("curvature", "--geometry", "sphere_levi_civita", "--point", "1.0,0.3", "--frame", "orthonormal")
    values = json.loads(result.output)["values"]
    assert result.exit_code == 0
    assert values["scalar"] == pytest.approx(2.0, abs=1e-6)
    cot = 1.0 / np.tan(1.0)
    assert values["connection"][1][1][0] == pytest.approx(cot, abs=1e-8)


def test_failed_checks_exit_with_one(run):
    result = run("curvature", "--geometry", "sphere_levi_civita", "--point", "1.0,0.3", "--fd-scheme", "central", "--fd-step", "0.3")
    assert result.exit_code == 1
    assert json.loads(result.output)["summary"]["pass"] is False


@pytest.mark.parametrize(
    "args",
    [
        ["curvature", "--geometry", "klein_bottle", "--point", "0,0"],
        ["curvature", "--geometry", "sphere_nunes", "--point", "a,b"],
        ["curvature", "--geometry", "sphere_nunes", "--point", "1,1,1"],
        ["curvature", "--geometry", "sphere_nunes", "--point", "1,1", "--params", "radius"],
        ["identities", "--dim", "9"],
        ["identities", "--suite", "topology"],
        ["gravity", "--geometry", "minkowski", "--chart", "cartesian"],
        ["gravity", "--geometry", "schwarzschild_spherical", "--chart", "cartesian", "--point", "0,5,1,1"],
        ["curvature", "--geometry", "sphere_nunes", "--point", "1,1", "--fd-step", "1e-3", "--fd-step2", "1e-4"],
    ],
)
def test_usage_errors_exit_with_two(run, args):
    assert run(*args).exit_code == 2


@pytest.mark.parametrize(
    "args",
    [
        ["curvature", "--geometry", "sphere_levi_civita", "--point", "0,0.3"],
        ["curvature", "--geometry", "schwarzschild_cartesian", "--point", "0,2,0,0"],
        ["curvature", "--geometry", "sphere_nunes", "--point", "1,1", "--connection", "bogus"],
        ["factorize", "--metric", "1,0;0,1"],
        ["factorize", "--metric", "1,2;0,-1"],
        ["gravity", "--geometry", "sphere_levi_civita", "--chart", "spherical", "--point", "0,1,1,1"],
        ["gravity", "--geometry", "schwarzschild_cartesian", "--chart", "cartesian", "--sphere", "10", "--order", "2"],
    ],
)
def test_domain_errors_exit_with_three(run, args):
    result = run(*args)
    assert result.exit_code == 3
    assert "Error" in result.output


@pytest.mark.parametrize("text", ["4,0;0,-9", "[[4, 0], [0, -9]]"])
def test_factorize_inline_metric(run, text):
    report = json.loads(run("factorize", "--metric", text).output)
    h = np.array(report["h"])
    eta = np.diag([1.0, -1.0])
    assert np.allclose(h.T @ eta @ h, [[4.0, 0.0], [0.0, -9.0]])
    assert report["signature"] == [1, 1]


def test_factorize_reads_a_file(run, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"metric": [[2.0, 0.5], [0.5, 1.0]]}))
    result = run("factorize", "--metric", str(path), "--eta", "euclidean")
    assert result.exit_code == 0
    h = np.array(json.loads(result.output)["h"])
    assert np.allclose(h.T @ h, [[2.0, 0.5], [0.5, 1.0]])


def test_gravity_in_minkowski_is_all_zeros(run):
    result = run("gravity", "--geometry", "minkowski", "--chart", "cartesian", "--point", "0.1,0.2,0.3,0.4")
    assert result.exit_code == 0
    report = json.loads(result.output)
    for key in ("S", "t", "G"):
        for coeffs in report[key].values():
            assert all(abs(v) < 1e-10 for v in coeffs.values())


def test_gravity_sphere_mode(run):
    result = run("gravity", "--geometry", "schwarzschild_cartesian", "--chart", "cartesian", "--sphere", "50", "--sphere", "100")
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert [s["radius"] for s in report["spheres"]] == [50.0, 100.0]
    assert report["spheres"][0]["P"][0] == pytest.approx(4 * np.pi / np.sqrt(1 - 2 / 50), rel=1e-3)
