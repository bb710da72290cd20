import csv
import io
import json

import numpy as np
import pytest

from qchip.checks import SUITES, CheckContext

SQRT3 = np.sqrt(3.0)


def records(out):
    return list(csv.DictReader(io.StringIO(out)))


def test_surface_csv(run_cli):
    code, out, _ = run_cli("surface", "--chip", "1", "--grid", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "p,q,u,v,w"
    assert len(records(out)) == 4


def test_physical_surface_inside_insphere(run_cli):
    code, out, _ = run_cli("surface", "--chip", "2", "--grid", "6", "--physical")
    assert code == 0
    points = np.array([[float(r[c]) for c in "uvw"] for r in records(out)])
    assert len(points) == 36
    assert np.linalg.norm(points, axis=1).max() <= 1 / (2 * SQRT3) + 1e-9


@pytest.mark.parametrize("basis", ["qbism", "wootters"])
@pytest.mark.parametrize("branch", ["plus", "minus"])
def test_boundary_is_pure(run_cli, basis, branch):
    code, out, _ = run_cli("boundary", "--basis", basis, "--branch", branch, "--samples", "7")
    assert code == 0
    rows = records(out)
    assert len(rows) == 7
    for row in rows:
        norm = np.linalg.norm([float(row[c]) for c in "xyz"])
        assert norm == pytest.approx(1, abs=1e-9)


def test_phi_field_bounds(run_cli):
    code, out, _ = run_cli("phi-field", "--grid", "5")
    assert code == 0
    phi = [float(r["phi"]) for r in records(out)]
    assert phi
    assert min(phi) >= -1 and max(phi) <= 1


def test_reconstruct_worked_example_json(run_cli):
    code, out, _ = run_cli(
        "reconstruct", "--pz", "0.21132486540518713", "--px", "0.32679491924311227", "--format", "json"
    )
    assert code == 0
    document = json.loads(out)
    assert document["metadata"]["command"] == "reconstruct"
    (record,) = document["records"]
    assert [record[k] for k in ("p1", "p2", "p3", "p4")] == pytest.approx(
        [2 / 15, 1 / 5, 4 / 15, 2 / 5], abs=1e-12
    )
    assert record["physical"] is True
    assert record["on_chip"] is True


def test_unphysical_reconstruct_still_writes(run_cli):
    code, out, _ = run_cli("reconstruct", "--pz", "0", "--px", "0", "--format", "csv")
    assert code == 2
    (row,) = records(out)
    assert row["physical"] == "false"


def test_reconstruct_defaults_to_json(run_cli):
    code, out, _ = run_cli("reconstruct", "--pz", "0.5", "--px", "0.5")
    assert code == 0
    (record,) = json.loads(out)["records"]
    assert record["p"] == pytest.approx(0.5)


def test_reconstruct_from_config(run_cli, tmp_path):
    config = tmp_path / "reconstruct.env"
    config.write_text("pz=0.21132486540518713\npx=0.32679491924311227\n")
    code, out, _ = run_cli("reconstruct", "--config", str(config))
    assert code == 0
    (record,) = json.loads(out)["records"]
    assert (record["p"], record["q"]) == pytest.approx((1 / 3, 2 / 5))

    code, out, _ = run_cli("reconstruct", "--config", str(config), "--px", "0.5", "--format", "csv")
    assert code == 0
    (row,) = records(out)
    assert float(row["q"]) == pytest.approx(0.5)


def test_physical_surface_from_config(run_cli, tmp_path):
    config = tmp_path / "surface.env"
    config.write_text("physical=true\ngrid=3\n")
    code, out, _ = run_cli("surface", "--config", str(config))
    assert code == 0
    points = np.array([[float(r[c]) for c in "uvw"] for r in records(out)])
    assert len(points) == 9
    assert np.linalg.norm(points, axis=1).max() <= 1 / (2 * SQRT3) + 1e-9


def test_channel_identity(run_cli):
    code, out, _ = run_cli("channel", "--name", "PhaseFlip", "--xi", "0", "--grid", "3")
    assert code == 0
    rows = records(out)
    assert len(rows) == 9
    assert max(abs(float(r["surface_residual"])) for r in rows) < 1e-12


def test_short_evolution(run_cli):
    code, out, _ = run_cli("evolve", "--p0", "0.1", "--p1", "0.4", "--steps", "10", "--branch", "plus")
    assert code == 0
    rows = records(out)
    assert len(rows) == 11
    assert float(rows[0]["p"]) == pytest.approx(0.1)
    assert float(rows[-1]["p"]) == pytest.approx(0.4)
    assert max(float(r["von_neumann"]) for r in rows) < 1e-6


def test_check_with_config(run_cli, tmp_path):
    config = tmp_path / "quick.env"
    config.write_text("check_samples=100\n")
    code, out, _ = run_cli("check", "qubit-core", "phase-space", "--config", str(config))
    assert code == 0
    assert {r["suite"] for r in records(out)} == {"qubit-core", "phase-space"}


def test_out_file(run_cli, tmp_path):
    target = tmp_path / "surface.json"
    code, out, _ = run_cli("surface", "--grid", "3", "--format", "json", "--out", str(target))
    assert code == 0
    assert out == ""
    assert len(json.loads(target.read_text())["records"]) == 9


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["teleport"],
        ["surface", "--chip", "4"],
        ["surface", "--grid", "1"],
        ["reconstruct", "--pz", "0.5"],
        ["check", "no-such-suite"],
        ["surface", "--config", "/no/such/file.env"],
    ],
)
def test_usage_errors(run_cli, argv):
    code, out, err = run_cli(*argv)
    assert code == 1
    assert out == ""
    assert "qchip:" in err


def test_out_of_support_sample_fails(run_cli):
    code, _, err = run_cli("evolve", "--p0", "0.2", "--p1", "0.5", "--steps", "4")
    assert code == 2
    assert "qchip:" in err


def test_failed_checks_are_listed(run_cli):
    def always_fails(ctx: CheckContext):
        ctx.expect(False, "always_fails", "forced")

    SUITES["zz-broken"].append(always_fails)
    try:
        code, out, _ = run_cli("check", "zz-broken")
    finally:
        del SUITES["zz-broken"]

    assert code == 2
    assert json.loads(out) == [{"suite": "zz-broken", "check": "always_fails", "message": "forced"}]


def test_sub_resolution_evolution_is_a_usage_error(run_cli):
    code, out, err = run_cli("evolve", "--p0", "0.3", "--p1", "0.30000000000000004", "--steps", "1000")
    assert code == 1
    assert out == ""
    assert "float resolution" in err
