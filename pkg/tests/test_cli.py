import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest
from click.testing import CliRunner

from photon_povm import cli

HEADER = "a,quantity,axis,closed_form,quadrature,abs_diff,units"


def run(*args, env=None):
    result = CliRunner().invoke(cli.main, [str(a) for a in args], env=env, catch_exceptions=False)
    return result


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def pick(table, quantity, axis=None):
    return [r for r in table if r["quantity"] == quantity and (axis is None or r["axis"] == axis)]


def test_scan_pol_small_a_closed_form():
    res = run("scan-uncertainty", "--a-min", 1e-4, "--points", 1, "--closed-only")
    assert res.exit_code == 0
    assert res.output.splitlines()[0] == HEADER
    for r in pick(rows(res.output), "product"):
        assert float(r["closed_form"]) == pytest.approx(0.5, abs=1e-3)
        assert r["quadrature"] == "nan"


def test_scan_spin_large_a():
    res = run("scan-uncertainty", "--family", "spin", "--h", "[[1,0],[0,0],[0,0]]",
              "--a-min", 1e4, "--points", 1, "--axis", "z", "--closed-only")
    (r,) = pick(rows(res.output), "product", "z")
    assert float(r["closed_form"]) == pytest.approx(math.sqrt(21) / 5, abs=1e-4)


@pytest.mark.parametrize("family,extra", [("polarization", ["--gamma", "+"]),
                                          ("spin", ["--h", "[[0,0],[1,0],[0,0]]"])])
def test_scan_dual_path_columns(family, extra):
    res = run("scan-uncertainty", "--family", family, *extra, "--a-min", 0.1, "--a-max", 10, "--points", 2)
    assert res.exit_code == 0, res.output
    table = pick(rows(res.output), "product")
    assert len(table) == 4
    assert all(float(r["abs_diff"]) < 1e-6 for r in table)


def test_spin_dist_circular_small_a():
    a = 1e-3
    res = run("spin-dist", "--gamma", "+", "--a-min", a, "--points", 1)
    table = rows(res.output)
    p = {r["quantity"]: float(r["quadrature"]) for r in table}
    assert p["p(m_s=+1)"] == pytest.approx(0, abs=1e-5)
    assert p["p(m_s=0)"] == pytest.approx(2 * a, rel=1e-2)
    assert p["p(m_s=-1)"] == pytest.approx(1, abs=3e-3)
    assert p["sum"] == pytest.approx(1, abs=1e-8)
    assert all(float(r["abs_diff"]) < 1e-8 for r in table)


def test_spin_dist_symmetric_for_h010():
    res = run("spin-dist", "--family", "spin", "--h", "[[0,0],[1,0],[0,0]]",
              "--a-min", 1e-2, "--a-max", 1e2, "--points", 3, "--closed-only")
    table = rows(res.output)
    for a in {r["a"] for r in table}:
        sub = {r["quantity"]: float(r["closed_form"]) for r in table if r["a"] == a}
        assert sub["p(m_s=+1)"] == pytest.approx(sub["p(m_s=-1)"], abs=1e-12)


def test_helicity_dist_linear():
    res = run("helicity-dist", "--a-min", 0.5, "--points", 1)
    for r in rows(res.output):
        assert float(r["quadrature"]) == pytest.approx(0.5, abs=1e-10)


def test_position_density_rows():
    res = run("position-density", "--family", "spin", "--a-min", 0.5, "--points", 1,
              "--axis", "z", "--x-points", 3, "--x-max", 1.0)
    table = rows(res.output)
    assert len(table) == 9
    assert all(float(r["quadrature"]) >= 0 for r in table)
    assert all(r["units"] == "p0^3/hbar^3" for r in table)


def _extreme_params(a_values, quantity, axis):
    res = run("extremize", "--a-min", a_values[0], "--a-max", a_values[1], "--points", 2,
              "--axis", axis, "--closed-only", "--linear")
    return [float(r["closed_form"]) for r in pick(rows(res.output), quantity, axis)]


def test_extremize_switch_points():
    assert _extreme_params((6.0, 6.3), "rho_min", "z") == [0.0, 1.0]
    assert _extreme_params((2.5, 2.7), "lambda_min", "x") == [1.0, 0.0]


def test_extremize_sandwiches_fixed_h():
    args = ["--a-min", 0.01, "--a-max", 100, "--points", 5, "--axis", "xz", "--closed-only"]
    ext = rows(run("extremize", *args).output)
    fixed = rows(run("scan-uncertainty", "--family", "spin", *args).output)
    fixed += rows(run("scan-uncertainty", "--family", "spin", "--h", "[[0,0],[1,0],[0,0]]", *args).output)
    for r in pick(fixed, "product"):
        lo = next(e for e in pick(ext, "min", r["axis"]) if e["a"] == r["a"])
        hi = next(e for e in pick(ext, "max", r["axis"]) if e["a"] == r["a"])
        assert float(lo["closed_form"]) - 1e-9 <= float(r["closed_form"]) <= float(hi["closed_form"]) + 1e-9


def test_extremize_quadrature_column():
    res = run("extremize", "--a-min", 1.0, "--points", 1, "--axis", "z")
    for r in pick(rows(res.output), "min") + pick(rows(res.output), "max"):
        assert float(r["abs_diff"]) < 1e-6


def test_json_matches_schema():
    res = run("spin-dist", "--a-min", 0.1, "--a-max", 1, "--points", 2, "--format", "json")
    data = json.loads(res.output)
    jsonschema.validate(data, cli.ROW_SCHEMA)
    schema = json.loads(run("schema").output)
    jsonschema.validate(data, schema)
    closed_only = json.loads(run("helicity-dist", "--family", "spin", "--a-min", 1, "--points", 1,
                                 "--format", "json").output)
    jsonschema.validate(closed_only, schema)
    assert closed_only[0]["closed_form"] is None


def test_rows_ascending_and_reproducible():
    args = ["scan-uncertainty", "--a-min", 0.05, "--a-max", 20, "--points", 4, "--axis", "z"]
    one = run(*args, env={"PHOTON_POVM_THREADS": "1"}).output
    many = run(*args, env={"PHOTON_POVM_THREADS": "4"}).output
    assert one == many
    a_col = [float(r["a"]) for r in rows(many)]
    assert a_col == sorted(a_col)


def test_config_overrides_flags(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"a_grid": {"min": 2.0, "max": 3.0, "points": 2, "scale": "linear"},
                               "state": {"family": "spin", "h": [[0, 0], [1, 0], [0, 0]]},
                               "quadrature": False, "axis": "z"}))
    res = run("scan-uncertainty", "--a-min", 0.5, "--family", "polarization", "--config", cfg)
    table = rows(res.output)
    assert sorted({float(r["a"]) for r in table}) == [2.0, 3.0]
    assert {r["axis"] for r in table} == {"z"}
    assert any(r["quantity"] == "product_published" for r in table)


def test_output_file(tmp_path):
    out = tmp_path / "rows.csv"
    res = run("helicity-dist", "--a-min", 1, "--points", 1, "--closed-only", "--output", out)
    assert res.output == ""
    assert out.read_text().splitlines()[0] == HEADER


@pytest.mark.parametrize("bad", [["--gamma", "[[1,0]]"], ["--a-min", -1], ["--axis", "w"],
                                 ["--a-min", 5, "--a-max", 1, "--points", 3]])
def test_bad_input_is_usage_error(bad):
    res = CliRunner().invoke(cli.main, ["scan-uncertainty", "--closed-only", *map(str, bad)])
    assert res.exit_code == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"colour": "blue"}')
    res = CliRunner().invoke(cli.main, ["spin-dist", "--config", str(cfg)])
    assert res.exit_code == 2


def test_tolerance_failure_reports_a():
    res = CliRunner().invoke(cli.main, ["scan-uncertainty", "--a-min", 0.7, "--points", 1, "--axis", "z",
                                        "--radial-nodes", 4, "--theta-nodes", 4, "--phi-nodes", 4,
                                        "--tol", 1e-14])
    assert res.exit_code == 1
    assert "a = 0.7" in res.output


def test_verify_only_filter_and_exit_codes():
    ok = run("verify", "--only", "extremize", "--only", "2", "--quiet")
    lines = [ln for ln in ok.output.splitlines() if ln.startswith("[")]
    assert [ln.split()[1] for ln in lines] == ["2.", "7.", "8."]
    only8 = run("verify", "--only", "8")
    assert only8.exit_code == 0
    assert "1/1 criteria passed" in only8.output
    spec_only = run("verify", "--only", "specfun", "--format", "json")
    numbers = [r["number"] for r in json.loads(spec_only.output)]
    assert numbers == [1, 2, 3, 4, 6, 7]


def test_verify_nonzero_on_failure(monkeypatch):
    from photon_povm import verify

    failing = verify.Criterion(1, "fails", ("specfun",), lambda spec: verify.CriterionResult(
        1, "fails", False, 1.0, 0.0, 0.0))
    monkeypatch.setattr(verify, "CRITERIA", (failing,))
    assert run("verify").exit_code == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "photon_povm", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "scan-uncertainty" in out.stdout
