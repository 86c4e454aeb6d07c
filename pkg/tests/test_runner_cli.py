import json
from decimal import Decimal

import pytest

from d2dtea import __version__
from d2dtea.cli import main
from d2dtea.errors import ValidationError
from d2dtea.runner import SweepSpec, compute, metrics, run, sweep


def read(p):
    return p.read_bytes()


def test_run_writes_reports(tmp_path, presets):
    files = run(presets["A"], tmp_path)
    names = sorted(p.name for p in files)
    assert names == ["capacity.csv", "economics.csv", "regions.csv", "summary.json"]
    lines = (tmp_path / "economics.csv").read_text().splitlines()
    assert [l.split(",")[1] for l in lines[1:]] == ["BentPipe", "Regenerative", "OpenRan3D"]


def test_run_deterministic(tmp_path, presets):
    run(presets["A"], tmp_path / "a")
    run(presets["A"], tmp_path / "b")
    for name in ("capacity.csv", "economics.csv", "regions.csv", "summary.json"):
        assert read(tmp_path / "a" / name) == read(tmp_path / "b" / name)


def test_summary_ledger_traceable(tmp_path, presets):
    run(presets["B2800"], tmp_path, "json")
    assert not (tmp_path / "economics.csv").exists()
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["version"] == __version__
    assert s["dimensioning"]["required_satellites"] == pytest.approx(3351, rel=0.01)
    for block in s["economics"]["baseline_launch"] + s["economics"]["heavy_launch"]:
        capex = sum(Decimal(i["amount"]) for i in block["items"] if i["kind"] == "capex")
        opex = sum(Decimal(i["amount"]) for i in block["items"] if i["kind"] == "opex")
        assert capex == Decimal(block["capex"])
        assert opex == Decimal(block["opex_annual"])


def test_regions_report(result_a):
    assert [r.region_id for r in result_a.regions] == sorted(r.region_id
                                                             for r in result_a.regions)
    assert any(r.uncontended for r in result_a.regions)


def test_single_value_sweep_matches_run(presets, grid_cache):
    rows = sweep(presets["A"], SweepSpec("system.num_beams", (64,)))
    m = metrics(compute(presets["A"], grid_cache))
    assert rows[0]["system.num_beams"] == 64
    for k, v in m.items():
        if k != "system.num_beams":
            assert rows[0][k] == v


def test_sweep_rows_in_input_order(presets):
    rows = sweep(presets["A"], SweepSpec("system.num_beams", (2800, 1000),
                                         ("inter_beam_w",)))
    assert [r["system.num_beams"] for r in rows] == [2800, 1000]
    assert rows[0]["inter_beam_w"] > rows[1]["inter_beam_w"]
    assert list(rows[0]) == ["system.num_beams", "inter_beam_w"]


def test_sweep_hold_total(presets):
    rows = sweep(presets["A"], SweepSpec("shell.num_orbits", (2, 5), ("sats_per_orbit",), True))
    assert [r["sats_per_orbit"] for r in rows] == [250, 100]
    with pytest.raises(ValidationError):
        sweep(presets["A"], SweepSpec("shell.num_orbits", (3,), (), True))


def test_sweep_spec_validation(presets):
    with pytest.raises(ValidationError):
        SweepSpec("system.name", (1,))
    with pytest.raises(ValidationError):
        SweepSpec("system.num_beams", ())
    with pytest.raises(ValidationError):
        SweepSpec("system.num_beams", (1,), (), True)
    with pytest.raises(ValidationError):
        sweep(presets["A"], SweepSpec("system.num_beams", (1,), ("nope",)))


def test_cli_run_and_validate(tmp_path, capsys):
    assert main(["validate", "--scenario", "A"]) == 0
    assert "system_a" in capsys.readouterr().out
    assert main(["run", "--scenario", "B1000", "--out", str(tmp_path), "--format", "csv"]) == 0
    assert (tmp_path / "capacity.csv").exists()


def test_cli_sweep_and_compare(tmp_path):
    assert main(["sweep", "--scenario", "A", "--param", "system.num_beams", "--values", "1,2",
                 "--columns", "se", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "sweep.csv").read_text().splitlines()[0] == "system.num_beams,se"
    assert main(["compare-arch", "--scenario", "A", "--scenario", "B2800",
                 "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "compare_arch.csv").read_text().splitlines()) == 7


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("preset: A\nsystem:\n  bemwidth: 1\n")
    assert main(["validate", "--scenario", str(bad)]) == 1
    assert "bemwidth" in capsys.readouterr().err
    assert main(["validate", "--scenario", str(tmp_path / "missing.yaml")]) == 1
    zero = tmp_path / "zero.yaml"
    zero.write_text("preset: A\ntraffic:\n  average_density_per_km2: 0\n")
    assert main(["run", "--scenario", str(zero), "--out", str(tmp_path / "o")]) == 2
