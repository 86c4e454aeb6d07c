"""End-to-end pipeline: link budget, interference, capacity, dimensioning, economics.

Everything here is deterministic.  Reports are written with fixed column
order, ``repr`` floats and ``str`` decimals so two runs on the same inputs
produce identical bytes.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .capacity import CapacityResult, capacity_chain, required_satellites, total_demand_mbps
from .constellation import build_constellation, footprint_area_km2
from .demand import RegionCapacity, active_user_density, load_regions, regional_report
from .economics import EconResult, evaluate_architecture
from .errors import ValidationError
from .interference import covered_mean, grid_inter_satellite, inter_beam_interference_w
from .propagation import LinkBudget, link_budget
from .scenario import SCHEMA, Scenario, with_override

FORMATS = ("csv", "json", "both")


@dataclass(frozen=True)
class GridSummary:
    inter_satellite_w: float
    cells: int
    covered_cells: int


@dataclass(frozen=True)
class EconomicsReport:
    required_satellites: int
    backhaul_demand_mbps: float
    baseline: tuple[EconResult, ...]
    heavy: tuple[EconResult, ...]


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    active_density: float
    link: LinkBudget
    grid: GridSummary
    inter_beam_w: float
    footprint_km2: float
    capacity: CapacityResult
    economics: EconomicsReport
    regions: Optional[tuple[RegionCapacity, ...]]


class GridCache:
    """Memoises grid-mean inter-satellite interference across sweep points."""

    def __init__(self):
        self._store: dict = {}

    def get(self, sc: Scenario) -> GridSummary:
        key = (sc.shell, sc.grid, sc.system.eirp_dbw, sc.system.carrier_mhz, sc.pattern,
               sc.top_n, sc.k_const)
        if key not in self._store:
            sats = build_constellation(sc.shell)
            cells = grid_inter_satellite(sc.grid.receivers(), sats, sc.system.eirp_dbw,
                                         sc.system.carrier_mhz, sc.pattern, sc.top_n,
                                         sc.k_const)
            self._store[key] = GridSummary(covered_mean(cells), len(cells),
                                           sum(c.covered for c in cells))
        return self._store[key]


def reference_link(sc: Scenario) -> LinkBudget:
    return link_budget(sc.slant_range_km, sc.system.carrier_mhz, sc.system.eirp_dbw,
                       sc.system.bandwidth_per_beam_mhz * 1e6, sc.rain, sc.atmosphere,
                       sc.elevation_deg, sc.noise_figure_db, sc.temperature_k, sc.k_const)


def backhaul_demand_mbps(sc: Scenario, active_density: float) -> float:
    """Aggregate feeder traffic used to size ground stations."""
    t = sc.traffic
    if sc.backhaul_basis == "surface":
        return total_demand_mbps(active_density, t.target_rate_mbps)
    return sc.population * t.adoption_rate / t.obf * t.target_rate_mbps


def economics_report(sc: Scenario) -> EconomicsReport:
    density = active_user_density(sc.average_density_per_km2, sc.traffic)
    n_sats = required_satellites(sc.traffic.target_rate_mbps, density, sc.system,
                                 sc.achieved_se)
    demand = backhaul_demand_mbps(sc, density)

    def evaluate(lm):
        return tuple(evaluate_architecture(sc.system, n_sats, arch, sc.ledger, lm, demand,
                                           sc.population, sc.traffic, sc.discount_rate,
                                           sc.horizon_years, sc.modifiers)
                     for arch in sc.architectures)

    return EconomicsReport(n_sats, demand, evaluate(sc.launch), evaluate(sc.heavy_launch))


def compute(sc: Scenario, cache: Optional[GridCache] = None) -> RunResult:
    cache = cache or GridCache()
    density = active_user_density(sc.average_density_per_km2, sc.traffic)
    link = reference_link(sc)
    grid = cache.get(sc)
    int_b = inter_beam_interference_w(sc.layout, sc.system.eirp_dbw, link.path_loss_db,
                                      sc.pattern)
    footprint = footprint_area_km2(sc.shell.altitude_km, sc.system.half_beamwidth_deg)
    cap = capacity_chain(link, grid.inter_satellite_w + int_b, sc.system, sc.se_table(),
                         footprint, density)
    regions = None
    if sc.regions_path is not None:
        regions = tuple(regional_report(load_regions(sc.regions_path), sc.traffic,
                                        cap.area_cap_mbps_per_km2))
    return RunResult(sc, density, link, grid, int_b, footprint, cap, economics_report(sc),
                     regions)


# -- flat metrics ---------------------------------------------------------

_ECON_FIELDS = ("capex", "opex_annual", "npv", "cost_per_sub_monthly", "price_monthly", "roi")


def heavy_reduction_pct(base: EconResult, heavy: EconResult) -> float:
    return 100.0 * (base.cost_per_sub_monthly - heavy.cost_per_sub_monthly) \
        / base.cost_per_sub_monthly


def capacity_row(r: RunResult) -> dict:
    sc, link, cap = r.scenario, r.link, r.capacity
    return {
        "scenario": sc.name,
        "num_beams": sc.system.num_beams,
        "bandwidth_per_beam_mhz": sc.system.bandwidth_per_beam_mhz,
        "carrier_mhz": sc.system.carrier_mhz,
        "num_orbits": sc.shell.num_orbits,
        "sats_per_orbit": sc.shell.sats_per_orbit,
        "slant_range_km": link.distance_km,
        "path_loss_db": link.path_loss_db,
        "rain_att_db": link.rain_att_db,
        "atmos_att_db": link.atmos_att_db,
        "noise_dbw": link.noise_dbw,
        "received_dbw": link.received_dbw,
        "inter_satellite_w": r.grid.inter_satellite_w,
        "inter_beam_w": r.inter_beam_w,
        "total_interference_w": r.grid.inter_satellite_w + r.inter_beam_w,
        "grid_cells": r.grid.cells,
        "covered_cells": r.grid.covered_cells,
        "sinr_db": cap.sinr_db,
        "se": cap.se,
        "beam_cap_mbps": cap.beam_cap_mbps,
        "sat_cap_mbps": cap.sat_cap_mbps,
        "footprint_km2": r.footprint_km2,
        "area_cap_mbps_per_km2": cap.area_cap_mbps_per_km2,
        "active_density_per_km2": r.active_density,
        "user_cap_mbps": cap.user_cap_mbps,
        "achieved_se": sc.achieved_se,
        "required_satellites": r.economics.required_satellites,
    }


def economics_rows(scenario_name: str, econ: EconomicsReport) -> list[dict]:
    rows = []
    for base, heavy in zip(econ.baseline, econ.heavy):
        row = {"scenario": scenario_name, "architecture": base.architecture,
               "required_satellites": econ.required_satellites,
               "backhaul_demand_mbps": econ.backhaul_demand_mbps}
        row.update({f: getattr(base, f) for f in _ECON_FIELDS})
        row["subscribers"] = base.subscribers
        row["heavy_capex"] = heavy.capex
        row["heavy_cost_per_sub_monthly"] = heavy.cost_per_sub_monthly
        row["heavy_reduction_pct"] = heavy_reduction_pct(base, heavy)
        rows.append(row)
    return rows


def metrics(r: RunResult) -> dict:
    """Every scalar output keyed by column name, used for sweep tables."""
    out = capacity_row(r)
    for row in economics_rows(r.scenario.name, r.economics):
        arch = row["architecture"]
        for k in _ECON_FIELDS + ("heavy_cost_per_sub_monthly", "heavy_reduction_pct"):
            out[f"{arch}.{k}"] = row[k]
    return out


# -- writers --------------------------------------------------------------

def money_str(d: Decimal) -> str:
    """Plain fixed-point text without trailing zeros; exact."""
    return format(d.normalize(), "f")


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Decimal):
        return money_str(v)
    return str(v)


def write_csv(path: Path, rows: Sequence[dict], columns: Optional[Sequence[str]] = None):
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c, "")) for c in columns])


def _jsonable(v):
    if isinstance(v, Decimal):
        return money_str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_json(path: Path, obj):
    text = json.dumps(_jsonable(obj), indent=2, allow_nan=False)
    Path(path).write_text(text + "\n")


def _econ_json(res: EconResult) -> dict:
    return {
        "architecture": res.architecture,
        "capex": res.capex,
        "opex_annual": res.opex_annual,
        "npv": res.npv,
        "subscribers": res.subscribers,
        "cost_per_sub_monthly": res.cost_per_sub_monthly,
        "price_monthly": res.price_monthly,
        "revenue_npv": res.revenue_npv,
        "roi": res.roi,
        "items": [{"name": i.name, "kind": i.kind, "amount": i.amount, "basis": i.basis}
                  for i in res.items],
    }


def summary(r: RunResult) -> dict:
    cap = capacity_row(r)
    return {
        "tool": "d2dtea",
        "version": __version__,
        "scenario": r.scenario.name,
        "link": {k: cap[k] for k in ("slant_range_km", "path_loss_db", "rain_att_db",
                                     "atmos_att_db", "noise_dbw", "received_dbw")},
        "interference": {k: cap[k] for k in ("inter_satellite_w", "inter_beam_w",
                                             "total_interference_w", "grid_cells",
                                             "covered_cells")},
        "capacity": {k: cap[k] for k in ("sinr_db", "se", "beam_cap_mbps", "sat_cap_mbps",
                                         "footprint_km2", "area_cap_mbps_per_km2",
                                         "active_density_per_km2", "user_cap_mbps")},
        "dimensioning": {"achieved_se": r.scenario.achieved_se,
                         "required_satellites": r.economics.required_satellites},
        "economics": {
            "discount_rate": r.scenario.discount_rate,
            "horizon_years": r.scenario.horizon_years,
            "population": r.scenario.population,
            "backhaul_basis": r.scenario.backhaul_basis,
            "backhaul_demand_mbps": r.economics.backhaul_demand_mbps,
            "baseline_launch": [_econ_json(e) for e in r.economics.baseline],
            "heavy_launch": [_econ_json(e) for e in r.economics.heavy],
        },
    }


def region_rows(r: RunResult) -> list[dict]:
    return [{"region_id": rc.region_id, "active_density_per_km2": rc.active_density,
             "user_cap_mbps": "" if rc.uncontended else rc.user_capacity_mbps,
             "uncontended": str(rc.uncontended).lower()}
            for rc in r.regions or ()]


def _check_format(fmt: str):
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {FORMATS}")


def run(sc: Scenario, out_dir, fmt: str = "both") -> list[Path]:
    """Run the full pipeline and write reports into ``out_dir``."""
    _check_format(fmt)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    r = compute(sc)
    written = []
    if fmt in ("csv", "both"):
        write_csv(out / "capacity.csv", [capacity_row(r)])
        write_csv(out / "economics.csv", economics_rows(sc.name, r.economics))
        written += [out / "capacity.csv", out / "economics.csv"]
        if r.regions is not None:
            write_csv(out / "regions.csv", region_rows(r),
                      ["region_id", "active_density_per_km2", "user_cap_mbps", "uncontended"])
            written.append(out / "regions.csv")
    if fmt in ("json", "both"):
        write_json(out / "summary.json", summary(r))
        written.append(out / "summary.json")
    return written


# -- sweeps ---------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    columns: tuple = ()
    hold_total_satellites: bool = False

    def __post_init__(self):
        node = SCHEMA
        for k in self.parameter.split("."):
            if not isinstance(node, dict) or k not in node:
                raise ValidationError(f"sweep parameter {self.parameter!r} is not a scenario field")
            node = node[k]
        if node not in ("number", "integer"):
            raise ValidationError(f"sweep parameter {self.parameter!r} is not numeric")
        if not self.values:
            raise ValidationError("sweep needs at least one value")
        if self.hold_total_satellites and self.parameter != "shell.num_orbits":
            raise ValidationError("hold_total_satellites only applies to shell.num_orbits")


def _sweep_point(sc: Scenario, spec: SweepSpec, value) -> Scenario:
    if spec.hold_total_satellites:
        total = sc.shell.num_satellites
        if value < 1 or total % value:
            raise ValidationError(f"{total} satellites cannot be split evenly over {value} orbits")
        sc = with_override(sc, "shell.sats_per_orbit", total // value)
    return with_override(sc, spec.parameter, value)


def sweep(sc: Scenario, spec: SweepSpec) -> list[dict]:
    """One row per sweep value, in input order."""
    cache = GridCache()
    rows = []
    for value in spec.values:
        m = metrics(compute(_sweep_point(sc, spec, value), cache))
        cols = spec.columns or tuple(m)
        unknown = [c for c in cols if c not in m]
        if unknown:
            raise ValidationError(f"unknown sweep columns {unknown}; available: {list(m)}")
        row = {spec.parameter: value}
        row.update({c: m[c] for c in cols if c != spec.parameter})
        rows.append(row)
    return rows


def write_table(rows: Sequence[dict], out_dir, stem: str, fmt: str = "both") -> list[Path]:
    _check_format(fmt)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        write_csv(out / f"{stem}.csv", rows)
        written.append(out / f"{stem}.csv")
    if fmt in ("json", "both"):
        write_json(out / f"{stem}.json", {"tool": "d2dtea", "version": __version__,
                                          "rows": list(rows)})
        written.append(out / f"{stem}.json")
    return written


def compare_architectures(scenarios: Sequence[Scenario]) -> list[dict]:
    rows = []
    for sc in scenarios:
        rows += economics_rows(sc.name, economics_report(sc))
    return rows

