"""Scenario files: YAML parsing, preset overlay, strict key checking, validation.

A scenario file is nested key/value YAML.  ``preset: A`` (or ``B1000``,
``B2800``) starts from one of the shipped preset files and overlays whatever
else the file sets.  Unknown keys are rejected with their line number.
"""
from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from .capacity import SeTable, SystemDesign
from .constellation import OrbitShell, ReceiverGrid
from .demand import TrafficModel
from .economics import (ARCH_ORDER, DEFAULT_MODIFIERS, ArchModifiers, Architecture, CostLedger,
                        LaunchModel)
from .errors import ParseError, ValidationError
from .interference import BeamLayout, GainPattern
from .propagation import AtmosParams, RainParams

PRESETS = {
    "A": "system_a.yaml",
    "B1000": "system_b_1000.yaml",
    "B2800": "system_b_2800.yaml",
}
_PRESET_ALIASES = {
    "a": "A", "system_a": "A", "systema": "A",
    "b1000": "B1000", "b_1000": "B1000", "system_b_1000": "B1000",
    "b2800": "B2800", "b_2800": "B2800", "system_b_2800": "B2800",
}

NUM = "number"
INT = "integer"
STR = "string"
PATH = "path"

_LEDGER_KEYS = {
    "launch_fixed", "payload_per_kg", "monolithic_gnb", "gs_equipment_per_link",
    "gs_antenna_per_link", "isl_per_link", "gs_build", "spectrum_acquisition", "platform_cost",
    "replenishment_per_sat_per_year", "replenishment_fraction", "regulation", "digital_infra",
    "marketing_per_year", "staff_per_year", "rnd_per_year", "maintenance_per_year",
    "spectrum_maintenance_per_year", "profit_margin", "backhaul_link_capacity_mbps",
    "links_per_gs", "ru_du_share", "cu_share",
}
_MODIFIER_SCHEMA = {"backhaul_factor": NUM, "gnb_cost_factor": NUM, "onboard_gnb_mass_kg": NUM,
                    "isls_per_sat": INT, "dus_per_cu": INT}

SCHEMA: dict[str, Any] = {
    "preset": STR,
    "name": STR,
    "system": {"name": STR, "num_beams": INT, "bandwidth_per_beam_mhz": NUM, "carrier_mhz": NUM,
               "eirp_dbw": NUM, "half_beamwidth_deg": NUM, "satellite_mass_kg": NUM},
    "shell": {"altitude_km": NUM, "num_orbits": INT, "sats_per_orbit": INT,
              "inclination_step_deg": NUM, "phase_offset_deg": NUM},
    "traffic": {"average_density_per_km2": NUM, "adoption_rate": NUM, "obf": NUM,
                "target_rate_mbps": NUM},
    "dimensioning": {"achieved_se": NUM},
    "propagation": {
        "k_const": NUM, "slant_range_km": NUM, "elevation_deg": NUM, "noise_figure_db": NUM,
        "temperature_k": NUM,
        "rain": {"rate_mm_per_h": NUM, "k_coeff": NUM, "gamma_exp": NUM, "path_scale": NUM},
        "atmosphere": {"zenith_att_db": NUM, "min_elevation_deg": NUM},
    },
    "interference": {"sidelobe_floor_linear": NUM, "main_lobe_half_angle_deg": NUM,
                     "top_n": INT, "sector_width_deg": NUM, "beam_width_deg": NUM},
    "grid": {"lat_step_deg": NUM, "lon_step_deg": NUM, "lat_min": NUM, "lat_max": NUM,
             "lon_min": NUM, "lon_max": NUM, "height_m": NUM},
    "economics": {
        "architectures": [STR],
        "discount_rate": NUM,
        "horizon_years": INT,
        "population": NUM,
        "backhaul_basis": STR,
        "launch": {"per_kg_rate": NUM, "fixed": NUM},
        "heavy_launch": {"per_kg_rate": NUM, "fixed": NUM},
        "ledger": {k: NUM for k in _LEDGER_KEYS} | {"links_per_gs": INT},
        "modifiers": {a.value: _MODIFIER_SCHEMA for a in Architecture},
    },
    "files": {"se_table": PATH, "regions": PATH},
}

BACKHAUL_BASES = ("population", "surface")


@dataclass(frozen=True)
class Scenario:
    name: str
    system: SystemDesign
    shell: OrbitShell
    traffic: TrafficModel
    average_density_per_km2: float
    achieved_se: float
    k_const: float
    slant_range_km: float
    elevation_deg: float
    noise_figure_db: float
    temperature_k: float
    rain: RainParams
    atmosphere: AtmosParams
    pattern: GainPattern
    layout: BeamLayout
    top_n: int
    grid: ReceiverGrid
    architectures: tuple[Architecture, ...]
    discount_rate: float
    horizon_years: int
    population: float
    backhaul_basis: str
    ledger: CostLedger
    launch: LaunchModel
    heavy_launch: LaunchModel
    modifiers: dict = field(hash=False, compare=False)
    se_table_path: Path = None
    regions_path: Optional[Path] = None
    raw: dict = field(default_factory=dict, hash=False, compare=False, repr=False)

    def se_table(self) -> SeTable:
        return SeTable.from_csv(self.se_table_path)


def preset_path(name: str) -> Path:
    key = _PRESET_ALIASES.get(str(name).strip().lower(), str(name).strip())
    if key not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    return Path(str(resources.files("d2dtea.data.presets").joinpath(PRESETS[key])))


# -- YAML with line numbers ------------------------------------------------

def _construct(node, path, lines):
    """Turn a composed YAML node into plain Python, recording key lines."""
    if isinstance(node, yaml.MappingNode):
        out = {}
        for knode, vnode in node.value:
            key = knode.value
            kpath = path + (key,)
            if key in out:
                raise ParseError("duplicate key", line=knode.start_mark.line + 1,
                                 field=".".join(kpath))
            lines[kpath] = knode.start_mark.line + 1
            out[key] = _construct(vnode, kpath, lines)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_construct(v, path + (i,), lines) for i, v in enumerate(node.value)]
    lines.setdefault(path, node.start_mark.line + 1)
    return _scalar(node)


def _scalar(node):
    loader = yaml.SafeLoader("")
    try:
        value = loader.construct_object(node, deep=True)
    finally:
        loader.dispose()
    # YAML 1.1 reads unsigned exponents such as 8.0e9 as strings
    if isinstance(value, str) and node.style is None:
        try:
            return float(value) if not value.lower().lstrip("+-").startswith(("inf", "nan")) \
                else value
        except ValueError:
            pass
    return value


def load_yaml(text: str, source: str = "<string>") -> tuple[dict, dict]:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(f"{source}: invalid YAML: {getattr(exc, 'problem', exc)}",
                         line=mark.line + 1 if mark else None) from None
    lines: dict = {}
    if root is None:
        return {}, lines
    if not isinstance(root, yaml.MappingNode):
        raise ParseError(f"{source}: top level must be a mapping", line=1)
    return _construct(root, (), lines), lines


# -- schema checking ------------------------------------------------------

def _check(data, schema, path, lines, source):
    if isinstance(schema, dict):
        if not isinstance(data, dict):
            raise ParseError(f"{source}: expected a mapping", line=lines.get(path),
                             field=".".join(map(str, path)))
        for key, value in data.items():
            kpath = path + (key,)
            if key not in schema:
                raise ParseError(f"{source}: unknown key {key!r}", line=lines.get(kpath),
                                 field=".".join(map(str, kpath)))
            _check(value, schema[key], kpath, lines, source)
        return
    if isinstance(schema, list):
        if not isinstance(data, list):
            raise ParseError(f"{source}: expected a list", line=lines.get(path),
                             field=".".join(map(str, path)))
        for i, item in enumerate(data):
            _check(item, schema[0], path + (i,), lines, source)
        return
    where = dict(line=lines.get(path), field=".".join(map(str, path)))
    if schema in (NUM, INT):
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            raise ParseError(f"{source}: expected a {schema}, got {data!r}", **where)
        if schema == INT and int(data) != data:
            raise ParseError(f"{source}: expected an integer, got {data!r}", **where)
        if isinstance(data, float) and math.isnan(data):
            raise ParseError(f"{source}: NaN is not allowed", **where)
    elif schema in (STR, PATH):
        if not isinstance(data, str):
            raise ParseError(f"{source}: expected a string, got {data!r}", **where)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _resolve_files(data: dict, base_dir: Path) -> dict:
    files = data.get("files")
    if isinstance(files, dict):
        for k, v in list(files.items()):
            if isinstance(v, str):
                p = Path(v)
                files[k] = str(p if p.is_absolute() else (base_dir / p).resolve())
    return data


def _load_file(path: Path) -> tuple[dict, dict]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read scenario {path}: {exc}") from exc
    data, lines = load_yaml(text, str(path))
    _check(data, SCHEMA, (), lines, str(path))
    return _resolve_files(data, path.parent), lines


def resolve_raw(path) -> dict:
    """Load a scenario file and overlay it on its preset, if any."""
    path = Path(path)
    data, _ = _load_file(path)
    if "preset" in data:
        base, _ = _load_file(preset_path(data["preset"]))
        base.pop("preset", None)
        data = _merge(base, data)
    return data


# -- building the typed scenario -----------------------------------------

def _get(data, *keys, default=None):
    cur = data
    for k in keys:
        if not isinstance(cur, dict) or k not in cur:
            return default
        cur = cur[k]
    return cur


def _require(data, *keys):
    v = _get(data, *keys)
    if v is None:
        raise ValidationError(f"missing required field {'.'.join(keys)}")
    return v


def _section(data, key, cls, required=()):
    sec = dict(_get(data, key, default={}) or {})
    for r in required:
        if r not in sec:
            raise ValidationError(f"missing required field {key}.{r}")
    try:
        return cls(**sec)
    except ValidationError as exc:
        raise ValidationError(f"{key}: {exc}") from None


def build_scenario(data: dict) -> Scenario:
    """Validate a resolved raw mapping and build the typed scenario."""
    _check(data, SCHEMA, (), {}, "scenario")
    system = _section(data, "system", SystemDesign, required=(
        "name", "num_beams", "bandwidth_per_beam_mhz", "carrier_mhz", "eirp_dbw",
        "half_beamwidth_deg", "satellite_mass_kg"))
    shell = _section(data, "shell", OrbitShell, required=(
        "altitude_km", "num_orbits", "sats_per_orbit", "inclination_step_deg"))

    traffic_raw = dict(_get(data, "traffic", default={}))
    density = traffic_raw.pop("average_density_per_km2", 181.0)
    if not density >= 0:
        raise ValidationError("traffic.average_density_per_km2 must be >= 0")
    try:
        traffic = TrafficModel(**traffic_raw)
    except ValidationError as exc:
        raise ValidationError(f"traffic: {exc}") from None

    achieved_se = _get(data, "dimensioning", "achieved_se", default=9.8366)
    if not achieved_se > 0:
        raise ValidationError("dimensioning.achieved_se must be > 0")

    prop = _get(data, "propagation", default={}) or {}
    rain_raw = dict(prop.get("rain", {}))
    base_rain = RainParams.for_carrier(system.carrier_mhz, rain_raw.get("rate_mm_per_h", 25.0))
    try:
        rain = RainParams(rain_raw.get("rate_mm_per_h", base_rain.rate_mm_per_h),
                          rain_raw.get("k_coeff", base_rain.k_coeff),
                          rain_raw.get("gamma_exp", base_rain.gamma_exp),
                          rain_raw.get("path_scale", 1.0))
        atmos = AtmosParams(**prop.get("atmosphere", {}))
    except ValidationError as exc:
        raise ValidationError(f"propagation: {exc}") from None
    slant = prop.get("slant_range_km", shell.altitude_km)
    elevation = prop.get("elevation_deg", 90.0)
    if not slant > 0:
        raise ValidationError("propagation.slant_range_km must be > 0")
    if not 0 < elevation <= 90:
        raise ValidationError("propagation.elevation_deg must lie in (0, 90]")
    if not prop.get("temperature_k", 290.0) > 0:
        raise ValidationError("propagation.temperature_k must be > 0")

    intf = dict(_get(data, "interference", default={}) or {})
    top_n = intf.pop("top_n", 5)
    if top_n < 1:
        raise ValidationError("interference.top_n must be >= 1")
    try:
        pattern = GainPattern(intf.get("sidelobe_floor_linear", 1e-3),
                              intf.get("main_lobe_half_angle_deg", 90.0))
        layout = BeamLayout(system.num_beams, intf.get("sector_width_deg", 90.0),
                            intf.get("beam_width_deg", 90.0))
    except ValidationError as exc:
        raise ValidationError(f"interference: {exc}") from None
    grid = _section(data, "grid", ReceiverGrid)

    econ = _get(data, "economics", default={}) or {}
    archs = tuple(Architecture.parse(a) for a in econ.get("architectures",
                                                          [a.value for a in ARCH_ORDER]))
    if not archs:
        raise ValidationError("economics.architectures must not be empty")
    if len(set(archs)) != len(archs):
        raise ValidationError("economics.architectures lists an architecture twice")
    archs = tuple(a for a in ARCH_ORDER if a in archs)
    rate = econ.get("discount_rate", 0.05)
    years = econ.get("horizon_years", 5)
    population = econ.get("population", 8.0e9)
    basis = econ.get("backhaul_basis", "population")
    if not rate >= 0:
        raise ValidationError("economics.discount_rate must be >= 0")
    if years < 1:
        raise ValidationError("economics.horizon_years must be >= 1")
    if not population > 0:
        raise ValidationError("economics.population must be > 0")
    if basis not in BACKHAUL_BASES:
        raise ValidationError(f"economics.backhaul_basis must be one of {BACKHAUL_BASES}")
    try:
        ledger = CostLedger(**econ.get("ledger", {}))
        launch_raw = dict(econ.get("launch", {}))
        launch_raw.setdefault("fixed", ledger.launch_fixed)
        launch = LaunchModel(**launch_raw)
        heavy_raw = dict(econ.get("heavy_launch", {"per_kg_rate": 200}))
        heavy_raw.setdefault("fixed", launch.fixed)
        heavy = LaunchModel(**heavy_raw)
        modifiers = {}
        for a in Architecture:
            base = asdict(DEFAULT_MODIFIERS[a]) | econ.get("modifiers", {}).get(a.value, {})
            modifiers[a] = ArchModifiers(**base)
    except ValidationError as exc:
        raise ValidationError(f"economics: {exc}") from None
    oran_total = float(ledger.ru_du_share + ledger.cu_share)
    if abs(oran_total - modifiers[Architecture.OpenRan3D].gnb_cost_factor) > 1e-12:
        raise ValidationError(
            f"ledger.ru_du_share + ledger.cu_share = {oran_total} must equal the OpenRan3D "
            f"gnb_cost_factor {modifiers[Architecture.OpenRan3D].gnb_cost_factor}")

    files = _get(data, "files", default={}) or {}
    se_path = Path(files["se_table"]) if "se_table" in files else \
        Path(str(resources.files("d2dtea.data").joinpath("se_table_38214.csv")))
    regions_path = Path(files["regions"]) if "regions" in files else None
    for label, p in (("files.se_table", se_path), ("files.regions", regions_path)):
        if p is not None and not p.is_file():
            raise ValidationError(f"{label}: file does not exist: {p}")

    return Scenario(
        name=str(data.get("name", system.name)), system=system, shell=shell, traffic=traffic,
        average_density_per_km2=float(density), achieved_se=float(achieved_se),
        k_const=float(prop.get("k_const", 32.45)), slant_range_km=float(slant),
        elevation_deg=float(elevation), noise_figure_db=float(prop.get("noise_figure_db", 7.0)),
        temperature_k=float(prop.get("temperature_k", 290.0)), rain=rain, atmosphere=atmos,
        pattern=pattern, layout=layout, top_n=int(top_n), grid=grid, architectures=archs,
        discount_rate=float(rate), horizon_years=int(years), population=float(population),
        backhaul_basis=basis, ledger=ledger, launch=launch, heavy_launch=heavy,
        modifiers=modifiers, se_table_path=se_path, regions_path=regions_path, raw=data,
    )


def parse_scenario(path) -> Scenario:
    """Parse, overlay on preset, and validate a scenario file.

    ``path`` may also be a bare preset name (``A``, ``B1000``, ``B2800``) when
    no file of that name exists.
    """
    p = Path(path)
    if not p.exists() and str(path).strip().lower() in _PRESET_ALIASES:
        p = preset_path(path)
    return build_scenario(resolve_raw(p))


def with_override(scenario: Scenario, dotted: str, value) -> Scenario:
    """Copy of ``scenario`` with one numeric field replaced, re-validated."""
    keys = dotted.split(".")
    node = SCHEMA
    for k in keys:
        if not isinstance(node, dict) or k not in node:
            raise ValidationError(f"unknown parameter path {dotted!r}")
        node = node[k]
    if node not in (NUM, INT):
        raise ValidationError(f"parameter {dotted!r} is not numeric")
    data = copy.deepcopy(scenario.raw)
    cur = data
    for k in keys[:-1]:
        cur = cur.setdefault(k, {})
    cur[keys[-1]] = value
    return build_scenario(data)
