"""SINR, spectral efficiency and the beam -> satellite -> km^2 -> user chain."""
from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .constellation import EARTH, EarthModel
from .errors import (NonPositiveCapacity, ParseError, ValidationError, ZeroDensity,
                     ZeroFootprint)
from .propagation import LinkBudget, db_to_linear

DEFAULT_SE_TABLE = "se_table_38214.csv"
CALIBRATION_SE_TABLE = "se_table_calibration.csv"


@dataclass(frozen=True)
class SeRow:
    min_sinr_db: float
    se_bps_per_hz: float
    label: str


class SeTable:
    """Right-continuous step map from SINR (dB) to spectral efficiency."""

    def __init__(self, rows: Sequence[SeRow]):
        rows = list(rows)
        if not rows or rows[0].min_sinr_db != -math.inf or rows[0].se_bps_per_hz != 0.0:
            raise ValidationError("SE table must start with a (-inf, 0) outage sentinel row")
        for prev, row in zip(rows, rows[1:]):
            if not row.min_sinr_db > prev.min_sinr_db:
                raise ValidationError(
                    f"SE table thresholds must strictly increase ({row.label!r})")
            if not row.se_bps_per_hz > prev.se_bps_per_hz:
                raise ValidationError(f"SE table values must strictly increase ({row.label!r})")
        self.rows = tuple(rows)
        self._thresholds = [r.min_sinr_db for r in rows]

    def __len__(self):
        return len(self.rows)

    @property
    def thresholds(self) -> list[float]:
        """Finite switching points, ascending."""
        return self._thresholds[1:]

    def lookup(self, sinr_db: float) -> SeRow:
        i = bisect.bisect_right(self._thresholds, sinr_db) - 1
        return self.rows[max(i, 0)]

    @classmethod
    def from_csv(cls, path) -> "SeTable":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read SE table {path}: {exc}") from exc
        return cls.from_text(text, source=str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "SeTable":
        reader = csv.reader(text.splitlines())
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["min_sinr_db", "se", "label"]:
            raise ParseError(f"{source}: header must be 'min_sinr_db,se,label'", line=1)
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != 3:
                raise ParseError(f"{source}: expected 3 columns, got {len(rec)}", line=lineno)
            try:
                thr = float(rec[0])
                se = float(rec[1])
            except ValueError as exc:
                raise ParseError(f"{source}: {exc}", line=lineno) from exc
            if math.isnan(thr) or not math.isfinite(se) or se < 0:
                raise ParseError(f"{source}: bad threshold or SE value", line=lineno)
            rows.append(SeRow(thr, se, rec[2].strip()))
        return cls(rows)

    @classmethod
    def builtin(cls, name: str = DEFAULT_SE_TABLE) -> "SeTable":
        text = resources.files("d2dtea.data").joinpath(name).read_text()
        return cls.from_text(text, source=name)


@dataclass(frozen=True)
class SystemDesign:
    name: str
    num_beams: int
    bandwidth_per_beam_mhz: float
    carrier_mhz: float
    eirp_dbw: float
    half_beamwidth_deg: float
    satellite_mass_kg: float

    def __post_init__(self):
        if int(self.num_beams) != self.num_beams or self.num_beams < 1:
            raise ValidationError(f"num_beams must be an integer >= 1, got {self.num_beams}")
        for name in ("bandwidth_per_beam_mhz", "carrier_mhz", "half_beamwidth_deg",
                     "satellite_mass_kg"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0")
        if not math.isfinite(self.eirp_dbw):
            raise ValidationError("eirp_dbw must be finite")


@dataclass(frozen=True)
class CapacityResult:
    sinr_db: float
    se: float
    beam_cap_mbps: float
    sat_cap_mbps: float
    area_cap_mbps_per_km2: float
    user_cap_mbps: float


def sinr_db(link: LinkBudget, interference_w: float) -> float:
    if interference_w < 0:
        raise ValueError("interference power must be >= 0")
    signal = db_to_linear(link.received_dbw)
    return 10.0 * math.log10(signal / (db_to_linear(link.noise_dbw) + interference_w))


def se_from_sinr(sinr: float, table: SeTable) -> float:
    return table.lookup(sinr).se_bps_per_hz


def beam_capacity_mbps(se: float, bandwidth_mhz: float) -> float:
    if se < 0 or bandwidth_mhz <= 0:
        raise ValueError("need se >= 0 and bandwidth > 0")
    return se * bandwidth_mhz


def satellite_capacity_mbps(beam_cap: float, num_beams: int) -> float:
    if num_beams < 1:
        raise ValueError("num_beams must be >= 1")
    return num_beams * beam_cap


def area_capacity(sat_cap_mbps: float, footprint_km2: float) -> float:
    if footprint_km2 <= 0:
        raise ZeroFootprint("footprint area must be > 0")
    return sat_cap_mbps / footprint_km2


def user_capacity(area_cap: float, active_density: float) -> float:
    if active_density <= 0:
        raise ZeroDensity("active user density must be > 0")
    return area_cap / active_density


def capacity_chain(link: LinkBudget, interference_w: float, design: SystemDesign,
                   table: SeTable, footprint_km2: float,
                   active_density: float) -> CapacityResult:
    s = sinr_db(link, interference_w)
    se = se_from_sinr(s, table)
    beam = beam_capacity_mbps(se, design.bandwidth_per_beam_mhz)
    sat = satellite_capacity_mbps(beam, design.num_beams)
    area = area_capacity(sat, footprint_km2)
    return CapacityResult(s, se, beam, sat, area, user_capacity(area, active_density))


def total_demand_mbps(active_density: float, target_rate_mbps: float,
                      earth: EarthModel = EARTH) -> float:
    return earth.surface_area_km2 * active_density * target_rate_mbps


def required_satellites(target_rate_mbps: float, active_density: float,
                        design: SystemDesign, achieved_se: float,
                        earth: EarthModel = EARTH) -> int:
    """Fewest satellites whose pooled capacity covers the global demand.

    Demand is the whole Earth surface times active density times the
    guaranteed rate; supply per satellite is beams x bandwidth x SE.
    """
    if achieved_se <= 0:
        raise NonPositiveCapacity("achieved spectral efficiency must be > 0")
    if target_rate_mbps <= 0 or active_density <= 0:
        raise ValueError("target rate and active density must be > 0")
    per_sat = design.num_beams * design.bandwidth_per_beam_mhz * achieved_se
    ratio = total_demand_mbps(active_density, target_rate_mbps, earth) / per_sat
    nearest = round(ratio)
    # absorb float noise when demand is an exact multiple of capacity
    if abs(ratio - nearest) <= 1e-9 * max(1.0, ratio):
        return max(int(nearest), 1)
    return max(math.ceil(ratio), 1)
