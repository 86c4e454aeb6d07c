"""Regional population ingestion and the active-user traffic model."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import ParseError, ValidationError

REGION_COLUMNS = ("region_id", "name", "country", "area_km2", "population", "density_per_km2")


@dataclass(frozen=True)
class Region:
    region_id: str
    name: str
    country: str
    area_km2: float
    population: float
    density_per_km2: float

    def __post_init__(self):
        if not self.area_km2 > 0:
            raise ValidationError(f"region {self.region_id}: area_km2 must be > 0")
        if self.population < 0 or self.density_per_km2 < 0:
            raise ValidationError(f"region {self.region_id}: population and density must be >= 0")
        implied = self.population / self.area_km2
        if abs(self.density_per_km2 - implied) > 1e-6 * self.density_per_km2:
            raise ValidationError(
                f"region {self.region_id}: density {self.density_per_km2} disagrees with "
                f"population/area = {implied}")


@dataclass(frozen=True)
class TrafficModel:
    adoption_rate: float = 0.02
    obf: float = 20.0
    target_rate_mbps: float = 10.0

    def __post_init__(self):
        if not 0.0 <= self.adoption_rate <= 1.0:
            raise ValidationError("adoption_rate must lie in [0, 1]")
        if not self.obf >= 1.0:
            raise ValidationError("obf must be >= 1 (obf ≥ 1)")
        if not self.target_rate_mbps > 0:
            raise ValidationError("target_rate_mbps must be > 0")


def _parse_float(value: str, column: str, lineno: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ParseError(f"not a number: {value!r}", line=lineno, field=column) from None
    if math.isnan(x):
        raise ParseError("NaN is not allowed", line=lineno, field=column)
    return x


def load_regions(source) -> list[Region]:
    """Read regions from a CSV path, a text stream, or CSV text containing a newline.

    The ``density_per_km2`` column is optional; when missing or blank it is
    computed as population / area.
    """
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source
    else:
        try:
            text = Path(source).read_text()
        except (OSError, TypeError) as exc:
            raise ParseError(f"cannot read regions from {source!r}: {exc}") from exc

    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return []
    header = [h.strip() for h in reader.fieldnames]
    missing = [c for c in REGION_COLUMNS[:5] if c not in header]
    if missing:
        raise ParseError(f"regions header is missing columns {missing}", line=1)
    unknown = [c for c in header if c not in REGION_COLUMNS]
    if unknown:
        raise ParseError(f"regions header has unknown columns {unknown}", line=1)

    regions = []
    for lineno, raw in enumerate(reader, start=2):
        row = {k.strip(): (v or "").strip() for k, v in raw.items() if k is not None}
        if None in raw:
            raise ParseError("too many fields", line=lineno)
        area = _parse_float(row["area_km2"], "area_km2", lineno)
        if area <= 0:
            raise ValidationError(f"line {lineno}: region {row['region_id']!r} has "
                                  f"non-positive area_km2 {area}")
        pop = _parse_float(row["population"], "population", lineno)
        dens_txt = row.get("density_per_km2", "")
        dens = _parse_float(dens_txt, "density_per_km2", lineno) if dens_txt else pop / area
        try:
            regions.append(Region(row["region_id"], row["name"], row["country"], area, pop, dens))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    return regions


def active_user_density(avg_density: float, t: TrafficModel) -> float:
    """Simultaneously active users per km^2 at peak."""
    if avg_density < 0:
        raise ValueError("average density must be >= 0")
    return avg_density * t.adoption_rate / t.obf


@dataclass(frozen=True)
class RegionCapacity:
    region_id: str
    active_density: float
    user_capacity_mbps: Optional[float]

    @property
    def uncontended(self) -> bool:
        return self.user_capacity_mbps is None


def regional_report(regions: Iterable[Region], t: TrafficModel,
                    per_km2_supply: float) -> list[RegionCapacity]:
    """Per-region user capacity under uniform supply, ordered by region_id.

    Regions without active users get ``user_capacity_mbps=None`` and are
    flagged uncontended.
    """
    if per_km2_supply < 0:
        raise ValueError("per-km^2 supply must be >= 0")
    out = []
    for r in sorted(regions, key=lambda r: r.region_id):
        dens = active_user_density(r.density_per_km2, t)
        cap = per_km2_supply / dens if dens > 0 else None
        out.append(RegionCapacity(r.region_id, dens, cap))
    return out
