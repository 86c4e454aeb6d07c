"""Uniform LEO constellation geometry.

Satellites sit on circular orbits, evenly spaced by arc length inside each
plane.  Plane 0 is equatorial; plane ``k`` is plane 0 rotated about the
Earth-frame x axis by ``k * inclination_step_deg``.  Everything here is a
static snapshot: no orbit propagation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidBeamwidth, NoVisibleSatellite, ValidationError

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class EarthModel:
    radius_km: float = EARTH_RADIUS_KM

    @property
    def surface_area_km2(self) -> float:
        return 4.0 * math.pi * self.radius_km ** 2


EARTH = EarthModel()


@dataclass(frozen=True)
class OrbitShell:
    altitude_km: float
    num_orbits: int
    sats_per_orbit: int
    inclination_step_deg: float
    phase_offset_deg: float = 0.0

    def __post_init__(self):
        if not 150.0 <= self.altitude_km <= 2000.0:
            raise ValidationError(
                f"altitude_km must lie in [150, 2000], got {self.altitude_km}")
        if int(self.num_orbits) != self.num_orbits or self.num_orbits < 1:
            raise ValidationError(f"num_orbits must be an integer >= 1, got {self.num_orbits}")
        if int(self.sats_per_orbit) != self.sats_per_orbit or self.sats_per_orbit < 1:
            raise ValidationError(
                f"sats_per_orbit must be an integer >= 1, got {self.sats_per_orbit}")
        if not math.isfinite(self.inclination_step_deg):
            raise ValidationError("inclination_step_deg must be finite")

    @property
    def num_satellites(self) -> int:
        return self.num_orbits * self.sats_per_orbit


@dataclass(frozen=True)
class SatellitePosition:
    orbit_index: int
    slot_index: int
    position: tuple[float, float, float]

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.position, dtype=float)


@dataclass(frozen=True)
class GroundReceiver:
    latitude_deg: float
    longitude_deg: float
    height_m: float = 1.0

    def __post_init__(self):
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValidationError(f"latitude must lie in [-90, 90], got {self.latitude_deg}")
        if not -180.0 <= self.longitude_deg <= 180.0:
            raise ValidationError(f"longitude must lie in [-180, 180], got {self.longitude_deg}")
        if self.height_m < 0:
            raise ValidationError(f"height_m must be >= 0, got {self.height_m}")

    def zenith(self) -> np.ndarray:
        """Unit vector pointing straight up from the receiver."""
        lat = math.radians(self.latitude_deg)
        lon = math.radians(self.longitude_deg)
        return np.array([math.cos(lat) * math.cos(lon),
                         math.cos(lat) * math.sin(lon),
                         math.sin(lat)])

    def position(self, earth: EarthModel = EARTH) -> np.ndarray:
        return self.zenith() * (earth.radius_km + self.height_m / 1000.0)


def _rotation_x(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, c, -s],
                     [0.0, s, c]])


def build_constellation(shell: OrbitShell, earth: EarthModel = EARTH) -> list[SatellitePosition]:
    """Place ``num_orbits * sats_per_orbit`` satellites on the shell.

    Output order is orbit-major, slot-minor.  That order doubles as the
    tie-break order everywhere a "lowest (orbit, slot)" rule applies.
    """
    radius = earth.radius_km + shell.altitude_km
    sats = []
    for k in range(shell.num_orbits):
        rot = _rotation_x(k * shell.inclination_step_deg)
        for j in range(shell.sats_per_orbit):
            phase = math.radians(j * 360.0 / shell.sats_per_orbit + k * shell.phase_offset_deg)
            p = rot @ np.array([radius * math.cos(phase), radius * math.sin(phase), 0.0])
            sats.append(SatellitePosition(k, j, (float(p[0]), float(p[1]), float(p[2]))))
    return sats


def positions_array(sats: Sequence[SatellitePosition]) -> np.ndarray:
    """Stack satellite positions into an ``(n, 3)`` array (km)."""
    if len(sats) == 0:
        return np.zeros((0, 3))
    return np.array([s.position for s in sats], dtype=float)


def visibility_mask(receiver: GroundReceiver, positions: np.ndarray,
                    earth: EarthModel = EARTH) -> np.ndarray:
    rx = receiver.position(earth)
    return (positions - rx) @ receiver.zenith() > 0.0


def visible_satellites(receiver: GroundReceiver, sats: Sequence[SatellitePosition],
                       earth: EarthModel = EARTH) -> list[SatellitePosition]:
    """Satellites strictly above the receiver's local horizon plane."""
    if len(sats) == 0:
        raise ValueError("satellite list must be non-empty")
    mask = visibility_mask(receiver, positions_array(sats), earth)
    return [s for s, m in zip(sats, mask) if m]


def slant_range_km(receiver: GroundReceiver, sat: SatellitePosition,
                   earth: EarthModel = EARTH) -> float:
    return float(np.linalg.norm(sat.vector - receiver.position(earth)))


def ranked_visible(receiver: GroundReceiver, positions: np.ndarray,
                   earth: EarthModel = EARTH) -> tuple[np.ndarray, np.ndarray]:
    """Indices of visible satellites sorted by slant range, and all ranges.

    The sort is stable, so equal ranges keep input (orbit, slot) order.
    """
    rx = receiver.position(earth)
    rel = positions - rx
    ranges = np.linalg.norm(rel, axis=1)
    idx = np.flatnonzero(rel @ receiver.zenith() > 0.0)
    order = idx[np.argsort(ranges[idx], kind="stable")]
    return order, ranges


def nearest_satellite(receiver: GroundReceiver, sats: Sequence[SatellitePosition],
                      earth: EarthModel = EARTH) -> SatellitePosition:
    if len(sats) == 0:
        raise NoVisibleSatellite("no satellites supplied")
    order, _ = ranked_visible(receiver, positions_array(sats), earth)
    if order.size == 0:
        raise NoVisibleSatellite(
            f"no satellite visible from ({receiver.latitude_deg}, {receiver.longitude_deg})")
    return sats[int(order[0])]


def elevation_deg(receiver: GroundReceiver, sat: SatellitePosition,
                  earth: EarthModel = EARTH) -> float:
    rel = sat.vector - receiver.position(earth)
    sin_el = float(rel @ receiver.zenith()) / float(np.linalg.norm(rel))
    return math.degrees(math.asin(max(-1.0, min(1.0, sin_el))))


def earth_central_angle_deg(altitude_km: float, half_beamwidth_deg: float,
                            earth: EarthModel = EARTH) -> float:
    """Earth-central half angle of a nadir-pointed beam, clipped at the horizon."""
    r = earth.radius_km
    ratio = (r + altitude_km) / r
    horizon = math.acos(r / (r + altitude_km))
    s = ratio * math.sin(math.radians(half_beamwidth_deg))
    if s >= 1.0:
        return math.degrees(horizon)
    lam = math.asin(s) - math.radians(half_beamwidth_deg)
    return math.degrees(min(lam, horizon))


def footprint_area_km2(altitude_km: float, half_beamwidth_deg: float,
                       earth: EarthModel = EARTH) -> float:
    """Spherical-cap area illuminated by one satellite.

    Parameters
    ----------
    altitude_km : float
        Orbit altitude above the mean surface.
    half_beamwidth_deg : float
        Nadir off-axis half angle of the coverage cone, strictly in (0, 90).

    Returns
    -------
    float
        ``2 pi R^2 (1 - cos lambda)`` in km^2, where ``lambda`` is the
        Earth-central angle, never larger than the horizon-limited cap.
    """
    if not 0.0 < half_beamwidth_deg < 90.0:
        raise InvalidBeamwidth(
            f"half_beamwidth_deg must lie in (0, 90), got {half_beamwidth_deg}")
    lam = math.radians(earth_central_angle_deg(altitude_km, half_beamwidth_deg, earth))
    return 2.0 * math.pi * earth.radius_km ** 2 * (1.0 - math.cos(lam))


@dataclass(frozen=True)
class ReceiverGrid:
    """Regular latitude/longitude grid of receivers, endpoints inclusive for latitude."""
    lat_step_deg: float = 5.0
    lon_step_deg: float = 5.0
    lat_min: float = -90.0
    lat_max: float = 90.0
    lon_min: float = -180.0
    lon_max: float = 175.0
    height_m: float = 1.0

    def __post_init__(self):
        if self.lat_step_deg <= 0 or self.lon_step_deg <= 0:
            raise ValidationError("grid steps must be positive")
        if self.lat_min > self.lat_max or self.lon_min > self.lon_max:
            raise ValidationError("grid bounds are inverted")

    def receivers(self) -> list[GroundReceiver]:
        lats = np.arange(self.lat_min, self.lat_max + 1e-9, self.lat_step_deg)
        lons = np.arange(self.lon_min, self.lon_max + 1e-9, self.lon_step_deg)
        return [GroundReceiver(round(float(la), 9), round(float(lo), 9), self.height_m)
                for la in lats for lo in lons]
