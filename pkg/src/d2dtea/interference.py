"""Inter-satellite and intra-satellite inter-beam interference.

All powers are summed in linear watts.  Off-axis angles for satellite
interferers are measured at the receiver, between the direction to the
serving satellite and the direction to the interferer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import constellation as geo
from .constellation import EARTH, EarthModel, GroundReceiver, SatellitePosition
from .errors import ValidationError
from .propagation import FSPL_K_KM_MHZ, LinkBudget, db_to_linear


@dataclass(frozen=True)
class GainPattern:
    sidelobe_floor_linear: float = 1e-3
    main_lobe_half_angle_deg: float = 90.0

    def __post_init__(self):
        if not 0.0 <= self.sidelobe_floor_linear < 1.0:
            raise ValidationError("sidelobe_floor_linear must lie in [0, 1)")
        if not 0.0 < self.main_lobe_half_angle_deg <= 180.0:
            raise ValidationError("main_lobe_half_angle_deg must lie in (0, 180]")


@dataclass(frozen=True)
class BeamLayout:
    num_beams: int
    sector_width_deg: float = 90.0
    beam_width_deg: float = 90.0

    def __post_init__(self):
        if int(self.num_beams) != self.num_beams or self.num_beams < 1:
            raise ValidationError(f"num_beams must be an integer >= 1, got {self.num_beams}")
        if self.sector_width_deg < 0:
            raise ValidationError("sector_width_deg must be >= 0")

    def beam_angles_deg(self) -> np.ndarray:
        """Beam-centre angles; beam 1 (index 0) is the serving beam at 0 deg."""
        spacing = self.sector_width_deg / max(self.num_beams - 1, 1)
        return np.arange(self.num_beams) * spacing


@dataclass(frozen=True)
class InterferenceResult:
    inter_satellite_w: float
    inter_beam_w: float
    total_w: float

    @classmethod
    def combine(cls, inter_satellite_w: float, inter_beam_w: float) -> "InterferenceResult":
        return cls(inter_satellite_w, inter_beam_w, inter_satellite_w + inter_beam_w)


def off_axis_gain(theta_deg, pattern: GainPattern = GainPattern()):
    """cos^2 roll-off inside the main lobe, flat sidelobe floor outside.

    Inside the main lobe the gain never drops below the floor either, so the
    result is always within ``[floor, 1]``.  Accepts scalars or arrays.
    """
    theta = np.abs(np.asarray(theta_deg, dtype=float))
    main = np.maximum(np.cos(np.radians(theta)) ** 2, pattern.sidelobe_floor_linear)
    g = np.where(theta <= pattern.main_lobe_half_angle_deg, main, pattern.sidelobe_floor_linear)
    if g.ndim == 0:
        return float(g)
    return g


def _path_loss_linear(distance_km, frequency_mhz, k_const):
    d = np.asarray(distance_km, dtype=float)
    return 10.0 ** ((20.0 * np.log10(d) + 20.0 * math.log10(frequency_mhz) + k_const) / 10.0)


def _inter_satellite_from_arrays(rel: np.ndarray, ranges: np.ndarray, serving: int,
                                 interferers: np.ndarray, eirp_dbw: float,
                                 frequency_mhz: float, pattern: GainPattern,
                                 k_const: float) -> float:
    if interferers.size == 0:
        return 0.0
    u_s = rel[serving] / ranges[serving]
    u_i = rel[interferers] / ranges[interferers][:, None]
    cos_t = np.clip(u_i @ u_s, -1.0, 1.0)
    theta = np.degrees(np.arccos(cos_t))
    gains = off_axis_gain(theta, pattern)
    terms = db_to_linear(eirp_dbw) * gains / _path_loss_linear(
        ranges[interferers], frequency_mhz, k_const)
    # fixed-order reduction keeps results bit-reproducible
    return float(math.fsum(terms.tolist()))


def inter_satellite_interference_w(receiver: GroundReceiver,
                                   sats: Sequence[SatellitePosition],
                                   serving: SatellitePosition,
                                   eirp_dbw: float,
                                   pattern: GainPattern = GainPattern(),
                                   top_n: Optional[int] = 5,
                                   k_const: float = FSPL_K_KM_MHZ,
                                   frequency_mhz: float = 2000.0,
                                   earth: EarthModel = EARTH) -> float:
    """Interference from the ``top_n`` closest visible non-serving satellites.

    ``top_n=None`` sums over every visible interferer.
    """
    positions = geo.positions_array(sats)
    order, ranges = geo.ranked_visible(receiver, positions, earth)
    keys = [(s.orbit_index, s.slot_index) for s in sats]
    serving_idx = keys.index((serving.orbit_index, serving.slot_index))
    candidates = order[order != serving_idx]
    if top_n is not None:
        candidates = candidates[:top_n]
    rel = positions - receiver.position(earth)
    return _inter_satellite_from_arrays(rel, ranges, serving_idx, candidates, eirp_dbw,
                                        frequency_mhz, pattern, k_const)


def inter_beam_interference_w(layout: BeamLayout, eirp_dbw: float, path_loss_db: float,
                              pattern: GainPattern = GainPattern()) -> float:
    """Leakage from the non-serving beams of the serving satellite.

    Every beam shares the serving link's path loss: they all leave the same
    spacecraft.
    """
    if layout.num_beams == 1:
        return 0.0
    gains = off_axis_gain(layout.beam_angles_deg()[1:], pattern)
    per_beam = db_to_linear(eirp_dbw - path_loss_db)
    return float(math.fsum((per_beam * np.atleast_1d(gains)).tolist()))


def total_interference(receiver: GroundReceiver, sats: Sequence[SatellitePosition],
                       serving: SatellitePosition, layout: BeamLayout, link: LinkBudget,
                       pattern: GainPattern = GainPattern(), top_n: Optional[int] = 5,
                       k_const: float = FSPL_K_KM_MHZ,
                       earth: EarthModel = EARTH) -> InterferenceResult:
    int_s = inter_satellite_interference_w(receiver, sats, serving, link.eirp_dbw, pattern,
                                           top_n, k_const, link.frequency_mhz, earth)
    int_b = inter_beam_interference_w(layout, link.eirp_dbw, link.path_loss_db, pattern)
    return InterferenceResult.combine(int_s, int_b)


@dataclass(frozen=True)
class CellInterference:
    receiver: GroundReceiver
    serving: Optional[SatellitePosition]
    slant_range_km: float
    inter_satellite_w: float

    @property
    def covered(self) -> bool:
        return self.serving is not None


def grid_inter_satellite(receivers: Sequence[GroundReceiver],
                         sats: Sequence[SatellitePosition], eirp_dbw: float,
                         frequency_mhz: float, pattern: GainPattern = GainPattern(),
                         top_n: Optional[int] = 5, k_const: float = FSPL_K_KM_MHZ,
                         earth: EarthModel = EARTH) -> list[CellInterference]:
    """Evaluate inter-satellite interference on every receiver of a grid.

    Cells with no visible satellite are returned with ``serving=None`` and
    zero interference; callers decide whether to include them in averages.
    """
    positions = geo.positions_array(sats)
    out = []
    for rx in receivers:
        order, ranges = geo.ranked_visible(rx, positions, earth)
        if order.size == 0:
            out.append(CellInterference(rx, None, math.nan, 0.0))
            continue
        serving = int(order[0])
        cand = order[1:] if top_n is None else order[1:top_n + 1]
        rel = positions - rx.position(earth)
        int_s = _inter_satellite_from_arrays(rel, ranges, serving, cand, eirp_dbw,
                                             frequency_mhz, pattern, k_const)
        out.append(CellInterference(rx, sats[serving], float(ranges[serving]), int_s))
    return out


def covered_mean(cells: Sequence[CellInterference]) -> float:
    """Mean inter-satellite interference over cells that have a serving satellite."""
    vals = [c.inter_satellite_w for c in cells if c.covered]
    if not vals:
        return 0.0
    return math.fsum(vals) / len(vals)
