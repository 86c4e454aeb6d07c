"""Link-budget terms in the dB domain."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidElevation, NonPositiveInput, ValidationError

BOLTZMANN = 1.380649e-23  # J/K
FSPL_K_KM_MHZ = 32.45

# (k, gamma) per carrier in MHz; overridable from the scenario file
DEFAULT_RAIN_COEFFS = {
    2000.0: (0.0000847, 1.0664),
    2700.0: (0.000265, 1.312),
}


@dataclass(frozen=True)
class RainParams:
    rate_mm_per_h: float
    k_coeff: float
    gamma_exp: float
    path_scale: float = 1.0

    def __post_init__(self):
        vals = (self.rate_mm_per_h, self.k_coeff, self.gamma_exp, self.path_scale)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("rain parameters must be finite")
        if self.rate_mm_per_h < 0:
            raise ValidationError("rain rate_mm_per_h must be >= 0")
        if self.k_coeff <= 0 or self.gamma_exp <= 0 or self.path_scale <= 0:
            raise ValidationError("rain k_coeff, gamma_exp and path_scale must be > 0")

    @classmethod
    def for_carrier(cls, carrier_mhz: float, rate_mm_per_h: float,
                    path_scale: float = 1.0) -> "RainParams":
        """Use the shipped coefficients of the closest tabulated carrier."""
        nearest = min(DEFAULT_RAIN_COEFFS, key=lambda f: abs(f - carrier_mhz))
        k, gamma = DEFAULT_RAIN_COEFFS[nearest]
        return cls(rate_mm_per_h, k, gamma, path_scale)


@dataclass(frozen=True)
class AtmosParams:
    zenith_att_db: float = 0.5
    min_elevation_deg: float = 10.0

    def __post_init__(self):
        if not self.zenith_att_db >= 0:
            raise ValidationError("zenith_att_db must be >= 0")
        if not 0 < self.min_elevation_deg <= 90:
            raise ValidationError("min_elevation_deg must lie in (0, 90]")


@dataclass(frozen=True)
class LinkBudget:
    distance_km: float
    frequency_mhz: float
    path_loss_db: float
    eirp_dbw: float
    rain_att_db: float
    atmos_att_db: float
    noise_dbw: float
    elevation_deg: float

    @property
    def received_dbw(self) -> float:
        return self.eirp_dbw - self.path_loss_db - self.rain_att_db - self.atmos_att_db


def free_space_path_loss_db(distance_km, frequency_mhz, k_const=FSPL_K_KM_MHZ):
    if distance_km <= 0 or frequency_mhz <= 0:
        raise NonPositiveInput(
            f"distance and frequency must be positive (got d={distance_km}, f={frequency_mhz})")
    return 20.0 * math.log10(distance_km) + 20.0 * math.log10(frequency_mhz) + k_const


def eirp_dbw(tx_power_dbw, antenna_gain_dbi):
    # product of linear power and gain, taken in dB
    return tx_power_dbw + antenna_gain_dbi


def rain_attenuation_db(p: RainParams) -> float:
    if p.rate_mm_per_h == 0:
        return 0.0
    return p.path_scale * p.k_coeff * p.rate_mm_per_h ** p.gamma_exp


def atmospheric_attenuation_db(p: AtmosParams, elevation_deg: float) -> float:
    """Zenith gaseous attenuation scaled by the cosecant airmass.

    The elevation is floored at ``p.min_elevation_deg`` so grazing paths do
    not blow up.
    """
    if not 0 < elevation_deg <= 90:
        raise InvalidElevation(f"elevation must lie in (0, 90], got {elevation_deg}")
    if p.zenith_att_db == 0:
        return 0.0
    el = max(elevation_deg, p.min_elevation_deg)
    return p.zenith_att_db / math.sin(math.radians(el))


def noise_power_dbw(bandwidth_hz, noise_figure_db=7.0, temperature_k=290.0):
    """Thermal noise ``kTB`` plus receiver noise figure, in dBW."""
    if bandwidth_hz <= 0 or temperature_k <= 0:
        raise NonPositiveInput("bandwidth and temperature must be positive")
    return 10.0 * math.log10(BOLTZMANN * temperature_k * bandwidth_hz) + noise_figure_db


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


def link_budget(distance_km: float, frequency_mhz: float, eirp: float,
                bandwidth_hz: float, rain: RainParams, atmos: AtmosParams,
                elevation: float, noise_figure_db: float = 7.0,
                temperature_k: float = 290.0,
                k_const: float = FSPL_K_KM_MHZ) -> LinkBudget:
    return LinkBudget(
        distance_km=distance_km,
        frequency_mhz=frequency_mhz,
        path_loss_db=free_space_path_loss_db(distance_km, frequency_mhz, k_const),
        eirp_dbw=eirp,
        rain_att_db=rain_attenuation_db(rain),
        atmos_att_db=atmospheric_attenuation_db(atmos, elevation),
        noise_dbw=noise_power_dbw(bandwidth_hz, noise_figure_db, temperature_k),
        elevation_deg=elevation,
    )
