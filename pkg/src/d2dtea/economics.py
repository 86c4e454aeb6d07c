"""Capex/Opex assembly, NPV and subscriber economics for the three NTN architectures.

Ledger amounts are ``Decimal`` USD so that line items sum exactly to the
reported capex and opex.  Discounting and per-subscriber metrics are floats.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from decimal import Decimal
from typing import Optional

from .capacity import SystemDesign
from .demand import TrafficModel
from .errors import ValidationError, ZeroSubscribers


class Architecture(enum.Enum):
    BentPipe = "BentPipe"
    Regenerative = "Regenerative"
    OpenRan3D = "OpenRan3D"

    @classmethod
    def parse(cls, name: str) -> "Architecture":
        key = str(name).replace("-", "").replace("_", "").replace(" ", "").lower()
        for arch in cls:
            if arch.value.lower() == key:
                return arch
        raise ValidationError(f"unknown architecture {name!r}; expected one of "
                              f"{[a.value for a in cls]}")


ARCH_ORDER = (Architecture.BentPipe, Architecture.Regenerative, Architecture.OpenRan3D)


def money(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise ValidationError(f"money amount must be finite, got {x}")
    return Decimal(str(x))


@dataclass(frozen=True)
class ArchModifiers:
    backhaul_factor: float
    gnb_cost_factor: float
    onboard_gnb_mass_kg: float
    isls_per_sat: int
    dus_per_cu: int = 16

    def __post_init__(self):
        if self.backhaul_factor <= 0 or self.gnb_cost_factor <= 0:
            raise ValidationError("architecture factors must be > 0")
        if self.onboard_gnb_mass_kg < 0 or self.isls_per_sat < 0 or self.dus_per_cu < 1:
            raise ValidationError("onboard mass and ISL count must be >= 0, dus_per_cu >= 1")


DEFAULT_MODIFIERS = {
    Architecture.BentPipe: ArchModifiers(1.0, 1.0, 0.0, 0),
    Architecture.Regenerative: ArchModifiers(0.8, 1.0, 35.0, 4),
    Architecture.OpenRan3D: ArchModifiers(1.1, 0.75, 20.0, 0),
}


@dataclass(frozen=True)
class CostLedger:
    launch_fixed: Decimal = Decimal("500000")
    payload_per_kg: Decimal = Decimal("10000")
    monolithic_gnb: Decimal = Decimal("100000")
    gs_equipment_per_link: Decimal = Decimal("100000")
    gs_antenna_per_link: Decimal = Decimal("20000")
    isl_per_link: Decimal = Decimal("25000")
    gs_build: Decimal = Decimal("500000")
    spectrum_acquisition: Decimal = Decimal("300000000")
    platform_cost: Decimal = Decimal("3000000")
    replenishment_per_sat_per_year: Decimal = Decimal("1000000")
    regulation: Decimal = Decimal("1000000")
    digital_infra: Decimal = Decimal("2500000")
    marketing_per_year: Decimal = Decimal("50000000")
    staff_per_year: Decimal = Decimal("10000000")
    rnd_per_year: Decimal = Decimal("50000000")
    maintenance_per_year: Decimal = Decimal("15000000")
    spectrum_maintenance_per_year: Decimal = Decimal("0")
    profit_margin: float = 0.60
    replenishment_fraction: Decimal = Decimal("0.2")
    backhaul_link_capacity_mbps: float = 2000.0
    links_per_gs: int = 4
    ru_du_share: Decimal = Decimal("0.60")
    cu_share: Decimal = Decimal("0.15")

    _FLOAT_FIELDS = ("profit_margin", "backhaul_link_capacity_mbps", "links_per_gs")

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in self._FLOAT_FIELDS:
                if not (isinstance(v, (int, float)) and math.isfinite(v)):
                    raise ValidationError(f"ledger.{f.name} must be a finite number")
            else:
                object.__setattr__(self, f.name, money(v))
            if getattr(self, f.name) < 0:
                raise ValidationError(f"ledger.{f.name} must be >= 0")
        if not 0 <= self.profit_margin <= 5:
            raise ValidationError("ledger.profit_margin must lie in [0, 5]")
        if self.backhaul_link_capacity_mbps <= 0 or self.links_per_gs < 1:
            raise ValidationError("backhaul link capacity must be > 0 and links_per_gs >= 1")

    def scaled(self, factor) -> "CostLedger":
        """Same ledger with every monetary entry multiplied by ``factor``."""
        k = money(factor)
        changes = {f.name: getattr(self, f.name) * k for f in fields(self)
                   if f.name not in self._FLOAT_FIELDS and f.name not in
                   ("replenishment_fraction", "ru_du_share", "cu_share")}
        return replace(self, **changes)


@dataclass(frozen=True)
class LaunchModel:
    per_kg_rate: Decimal = Decimal("2700")
    fixed: Decimal = Decimal("500000")

    def __post_init__(self):
        for name in ("per_kg_rate", "fixed"):
            object.__setattr__(self, name, money(getattr(self, name)))
            if getattr(self, name) < 0:
                raise ValidationError(f"launch.{name} must be >= 0")


BASELINE_LAUNCH = LaunchModel()
HEAVY_LAUNCH = LaunchModel(per_kg_rate=Decimal("200"))


@dataclass(frozen=True)
class LineItem:
    name: str
    kind: str  # "capex" | "opex"
    amount: Decimal
    basis: str = ""


@dataclass(frozen=True)
class EconResult:
    architecture: str
    capex: Decimal
    opex_annual: Decimal
    npv: float
    subscribers: float
    cost_per_sub_monthly: float
    price_monthly: float
    revenue_npv: float
    roi: float
    items: tuple[LineItem, ...] = field(default=(), compare=True)


def launch_cost(mass_kg, lm: LaunchModel) -> Decimal:
    if mass_kg < 0:
        raise ValueError("mass must be >= 0")
    return lm.fixed + money(mass_kg) * lm.per_kg_rate


def disaggregated_split(ledger: CostLedger, dus_per_cu: int = 16) -> tuple[Decimal, Decimal]:
    """Split a disaggregated gNB into (RU+DU cost per satellite, cost of one CU).

    The RU+DU share rides on the satellite; one CU on the ground serves
    ``dus_per_cu`` DUs, so its unit cost is that many per-satellite CU shares.
    """
    ru_du = ledger.ru_du_share * ledger.monolithic_gnb
    cu_unit = dus_per_cu * ledger.cu_share * ledger.monolithic_gnb
    return ru_du, cu_unit


def _modifiers(arch: Architecture, modifiers: Optional[dict]) -> ArchModifiers:
    if modifiers and arch in modifiers:
        return modifiers[arch]
    return DEFAULT_MODIFIERS[arch]


def space_segment_items(n_sats: int, design: SystemDesign, arch: Architecture,
                        ledger: CostLedger, lm: LaunchModel,
                        modifiers: Optional[dict] = None) -> list[LineItem]:
    if n_sats < 1:
        raise ValueError("need at least one satellite")
    mod = _modifiers(arch, modifiers)
    n = Decimal(n_sats)
    mass = money(design.satellite_mass_kg) + money(mod.onboard_gnb_mass_kg)
    if arch is Architecture.Regenerative:
        radio = ledger.monolithic_gnb
    elif arch is Architecture.OpenRan3D:
        radio = disaggregated_split(ledger)[0]
    else:
        radio = Decimal(0)
    per_sat = [
        ("space.platform", ledger.platform_cost, "platform per satellite"),
        ("space.payload", ledger.payload_per_kg * mass, f"payload_per_kg x {mass} kg"),
        ("space.launch", launch_cost(mass, lm), f"fixed + {lm.per_kg_rate}/kg x {mass} kg"),
        ("space.isl", mod.isls_per_sat * ledger.isl_per_link, f"{mod.isls_per_sat} ISLs"),
        ("space.onboard_radio", radio, f"{arch.value} onboard RAN"),
    ]
    return [LineItem(name, "capex", n * amount, f"{n_sats} sats x ({basis})")
            for name, amount, basis in per_sat]


def space_segment_capex(n_sats: int, design: SystemDesign, arch: Architecture,
                        ledger: CostLedger, lm: LaunchModel,
                        modifiers: Optional[dict] = None) -> Decimal:
    return sum((i.amount for i in space_segment_items(n_sats, design, arch, ledger, lm,
                                                      modifiers)), Decimal(0))


def backhaul_links(total_backhaul_demand_mbps: float, arch: Architecture, ledger: CostLedger,
                   modifiers: Optional[dict] = None) -> tuple[int, int]:
    """Feeder links and ground stations needed for the given demand."""
    if total_backhaul_demand_mbps < 0:
        raise ValueError("backhaul demand must be >= 0")
    mod = _modifiers(arch, modifiers)
    effective = total_backhaul_demand_mbps * mod.backhaul_factor
    ratio = effective / ledger.backhaul_link_capacity_mbps
    n_links = round(ratio) if abs(ratio - round(ratio)) <= 1e-9 * max(1.0, ratio) \
        else math.ceil(ratio)
    n_gs = math.ceil(n_links / ledger.links_per_gs)
    return int(n_links), int(n_gs)


def ground_segment_items(total_backhaul_demand_mbps: float, arch: Architecture,
                         ledger: CostLedger, n_sats: int,
                         modifiers: Optional[dict] = None) -> list[LineItem]:
    mod = _modifiers(arch, modifiers)
    n_links, n_gs = backhaul_links(total_backhaul_demand_mbps, arch, ledger, modifiers)
    if arch is Architecture.BentPipe:
        radio, radio_basis = n_sats * ledger.monolithic_gnb, f"{n_sats} ground gNBs"
    elif arch is Architecture.OpenRan3D:
        n_cu = math.ceil(n_sats / mod.dus_per_cu)
        radio, radio_basis = n_cu * disaggregated_split(ledger, mod.dus_per_cu)[1], f"{n_cu} CUs"
    else:
        radio, radio_basis = Decimal(0), "gNB onboard"
    return [
        LineItem("ground.gs_build", "capex", n_gs * ledger.gs_build, f"{n_gs} ground stations"),
        LineItem("ground.gs_equipment", "capex", n_links * ledger.gs_equipment_per_link,
                 f"{n_links} feeder links"),
        LineItem("ground.gs_antenna", "capex", n_links * ledger.gs_antenna_per_link,
                 f"{n_links} feeder links"),
        LineItem("ground.radio", "capex", Decimal(radio), radio_basis),
    ]


def ground_segment_capex(total_backhaul_demand_mbps: float, arch: Architecture,
                         ledger: CostLedger, n_sats: int,
                         modifiers: Optional[dict] = None) -> Decimal:
    return sum((i.amount for i in ground_segment_items(total_backhaul_demand_mbps, arch,
                                                       ledger, n_sats, modifiers)), Decimal(0))


def opex_items(n_sats: int, ledger: CostLedger) -> list[LineItem]:
    if n_sats < 0:
        raise ValueError("n_sats must be >= 0")
    return [
        LineItem("opex.replenishment", "opex",
                 ledger.replenishment_fraction * n_sats * ledger.replenishment_per_sat_per_year,
                 f"{ledger.replenishment_fraction} x {n_sats} sats per year"),
        LineItem("opex.marketing", "opex", ledger.marketing_per_year),
        LineItem("opex.staff", "opex", ledger.staff_per_year),
        LineItem("opex.rnd", "opex", ledger.rnd_per_year),
        LineItem("opex.maintenance", "opex", ledger.maintenance_per_year),
        LineItem("opex.spectrum_maintenance", "opex", ledger.spectrum_maintenance_per_year),
    ]


def annual_opex(n_sats: int, ledger: CostLedger, arch: Architecture = Architecture.BentPipe
                ) -> Decimal:
    # no Opex row depends on the architecture in the default ledger
    return sum((i.amount for i in opex_items(n_sats, ledger)), Decimal(0))


def annuity_factor(rate: float, years: int) -> float:
    """Present value of ``years`` unit payments, the first one undiscounted."""
    if rate < 0 or years < 1:
        raise ValueError("need rate >= 0 and years >= 1")
    return math.fsum(1.0 / (1.0 + rate) ** i for i in range(years))


def npv(capex, opex_annual, rate: float, years: int) -> float:
    return float(capex) + float(opex_annual) * annuity_factor(rate, years)


def subscriber_economics(npv_cost: float, population: float, t: TrafficModel,
                         ledger: CostLedger, years: int, rate: float,
                         architecture: str = "", capex=Decimal(0),
                         opex_annual=Decimal(0), items=()) -> EconResult:
    """Turn a cost NPV into per-subscriber price, revenue and ROI.

    Price is the cost per subscriber loaded with the profit margin, and
    revenue is that price collected monthly and discounted like the Opex.
    ROI therefore depends only on the margin, the rate and the horizon.
    """
    subscribers = population * t.adoption_rate
    if subscribers <= 0:
        raise ZeroSubscribers("population x adoption_rate must be > 0")
    cost_monthly = npv_cost / (subscribers * 12 * years)
    price = cost_monthly * (1.0 + ledger.profit_margin)
    revenue = 12.0 * price * subscribers * annuity_factor(rate, years)
    roi = (revenue - npv_cost) / npv_cost
    return EconResult(architecture, money(capex), money(opex_annual), npv_cost, subscribers,
                      cost_monthly, price, revenue, roi, tuple(items))


def evaluate_architecture(design: SystemDesign, n_sats: int, arch: Architecture,
                          ledger: CostLedger, lm: LaunchModel, demand_mbps: float,
                          population: float, t: TrafficModel, rate: float, years: int,
                          modifiers: Optional[dict] = None) -> EconResult:
    items = space_segment_items(n_sats, design, arch, ledger, lm, modifiers)
    items += ground_segment_items(demand_mbps, arch, ledger, n_sats, modifiers)
    items += [
        LineItem("spectrum_acquisition", "capex", ledger.spectrum_acquisition),
        LineItem("regulation", "capex", ledger.regulation),
        LineItem("digital_infra", "capex", ledger.digital_infra),
    ]
    items += opex_items(n_sats, ledger)
    capex = sum((i.amount for i in items if i.kind == "capex"), Decimal(0))
    opex = sum((i.amount for i in items if i.kind == "opex"), Decimal(0))
    cost = npv(capex, opex, rate, years)
    return subscriber_economics(cost, population, t, ledger, years, rate, arch.value,
                                capex, opex, items)
