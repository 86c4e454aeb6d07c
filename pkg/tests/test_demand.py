import io

import pytest
from hypothesis import given, strategies as st

from d2dtea.demand import (Region, TrafficModel, active_user_density, load_regions,
                           regional_report)
from d2dtea.errors import ParseError, ValidationError

CSV = """region_id,name,country,area_km2,population,density_per_km2
ZZ-02,Beta,ZZ,100,5000,50
ZZ-01,Alpha,ZZ,200,2000,
YY-01,Empty,YY,50,0,0
"""


def test_active_density_exact():
    assert active_user_density(181.0, TrafficModel(0.02, 20.0)) == 0.181


def test_obf_guard():
    with pytest.raises(ValidationError, match="obf"):
        TrafficModel(obf=0.0)
    with pytest.raises(ValidationError):
        TrafficModel(adoption_rate=1.5)


def test_load_text_and_stream():
    regions = load_regions(CSV)
    assert [r.region_id for r in regions] == ["ZZ-02", "ZZ-01", "YY-01"]
    assert regions[1].density_per_km2 == 10.0
    assert load_regions(io.StringIO(CSV)) == regions


def test_load_path(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text(CSV)
    assert len(load_regions(p)) == 3


def test_bad_area_names_line():
    bad = CSV.replace("ZZ-01,Alpha,ZZ,200", "ZZ-01,Alpha,ZZ,0")
    with pytest.raises(ValidationError, match="line 3.*ZZ-01"):
        load_regions(bad)


def test_density_mismatch():
    with pytest.raises(ValidationError):
        load_regions(CSV.replace("5000,50", "5000,51"))


def test_unknown_column_and_bad_number():
    with pytest.raises(ParseError):
        load_regions("region_id,name,country,area_km2,population,extra\n")
    with pytest.raises(ParseError, match="line 2"):
        load_regions(CSV.replace("5000,50", "lots,50"))


def test_region_direct_validation():
    with pytest.raises(ValidationError):
        Region("x", "x", "x", -1.0, 0.0, 0.0)


def test_regional_report_sorted_and_uncontended():
    t = TrafficModel(0.02, 20.0)
    rep = regional_report(load_regions(CSV), t, 1.0)
    assert [r.region_id for r in rep] == ["YY-01", "ZZ-01", "ZZ-02"]
    assert rep[0].uncontended and rep[0].user_capacity_mbps is None
    assert rep[1].user_capacity_mbps == pytest.approx(1.0 / (10 * 0.02 / 20))


def test_chain_gives_target():
    d = active_user_density(181.0, TrafficModel(0.02, 20.0))
    assert 1.81 / d == 10.0


@given(avg=st.floats(0, 1e5), a=st.floats(0, 1), obf=st.floats(1, 100))
def test_active_density_scaling(avg, a, obf):
    d = active_user_density(avg, TrafficModel(a, obf))
    assert d <= avg * a + 1e-12
