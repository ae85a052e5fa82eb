import json
import math

import pytest

from spiral.catalog import (
    CatalogError,
    catalog_to_json,
    load_catalog,
    paper_catalog,
    parse_catalog,
    validate_scenario,
)

ENTRY = {"id": "9", "mass": 100.0, "a": 7000.0, "e": 0.0, "i": 1.0, "raan": 20.0}


def test_paper_catalog_matches_table():
    cat = paper_catalog()
    assert [e.id for e in cat] == ["1", "2", "3", "4", "5"]
    masses = [e.mass for e in cat]
    assert masses == [500, 120, 300, 400, 800]
    d = cat[2].to_debris()
    assert d.a == 6978.16 and d.i == pytest.approx(math.radians(-2.0))


def test_round_trip(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(catalog_to_json(paper_catalog())))
    assert load_catalog(p) == paper_catalog()


@pytest.mark.parametrize(
    "change,field",
    [
        ({"mass": -1.0}, "mass"),
        ({"e": 1.0}, "e"),
        ({"a": 6000.0}, "a"),
        ({"bogus": 1}, None),
    ],
)
def test_invalid_entries(change, field):
    with pytest.raises(CatalogError) as err:
        parse_catalog([ENTRY, {**ENTRY, "id": "10", **change}])
    assert err.value.index == 1
    if field:
        assert err.value.field == field


def test_missing_field_named():
    bad = dict(ENTRY)
    del bad["raan"]
    with pytest.raises(CatalogError) as err:
        parse_catalog([bad])
    assert err.value.field == "raan" and err.value.index == 0


def test_empty_and_duplicate():
    with pytest.raises(CatalogError, match="≥ 1 entry"):
        parse_catalog([])
    with pytest.raises(CatalogError, match="duplicate"):
        parse_catalog([ENTRY, ENTRY])
    with pytest.raises(CatalogError):
        parse_catalog("nope")


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(CatalogError):
        load_catalog(p)


def test_scenario_schema():
    ok = {"spacecraft": {"f_tot": 0.5e-3, "isp": 3000}, "bounds": {"t_rv_days": [5, 100]}}
    assert validate_scenario(ok) is ok
    with pytest.raises(CatalogError) as err:
        validate_scenario({"spacecraft": {"thrust": 1.0}})
    assert "spacecraft" in err.value.field or err.value.field == "<root>"
    with pytest.raises(CatalogError):
        validate_scenario({"bounds": {"t_rv_days": [5]}})
