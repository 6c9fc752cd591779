import json
import math

import pytest

from app.models.config import build_config, config_digest
from app.models.schemas import CityRecord, ResultRow, SweepGrid
from app.services.city_demand import build_global_result, city_demand, prepare_city
from app.services.csv_generator import (
    RESULT_COLUMNS,
    format_value,
    generate_od_csv,
    generate_results_csv,
    generate_sweep_csv,
    rows_from_global,
    write_od_dump,
    write_results,
    write_sweep,
)
from app.services.projection import project_city


def _row(**overrides):
    values = dict(run_id="abc", scenario="", year=2030, scope="GLOBAL", price_eur_km=3.0,
                  vd_per_sqkm=0.02, daily_trips=1234.5, daily_movements=617.25,
                  daily_flight_hours=80.0, fleet_size=121.2121, eligible=True)
    values.update(overrides)
    return ResultRow(**values)


def test_format_value():
    assert format_value(0.1) == "0.1"
    assert format_value(1e-7) == "1e-07"
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(2030) == "2030"


def test_result_row_rejects_negative_or_non_finite():
    with pytest.raises(ValueError):
        _row(daily_trips=-1.0)
    with pytest.raises(ValueError):
        _row(fleet_size=math.inf)


def test_results_csv_layout():
    text = generate_results_csv([_row(), _row(scope="C01", eligible=False)])
    lines = text.split("\n")
    assert lines[0] == ",".join(RESULT_COLUMNS)
    assert lines[1] == "abc,,2030,GLOBAL,3.0,0.02,1234.5,617.25,80.0,121.2121,true"
    assert lines[2].endswith(",false")
    assert text.endswith("\n") and "\r" not in text


def test_empty_rows_give_header_only(tmp_path):
    path = tmp_path / "out.csv"
    write_results([], path, "csv", build_config())
    assert path.read_text() == ",".join(RESULT_COLUMNS) + "\n"


def test_json_results_embed_config(tmp_path):
    config = build_config()
    path = tmp_path / "out.json"
    write_results([_row()], path, "json", config)
    text = path.read_text()
    document = json.loads(text)
    assert document["run_id"] == config_digest(config)
    assert document["config"]["fleet"]["seats_per_aircraft"] == 4
    assert document["rows"][0]["scope"] == "GLOBAL"
    assert text.endswith("}\n")


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_results([_row()], tmp_path / "x", "xml", build_config())


def test_identical_writes_are_byte_identical(tmp_path, small_db):
    config = build_config()
    run_id = config_digest(config)
    for name in ("a.csv", "b.csv"):
        results = [city_demand(r, 2030, 3.0, 0.02, config) for r in small_db]
        rows = rows_from_global(build_global_result(results, 2030, 3.0, 0.02), run_id)
        write_results(rows, tmp_path / name, "csv", config)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_rows_from_global(small_db):
    config = build_config()
    results = [city_demand(r, 2030, 3.0, 0.02, config) for r in small_db]
    result = build_global_result(results, 2030, 3.0, 0.02, scenario="S1")

    rows = rows_from_global(result, "rid", by_country=True)
    assert [r.scope for r in rows] == ["A1", "A2", "B1", "country:Aland", "country:Bland", "GLOBAL"]
    assert all(r.scenario == "S1" for r in rows)
    assert rows[0].vd_per_sqkm == results[0].vd_city
    assert rows[-1].vd_per_sqkm == 0.02
    assert rows[-1].daily_trips == result.total_daily_trips

    totals_only = rows_from_global(result, "rid", include_cities=False)
    assert [r.scope for r in totals_only] == ["GLOBAL"]


def test_sweep_csv_layout(tmp_path):
    run_id = config_digest(build_config())
    grid = SweepGrid(run_id=run_id, year=2022, prices=[2.5, 3.0], densities=[0.01, 0.02, 0.04],
                     daily_trips=[[1.0, 2.0, 3.0], [0.5, 1.5, 2.5]])
    assert generate_sweep_csv(grid) == (
        "run_id,price_eur_km,0.01,0.02,0.04\n"
        f"{run_id},2.5,1.0,2.0,3.0\n"
        f"{run_id},3.0,0.5,1.5,2.5\n"
    )
    path = tmp_path / "sweep.json"
    write_sweep(grid, path, "json", build_config())
    document = json.loads(path.read_text())
    assert document["daily_trips"] == [[1.0, 2.0, 3.0], [0.5, 1.5, 2.5]]
    assert set(document) == {"run_id", "config", "year", "prices", "densities", "daily_trips"}


def test_od_dump(tmp_path, toy_city):
    config = build_config()
    model = prepare_city(toy_city, config)
    run_id = config_digest(config)
    text = generate_od_csv(model.od, run_id, block_size=2)
    lines = text.strip().split("\n")
    assert lines[0] == "run_id,origin_ix,origin_iy,dest_ix,dest_iy,trips_per_day"
    # five cells, every pair reachable
    assert len(lines) == 1 + 25
    assert lines[1].startswith(f"{run_id},-1,0,-1,0,")
    assert all(line.split(",")[0] == run_id for line in lines[1:])
    total = math.fsum(float(line.split(",")[-1]) for line in lines[1:])
    assert total == pytest.approx(model.od.total_internal, rel=1e-12)

    path = tmp_path / "od.csv"
    write_od_dump(model.od, path, run_id)
    assert path.read_text() == generate_od_csv(model.od, run_id)


def test_od_dump_skips_zero_pairs():
    record = CityRecord(city_id="Z", name="Z", country="Z", population_2022=600_000.0,
                        area_sqkm=0.5, gdp_per_capita_2022=1.0)
    city = project_city(record, 2022)
    od = prepare_city(city, build_config()).od
    lines = generate_od_csv(od, "rid").strip().split("\n")
    assert len(lines) == 2
