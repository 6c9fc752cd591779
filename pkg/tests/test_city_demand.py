import math

import pytest

from app.models.config import build_config
from app.models.schemas import CityRecord, FleetParams
from app.services.city_demand import (
    aggregate_totals,
    build_global_result,
    city_demand,
    evaluate_city,
    flight_minutes_per_trip,
    fleet_size,
    movements,
    prepare_city,
)


def test_movements():
    assert movements(1000.0) == 500.0
    assert movements(0.0) == 0.0
    assert movements(1000.0, FleetParams(seat_load_factor=1.0)) == 250.0


def test_fleet_size():
    assert fleet_size(660.0) == pytest.approx(1000.0)
    assert fleet_size(0.0) == 0.0
    assert fleet_size(2 * 123.4) == 2 * fleet_size(123.4)


@pytest.mark.parametrize("func", [movements, fleet_size])
def test_fleet_equations_reject_negative_input(func):
    with pytest.raises(ValueError):
        func(-1.0)


def test_flight_minutes_basis():
    assert flight_minutes_per_trip(build_config()) == 4.0
    turnaround = build_config({"run": {"flight_time_basis": "airborne_turnaround"}})
    assert flight_minutes_per_trip(turnaround) == 10.0


def test_city_result_identities(small_db):
    config = build_config()
    result = city_demand(small_db[0], 2030, 3.0, 0.02, config)

    assert result.daily_movements == result.daily_air_trips / (4 * 0.5)
    assert result.fleet_size == result.daily_flight_hours / (4 * 0.5 * 0.33)
    assert result.fleet_size_ceil == math.ceil(result.fleet_size)
    assert 0.0 < result.daily_air_trips < result.daily_internal_trips
    assert result.air_share == pytest.approx(result.daily_air_trips / result.daily_internal_trips)
    assert result.vertiport_count >= 5
    assert result.mean_access_km > 0.0 and result.mean_egress_km > 0.0
    assert result.eligible == (result.daily_air_trips >= 1000.0)


def test_internal_plus_discarded_equals_generated(small_db):
    config = build_config()
    result = city_demand(small_db[2], 2022, 3.0, 0.02, config)
    generated = small_db[2].population_2022 * 3.0
    assert result.daily_internal_trips + result.discarded_trips == pytest.approx(generated, rel=1e-9)


def test_prohibitive_price_gives_no_demand(small_db):
    result = city_demand(small_db[0], 2022, 1e6, 0.02, build_config())
    assert result.daily_air_trips == pytest.approx(0.0, abs=1e-9)
    assert not result.eligible


def test_identical_runs_are_bit_identical(small_db):
    config = build_config()
    a = city_demand(small_db[1], 2035, 4.0, 0.01, config)
    b = city_demand(small_db[1], 2035, 4.0, 0.01, config)
    assert a == b


def test_prepared_city_reused_across_prices(small_db):
    from app.services.projection import project_city

    config = build_config()
    model = prepare_city(project_city(small_db[0], 2022), config)
    cheap = evaluate_city(model, 2.5, 0.02, config)
    dear = evaluate_city(model, 6.0, 0.02, config)
    assert cheap.daily_air_trips > dear.daily_air_trips
    assert cheap.daily_internal_trips == dear.daily_internal_trips


def test_single_cell_city_has_no_air_demand():
    record = CityRecord(city_id="X", name="Speck", country="Y", population_2022=600_000.0,
                        area_sqkm=0.5, gdp_per_capita_2022=30000.0)
    result = city_demand(record, 2022, 3.0, 0.02, build_config())
    assert result.cell_count == 1
    assert result.daily_air_trips == 0.0
    assert result.mean_access_km == 0.0


def test_turnaround_basis_raises_fleet(small_db):
    airborne = city_demand(small_db[0], 2022, 3.0, 0.02, build_config())
    turnaround = city_demand(small_db[0], 2022, 3.0, 0.02,
                             build_config({"run": {"flight_time_basis": "airborne_turnaround"}}))
    assert turnaround.daily_air_trips == airborne.daily_air_trips
    assert turnaround.fleet_size > airborne.fleet_size


def test_aggregate_totals(small_db):
    config = build_config()
    results = [city_demand(r, 2022, 3.0, 0.02, config) for r in small_db]
    totals = aggregate_totals(results)
    assert totals.scope == "GLOBAL"
    assert totals.city_count == 3
    assert totals.total_daily_trips == pytest.approx(sum(r.daily_air_trips for r in results), rel=1e-12)
    assert totals.total_fleet_ceil == sum(r.fleet_size_ceil for r in results)
    assert totals.eligible_city_count == sum(r.eligible for r in results)

    empty = aggregate_totals([])
    assert empty.total_daily_trips == 0.0 and empty.city_count == 0


def test_global_result_orders_cities_and_groups_countries(small_db):
    config = build_config()
    results = [city_demand(r, 2022, 3.0, 0.02, config) for r in reversed(small_db)]
    result = build_global_result(results, 2022, 3.0, 0.02)
    assert [c.city_id for c in result.cities] == ["A1", "A2", "B1"]

    by_country = result.country_totals()
    assert [t.scope for t in by_country] == ["country:Aland", "country:Bland"]
    assert [t.city_count for t in by_country] == [2, 1]
    assert math.fsum(t.total_daily_trips for t in by_country) == pytest.approx(result.total_daily_trips)
