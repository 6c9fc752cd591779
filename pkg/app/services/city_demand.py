"""
Per-city pipeline: grid, population, trips, transport options and mode choice, reduced
to daily air taxi trips, aircraft movements, flight hours and fleet size.
"""
from dataclasses import dataclass
import logging
import math
from typing import Iterable, Optional

import numpy as np

from app.models.config import RunConfig
from app.models.schemas import (
    AggregateTotals,
    CityRecord,
    CityResult,
    FleetParams,
    FlightTimeBasis,
    GlobalResult,
    ProjectedCity,
)
from app.services.city_geometry import CityGrid, build_grid, place_vertiports
from app.services.mode_choice import air_taxi_share_block, value_of_travel_time
from app.services.population_model import distribute_population
from app.services.projection import GrowthTable, project_city
from app.services.transport_options import (
    cell_access,
    option_block,
    vertiport_count,
    vertiport_density,
)
from app.services.trip_demand import ODMatrix, build_od_matrix

logger = logging.getLogger(__name__)


# -----------------------------------------------------------------------
# Fleet equations
# -----------------------------------------------------------------------

def movements(daily_trips: float, fp: FleetParams = FleetParams()) -> float:
    """Aircraft movements per day: trips / (seats * SLF)."""
    if daily_trips < 0:
        raise ValueError(f"trips must be non-negative, got {daily_trips}")
    return daily_trips / (fp.seats_per_aircraft * fp.seat_load_factor)


def fleet_size(daily_flight_hours: float, fp: FleetParams = FleetParams()) -> float:
    """Vehicles needed: flight hours / (seats * SLF * utilisation per hour)."""
    if daily_flight_hours < 0:
        raise ValueError(f"flight hours must be non-negative, got {daily_flight_hours}")
    return daily_flight_hours / (fp.seats_per_aircraft * fp.seat_load_factor * fp.utilization_per_hour)


def flight_minutes_per_trip(config: RunConfig) -> float:
    """Fixed minutes added to cruise time when counting flight time for the fleet."""
    at = config.air_taxi
    minutes = at.takeoff_min + at.landing_min
    if config.run.flight_time_basis == FlightTimeBasis.AIRBORNE_TURNAROUND:
        minutes += at.boarding_min + at.deboarding_min
    return minutes


# -----------------------------------------------------------------------
# City evaluation
# -----------------------------------------------------------------------

@dataclass(frozen=True)
class CityModel:
    """Price- and density-independent part of a city: grid, population and trips."""
    city: ProjectedCity
    grid: CityGrid
    od: ODMatrix


def prepare_city(city: ProjectedCity, config: RunConfig) -> CityModel:
    """Build grid, population field and OD matrix for a projected city."""
    grid = build_grid(city.area_sqkm, config.grid)
    field = distribute_population(grid, city.population, config.population)
    od = build_od_matrix(grid, field, config.trips, config.run.block_size)
    return CityModel(city=city, grid=grid, od=od)


def evaluate_city(model: CityModel, ticket_price: float, vd_city: float,
                  config: RunConfig) -> CityResult:
    """
    Mode choice over every OD pair of a prepared city.

    Args:
        model: Prepared city
        ticket_price: Air taxi fare in EUR per flown km
        vd_city: Vertiport density applied to this city
        config: Run configuration

    Returns:
        CityResult
    """
    city, grid, od = model.city, model.grid, model.od
    count = vertiport_count(city.area_sqkm, vd_city, config.density.min_vertiports)
    network = place_vertiports(grid.radius_km, count)
    access = cell_access(grid, network, config.air_taxi)
    vtt = value_of_travel_time(city.gdp_per_capita, config.choice)
    fixed_flight_h = flight_minutes_per_trip(config) / 60.0

    air_parts: list[float] = []
    hours_parts: list[float] = []
    access_parts: list[float] = []
    egress_parts: list[float] = []

    for origins, trips in od.iter_blocks(config.run.block_size):
        opts = option_block(grid, origins, access, ticket_price, city.gdp_per_capita,
                            config.air_taxi, config.amt)
        gc_amt = opts.amt_cost_eur + vtt * opts.amt_time_h
        with np.errstate(invalid="ignore"):
            gc_air = opts.air_cost_eur + vtt * opts.air_time_h
        share = air_taxi_share_block(gc_air, gc_amt, opts.air_available, config.choice)
        air = trips * share
        flight_h = np.where(opts.air_available, opts.flight_km / config.air_taxi.cruise_kmh + fixed_flight_h, 0.0)

        air_parts.append(float(air.sum()))
        hours_parts.append(float((air * flight_h).sum()))
        access_parts.append(float((air * opts.access_km).sum()))
        egress_parts.append(float((air * opts.egress_km).sum()))

    air_trips = math.fsum(air_parts)
    flight_hours = math.fsum(hours_parts)
    internal = od.total_internal
    fleet = fleet_size(flight_hours, config.fleet)

    result = CityResult(
        city_id=city.city_id,
        country=city.country,
        year=city.year,
        ticket_price=ticket_price,
        vd_city=vd_city,
        vertiport_count=count,
        cell_count=grid.cell_count,
        daily_internal_trips=internal,
        discarded_trips=od.total_discarded,
        daily_air_trips=air_trips,
        air_share=air_trips / internal if internal > 0 else 0.0,
        daily_movements=movements(air_trips, config.fleet),
        daily_flight_hours=flight_hours,
        fleet_size=fleet,
        fleet_size_ceil=math.ceil(fleet),
        mean_access_km=math.fsum(access_parts) / air_trips if air_trips > 0 else 0.0,
        mean_egress_km=math.fsum(egress_parts) / air_trips if air_trips > 0 else 0.0,
        eligible=air_trips >= config.run.eligibility_threshold,
    )
    logger.debug("%s %d: %.1f air trips/day, %d vertiports", city.city_id, city.year, air_trips, count)
    return result


def city_demand(record: CityRecord, year: int, ticket_price: float, vd_ref: float,
                config: RunConfig, growth: Optional[GrowthTable] = None) -> CityResult:
    """
    Full pipeline for one city: project to the year, scale the reference vertiport
    density to the city and evaluate demand.
    """
    city = project_city(record, year, config.run.base_year, growth)
    vd_city = vertiport_density(city.area_sqkm, city.gdp_per_capita, vd_ref, config.density)
    return evaluate_city(prepare_city(city, config), ticket_price, vd_city, config)


# -----------------------------------------------------------------------
# Aggregation
# -----------------------------------------------------------------------

def aggregate_totals(results: Iterable[CityResult], scope: str = "GLOBAL") -> AggregateTotals:
    """Sum city values with compensated summation in the given order."""
    results = list(results)
    return AggregateTotals(
        scope=scope,
        total_daily_trips=math.fsum(r.daily_air_trips for r in results),
        total_daily_movements=math.fsum(r.daily_movements for r in results),
        total_daily_flight_hours=math.fsum(r.daily_flight_hours for r in results),
        total_fleet=math.fsum(r.fleet_size for r in results),
        total_fleet_ceil=sum(r.fleet_size_ceil for r in results),
        eligible_city_count=sum(1 for r in results if r.eligible),
        city_count=len(results),
    )


def build_global_result(results: list[CityResult], year: int, ticket_price: float, vd: float,
                        scenario: Optional[str] = None) -> GlobalResult:
    """Global totals for one year, cities ordered by city id."""
    ordered = sorted(results, key=lambda r: r.city_id)
    return GlobalResult(
        year=year,
        scenario=scenario,
        ticket_price=ticket_price,
        vd=vd,
        totals=aggregate_totals(ordered),
        cities=ordered,
    )
