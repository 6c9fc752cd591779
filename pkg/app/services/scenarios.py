"""
Sensitivity sweeps over ticket price and vertiport density, and the four market
development scenarios evaluated through time.
"""
from dataclasses import dataclass
from functools import partial
import logging
import math
from typing import Optional, Sequence

from app.exceptions import ScenarioError
from app.models.config import RunConfig, config_digest
from app.models.schemas import (
    CityRecord,
    CityResult,
    DensityInterpolation,
    DensityLevel,
    GlobalResult,
    MarketPaths,
    PriceLevel,
    ScenarioSpec,
    SweepDensityMode,
    SweepGrid,
)
from app.services.city_demand import build_global_result, city_demand, evaluate_city, prepare_city
from app.services.projection import GrowthTable, project_city
from app.services.transport_options import vertiport_density
from app.services.worker_pool import map_ordered

logger = logging.getLogger(__name__)


# -----------------------------------------------------------------------
# Market paths
# -----------------------------------------------------------------------

@dataclass(frozen=True)
class PathComponent:
    """One anchored development path (ticket price or reference density)."""
    start: float
    end: float
    first_year: int
    last_year: int
    geometric: bool = False


def price_path(level: PriceLevel, market: MarketPaths = MarketPaths()) -> PathComponent:
    """Linear fare path falling by the configured fraction until the last year."""
    start = (market.price_optimistic_2030 if level == PriceLevel.OPTIMISTIC
             else market.price_conservative_2030)
    return PathComponent(
        start=start,
        end=start * (1.0 - market.price_reduction_by_last_year),
        first_year=market.first_year,
        last_year=market.last_year,
    )


def density_path(level: DensityLevel, market: MarketPaths = MarketPaths()) -> PathComponent:
    """Reference vertiport density path between its two anchors."""
    if level == DensityLevel.HIGH:
        start, end = market.vd_high_2030, market.vd_high_2050
    else:
        start, end = market.vd_low_2030, market.vd_low_2050
    return PathComponent(
        start=start,
        end=end,
        first_year=market.first_year,
        last_year=market.last_year,
        geometric=market.density_interpolation == DensityInterpolation.GEOMETRIC,
    )


def path_value(path: PathComponent, year: int) -> float:
    """
    Value of a path in a year; anchors are returned exactly.

    Raises:
        ScenarioError for years outside the path
    """
    if not path.first_year <= year <= path.last_year:
        raise ScenarioError(
            f"year {year} is outside the scenario range {path.first_year}-{path.last_year}"
        )
    if year == path.first_year:
        return path.start
    if year == path.last_year:
        return path.end

    t = (year - path.first_year) / (path.last_year - path.first_year)
    if path.geometric:
        return path.start * (path.end / path.start) ** t
    return path.start + (path.end - path.start) * t


# -----------------------------------------------------------------------
# Sweeps
# -----------------------------------------------------------------------

def _sweep_city(record: CityRecord, year: int, prices: tuple[float, ...],
                densities: tuple[float, ...], config: RunConfig,
                growth: Optional[GrowthTable]) -> list[list[float]]:
    """Daily air trips of one city for every (price, density) point."""
    city = project_city(record, year, config.run.base_year, growth)
    model = prepare_city(city, config)
    grid = []
    for price in prices:
        row = []
        for density in densities:
            if config.run.sweep_density_mode == SweepDensityMode.REFERENCE:
                vd_city = vertiport_density(city.area_sqkm, city.gdp_per_capita, density, config.density)
            else:
                vd_city = density
            row.append(evaluate_city(model, price, vd_city, config).daily_air_trips)
        grid.append(row)
    return grid


def run_sweep(db: Sequence[CityRecord], prices: Sequence[float], densities: Sequence[float],
              year: int, config: RunConfig, workers: int = 1,
              growth: Optional[GrowthTable] = None) -> SweepGrid:
    """
    Global daily air trips over a price x density grid.

    Args:
        db: City database
        prices: Ticket prices in EUR per km (rows)
        densities: Vertiport densities per sq km (columns)
        year: Forecast year
        config: Run configuration
        workers: Processes used for the per-city work
        growth: Optional per-year growth table

    Returns:
        SweepGrid with one row per price and one column per density
    """
    if not prices or not densities:
        raise ValueError("sweep needs at least one price and one density")
    if any(p <= 0 for p in prices) or any(d <= 0 for d in densities):
        raise ValueError("sweep prices and densities must be positive")

    ordered = sorted(db, key=lambda r: r.city_id)
    logger.info(
        "Sweep over %d cities, %d prices x %d densities, year %d (%s density)",
        len(ordered), len(prices), len(densities), year, config.run.sweep_density_mode.value,
    )
    work = partial(_sweep_city, year=year, prices=tuple(prices), densities=tuple(densities),
                   config=config, growth=growth)
    per_city = map_ordered(work, ordered, workers)

    grid = [
        [math.fsum(city[i][j] for city in per_city) for j in range(len(densities))]
        for i in range(len(prices))
    ]
    return SweepGrid(
        run_id=config_digest(config),
        year=year,
        prices=list(prices),
        densities=list(densities),
        daily_trips=grid,
    )


# -----------------------------------------------------------------------
# Scenarios
# -----------------------------------------------------------------------

def _scenario_city(record: CityRecord, years: tuple[int, ...], prices: tuple[float, ...],
                   vd_refs: tuple[float, ...], config: RunConfig,
                   growth: Optional[GrowthTable]) -> list[CityResult]:
    return [
        city_demand(record, year, price, vd_ref, config, growth)
        for year, price, vd_ref in zip(years, prices, vd_refs)
    ]


def run_scenario(spec: ScenarioSpec, db: Sequence[CityRecord], config: RunConfig,
                 workers: int = 1, growth: Optional[GrowthTable] = None) -> list[GlobalResult]:
    """
    Evaluate a market scenario for each of its years.

    Args:
        spec: Scenario name and years
        db: City database
        config: Run configuration (market paths in config.market)
        workers: Processes used for the per-city work
        growth: Optional per-year growth table

    Returns:
        One GlobalResult per year, in the order of spec.years
    """
    price = price_path(spec.price, config.market)
    density = density_path(spec.density, config.market)
    years = tuple(spec.years)
    prices = tuple(path_value(price, year) for year in years)
    vd_refs = tuple(path_value(density, year) for year in years)

    ordered = sorted(db, key=lambda r: r.city_id)
    logger.info("Scenario %s over %d cities, years %s", spec.name.value, len(ordered), list(years))
    work = partial(_scenario_city, years=years, prices=prices, vd_refs=vd_refs,
                   config=config, growth=growth)
    per_city = map_ordered(work, ordered, workers)

    series = []
    previous_eligible: Optional[int] = None
    for i, year in enumerate(years):
        result = build_global_result(
            [city[i] for city in per_city], year, prices[i], vd_refs[i], scenario=spec.name.value,
        )
        logger.info(
            "%s %d: %.0f trips/day, %.0f movements/day, fleet %.0f, %d eligible cities",
            spec.name.value, year, result.total_daily_trips, result.total_daily_movements,
            result.total_fleet, result.eligible_city_count,
        )
        if previous_eligible is not None and result.eligible_city_count < previous_eligible:
            logger.warning(
                "%s: eligible city count fell from %d to %d in %d",
                spec.name.value, previous_eligible, result.eligible_city_count, year,
            )
        previous_eligible = result.eligible_city_count
        series.append(result)
    return series


def run_global(db: Sequence[CityRecord], year: int, ticket_price: float, vd_ref: float,
               config: RunConfig, workers: int = 1,
               growth: Optional[GrowthTable] = None) -> GlobalResult:
    """All cities at one price and reference density."""
    ordered = sorted(db, key=lambda r: r.city_id)
    work = partial(city_demand, year=year, ticket_price=ticket_price, vd_ref=vd_ref,
                   config=config, growth=growth)
    return build_global_result(map_ordered(work, ordered, workers), year, ticket_price, vd_ref)
