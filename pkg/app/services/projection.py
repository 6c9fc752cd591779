"""
Projection of city records from the database year to a forecast year.
"""
from typing import Mapping, Optional

from app.exceptions import ScenarioError
from app.models.schemas import CityRecord, ProjectedCity

# (city_id, year) -> (population growth, GDP per capita growth) for that single year
GrowthTable = Mapping[tuple[str, int], tuple[float, float]]

BASE_YEAR = 2022


def _growth_factor(record: CityRecord, year: int, base_year: int,
                   growth: Optional[GrowthTable], column: int) -> float:
    constant = record.pop_growth_rate if column == 0 else record.gdp_growth_rate
    years = range(base_year + 1, year + 1)
    if not growth or not any((record.city_id, y) in growth for y in years):
        return (1.0 + constant) ** (year - base_year)

    factor = 1.0
    for y in years:
        rate = growth[(record.city_id, y)][column] if (record.city_id, y) in growth else constant
        factor *= 1.0 + rate
    return factor


def project_city(record: CityRecord, year: int, base_year: int = BASE_YEAR,
                 growth: Optional[GrowthTable] = None) -> ProjectedCity:
    """
    Grow population and GDP per capita with compound annual rates; area stays fixed.

    Args:
        record: City as of the base year
        year: Forecast year, not before base_year
        base_year: Year of the database values
        growth: Optional per-year rates overriding the record's constant rates

    Returns:
        ProjectedCity for the year
    """
    if year < base_year:
        raise ScenarioError(f"year {year} is before the database base year {base_year}")

    return ProjectedCity(
        city_id=record.city_id,
        name=record.name,
        country=record.country,
        year=year,
        population=record.population_2022 * _growth_factor(record, year, base_year, growth, 0),
        area_sqkm=record.area_sqkm,
        gdp_per_capita=record.gdp_per_capita_2022 * _growth_factor(record, year, base_year, growth, 1),
    )
