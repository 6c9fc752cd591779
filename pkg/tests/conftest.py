import math
from pathlib import Path

import pytest

from app.models.config import build_config
from app.models.schemas import CityRecord, ProjectedCity
from app.services.city_database import load_city_database, write_city_database

REPO_ROOT = Path(__file__).resolve().parent.parent
SAMPLE_CITIES = REPO_ROOT / "data" / "sample_cities.csv"
EXAMPLE_CONFIG = REPO_ROOT / "data" / "example_config.toml"

# Circle of radius 2 km: with 2 km cells exactly the centre and its 4 axis neighbours
FIVE_CELL_AREA = math.pi * 4.0


@pytest.fixture
def config():
    return build_config()


@pytest.fixture(scope="session")
def sample_db():
    return load_city_database(SAMPLE_CITIES)


@pytest.fixture
def small_db():
    """Three small cities in two countries; quick enough for CLI and API runs."""
    return [
        CityRecord(city_id="A1", name="Alpha", country="Aland", population_2022=900_000.0,
                   area_sqkm=120.0, gdp_per_capita_2022=60000.0, pop_growth_rate=0.01,
                   gdp_growth_rate=0.02),
        CityRecord(city_id="A2", name="Beta", country="Aland", population_2022=600_000.0,
                   area_sqkm=60.0, gdp_per_capita_2022=45000.0, pop_growth_rate=0.0,
                   gdp_growth_rate=0.01),
        CityRecord(city_id="B1", name="Gamma", country="Bland", population_2022=1_500_000.0,
                   area_sqkm=200.0, gdp_per_capita_2022=20000.0, pop_growth_rate=0.02,
                   gdp_growth_rate=0.03),
    ]


@pytest.fixture
def small_db_csv(tmp_path, small_db):
    path = tmp_path / "cities.csv"
    write_city_database(small_db, path)
    return path


@pytest.fixture
def toy_city():
    """Five-cell city used by the brute-force oracles."""
    return ProjectedCity(city_id="TOY", name="Toy", country="Nowhere", year=2022,
                         population=1_000_000.0, area_sqkm=FIVE_CELL_AREA, gdp_per_capita=50000.0)
