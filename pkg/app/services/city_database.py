"""
City database and growth table ingestion, plus the writer and the synthetic generator.
"""
import csv
from io import StringIO
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from app.exceptions import CityDataError
from app.models.schemas import MIN_CITY_POPULATION, CityRecord
from app.services.projection import GrowthTable

logger = logging.getLogger(__name__)

CITY_COLUMNS = [
    "city_id",
    "name",
    "country",
    "population_2022",
    "area_sqkm",
    "gdp_per_capita_2022",
    "pop_growth_rate",
    "gdp_growth_rate",
]
NUMERIC_COLUMNS = CITY_COLUMNS[3:]

GROWTH_COLUMNS = ["city_id", "year", "pop_growth", "gdp_growth"]

FIELD_LABELS = {
    "population_2022": "population",
    "area_sqkm": "area",
    "gdp_per_capita_2022": "GDP per capita",
    "pop_growth_rate": "population growth rate",
    "gdp_growth_rate": "GDP growth rate",
}

# Synthetic database ranges (log-uniform)
SYNTH_AREA_SQKM = (50.0, 9000.0)
SYNTH_POPULATION = (500_000.0, 40_000_000.0)
SYNTH_GDP = (2000.0, 80000.0)
SYNTH_COUNTRIES = 40


def _read_frame(content: Union[bytes, str], expected: list[str], what: str) -> pd.DataFrame:
    """Read a CSV document as strings and check the exact header."""
    if isinstance(content, bytes):
        try:
            content = content.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise CityDataError(f"{what} is not UTF-8: {exc}") from exc

    try:
        df = pd.read_csv(StringIO(content), dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError as exc:
        raise CityDataError(f"{what} has no header, expected {','.join(expected)}") from exc
    except pd.errors.ParserError as exc:
        raise CityDataError(f"{what} is not valid CSV: {exc}") from exc

    columns = [str(c).strip() for c in df.columns]
    missing = [c for c in expected if c not in columns]
    if missing:
        raise CityDataError(f"{what} is missing columns: {', '.join(missing)}")
    if columns != expected:
        raise CityDataError(f"{what} header must be exactly {','.join(expected)}")
    df.columns = columns
    return df


def _cell(value) -> str:
    # Blank lines come back as NaN even with keep_default_na=False
    return value.strip() if isinstance(value, str) else ""


def _validation_message(exc: ValidationError) -> str:
    messages = []
    for error in exc.errors():
        field = str(error["loc"][0]) if error["loc"] else ""
        label = FIELD_LABELS.get(field, field)
        if error["type"] == "greater_than" and error.get("ctx", {}).get("gt") == 0:
            messages.append(f"{label} must be positive")
        elif error["type"] == "greater_than_equal" and error.get("ctx", {}).get("ge") == 0:
            messages.append(f"{label} must be non-negative")
        else:
            messages.append(f"{label}: {error['msg']}")
    return "; ".join(messages)


def parse_city_database(content: Union[bytes, str], source: str = "city database") -> list[CityRecord]:
    """
    Parse and validate a city database CSV document.

    Args:
        content: CSV bytes or text with the exact city header
        source: Name used in messages

    Returns:
        Records in file order

    Raises:
        CityDataError listing every bad row with its line number (header is line 1)
    """
    df = _read_frame(content, CITY_COLUMNS, source)

    records: list[CityRecord] = []
    issues: list[tuple[int, str]] = []
    first_line: dict[str, int] = {}

    for position, row in enumerate(df.itertuples(index=False)):
        line = position + 2
        values = {column: _cell(value) for column, value in zip(CITY_COLUMNS, row)}
        if not any(values.values()):
            continue

        parsed: dict[str, object] = {
            "city_id": values["city_id"],
            "name": values["name"],
            "country": values["country"],
        }
        bad = False
        for column in NUMERIC_COLUMNS:
            try:
                parsed[column] = float(values[column])
            except ValueError:
                issues.append((line, f"{FIELD_LABELS[column]} is not a number ({values[column]!r})"))
                bad = True
        if bad:
            continue

        try:
            record = CityRecord(**parsed)
        except ValidationError as exc:
            issues.append((line, _validation_message(exc)))
            continue

        if record.city_id in first_line:
            issues.append((line, f"duplicate city_id {record.city_id} (first on line {first_line[record.city_id]})"))
            continue
        first_line[record.city_id] = line
        records.append(record)

    if issues:
        raise CityDataError(f"invalid {source}", issues)

    for record in records:
        if record.population_2022 < MIN_CITY_POPULATION:
            logger.warning(
                "%s (%s) has %.0f inhabitants, below the %d database scope",
                record.city_id, record.name, record.population_2022, MIN_CITY_POPULATION,
            )
    logger.info("Loaded %d cities from %s", len(records), source)
    return records


def load_city_database(path: Union[str, Path]) -> list[CityRecord]:
    """Read a city database CSV file; see parse_city_database."""
    path = Path(path)
    try:
        content = path.read_bytes()
    except OSError as exc:
        raise CityDataError(f"cannot read city database {path}: {exc}") from exc
    return parse_city_database(content, source=str(path))


def write_city_database(records: list[CityRecord], path: Union[str, Path]) -> None:
    """Write records with the exact header; floats use their shortest round-trip form."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(generate_city_database_csv(records))


def generate_city_database_csv(records: list[CityRecord]) -> str:
    output = StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(CITY_COLUMNS)
    for record in records:
        writer.writerow([
            record.city_id,
            record.name,
            record.country,
            *(repr(float(getattr(record, column))) for column in NUMERIC_COLUMNS),
        ])
    return output.getvalue()


# -----------------------------------------------------------------------
# Growth table
# -----------------------------------------------------------------------

def parse_growth_table(content: Union[bytes, str], source: str = "growth table") -> dict[tuple[str, int], tuple[float, float]]:
    """
    Parse a per-year growth table (city_id,year,pop_growth,gdp_growth).

    Returns:
        Mapping (city_id, year) -> (population growth, GDP per capita growth)
    """
    df = _read_frame(content, GROWTH_COLUMNS, source)

    table: dict[tuple[str, int], tuple[float, float]] = {}
    issues: list[tuple[int, str]] = []
    for position, row in enumerate(df.itertuples(index=False)):
        line = position + 2
        city_id, year, pop_growth, gdp_growth = (_cell(value) for value in row)
        if not any((city_id, year, pop_growth, gdp_growth)):
            continue
        if not city_id:
            issues.append((line, "city_id is empty"))
            continue
        try:
            key = (city_id, int(year))
            rates = (float(pop_growth), float(gdp_growth))
        except ValueError:
            issues.append((line, "year must be an integer and growth rates numbers"))
            continue
        if not all(np.isfinite(rates)) or min(rates) <= -1:
            issues.append((line, "growth rates must be finite and greater than -1"))
            continue
        if key in table:
            issues.append((line, f"duplicate entry for {city_id} {key[1]}"))
            continue
        table[key] = rates

    if issues:
        raise CityDataError(f"invalid {source}", issues)
    logger.info("Loaded %d growth entries from %s", len(table), source)
    return table


def load_growth_table(path: Optional[Union[str, Path]]) -> Optional[GrowthTable]:
    if path is None:
        return None
    path = Path(path)
    try:
        content = path.read_bytes()
    except OSError as exc:
        raise CityDataError(f"cannot read growth table {path}: {exc}") from exc
    return parse_growth_table(content, source=str(path))


# -----------------------------------------------------------------------
# Synthetic database
# -----------------------------------------------------------------------

def _log_uniform(rng: np.random.Generator, bounds: tuple[float, float], count: int) -> np.ndarray:
    low, high = np.log(bounds[0]), np.log(bounds[1])
    return np.exp(rng.uniform(low, high, size=count))


def generate_synthetic_database(count: int, seed: int = 7) -> list[CityRecord]:
    """
    Deterministic synthetic city database for performance and property runs.

    Areas, populations and GDP per capita are log-uniform over their ranges; the largest
    city always gets the upper area bound.

    Args:
        count: Number of cities
        seed: Seed of the numpy generator

    Returns:
        Records ordered by city id
    """
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if count == 0:
        return []

    rng = np.random.default_rng(seed)
    areas = np.round(_log_uniform(rng, SYNTH_AREA_SQKM, count), 1)
    areas[int(np.argmax(areas))] = SYNTH_AREA_SQKM[1]
    populations = np.round(_log_uniform(rng, SYNTH_POPULATION, count), -3)
    gdps = np.round(_log_uniform(rng, SYNTH_GDP, count), 0)
    countries = rng.integers(1, SYNTH_COUNTRIES + 1, size=count)
    pop_growth = np.round(rng.uniform(0.0, 0.02, size=count), 4)
    gdp_growth = np.round(rng.uniform(0.0, 0.03, size=count), 4)

    return [
        CityRecord(
            city_id=f"SYN{i:04d}",
            name=f"Synthetic City {i}",
            country=f"Country {int(countries[i]):02d}",
            population_2022=float(max(populations[i], SYNTH_POPULATION[0])),
            area_sqkm=float(areas[i]),
            gdp_per_capita_2022=float(gdps[i]),
            pop_growth_rate=float(pop_growth[i]),
            gdp_growth_rate=float(gdp_growth[i]),
        )
        for i in range(count)
    ]
