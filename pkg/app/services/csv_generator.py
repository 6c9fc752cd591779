import csv
from io import StringIO
import json
import logging
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from app.models.config import RunConfig, config_digest, config_echo
from app.models.schemas import CityResult, GlobalResult, ResultRow, SweepGrid
from app.services.trip_demand import ODMatrix

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "run_id",
    "scenario",
    "year",
    "scope",
    "price_eur_km",
    "vd_per_sqkm",
    "daily_trips",
    "daily_movements",
    "daily_flight_hours",
    "fleet_size",
    "eligible",
]

OD_COLUMNS = ["run_id", "origin_ix", "origin_iy", "dest_ix", "dest_iy", "trips_per_day"]

OUTPUT_FORMATS = ("csv", "json")


def format_value(value) -> str:
    """Fixed, locale-free text form: shortest round-trip floats, lower-case booleans."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _dump_json(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_text(text: str, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    logger.info("Wrote %s", path)


# -----------------------------------------------------------------------
# Result rows
# -----------------------------------------------------------------------

def row_from_city_result(result: CityResult, run_id: str, scenario: str = "") -> ResultRow:
    return ResultRow(
        run_id=run_id,
        scenario=scenario,
        year=result.year,
        scope=result.city_id,
        price_eur_km=result.ticket_price,
        vd_per_sqkm=result.vd_city,
        daily_trips=result.daily_air_trips,
        daily_movements=result.daily_movements,
        daily_flight_hours=result.daily_flight_hours,
        fleet_size=result.fleet_size,
        eligible=result.eligible,
    )


def rows_from_global(result: GlobalResult, run_id: str, include_cities: bool = True,
                     by_country: bool = False) -> List[ResultRow]:
    """
    Flatten a global result: city rows, optional country rows, then the GLOBAL row.

    City rows carry the city's own vertiport density; aggregate rows carry the reference
    density. An aggregate row is eligible when any of its cities is.
    """
    scenario = result.scenario or ""
    rows = []
    if include_cities:
        rows.extend(row_from_city_result(c, run_id, scenario) for c in result.cities)

    totals = result.country_totals() if by_country else []
    totals.append(result.totals)
    for agg in totals:
        rows.append(ResultRow(
            run_id=run_id,
            scenario=scenario,
            year=result.year,
            scope=agg.scope,
            price_eur_km=result.ticket_price,
            vd_per_sqkm=result.vd,
            daily_trips=agg.total_daily_trips,
            daily_movements=agg.total_daily_movements,
            daily_flight_hours=agg.total_daily_flight_hours,
            fleet_size=agg.total_fleet,
            eligible=agg.eligible_city_count > 0,
        ))
    return rows


def generate_results_csv(rows: Iterable[ResultRow]) -> str:
    """Result rows as CSV text; no rows gives a header-only document."""
    output = StringIO()
    writer = csv.DictWriter(output, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: format_value(getattr(row, column)) for column in RESULT_COLUMNS})
    return output.getvalue()


def generate_results_json(rows: Iterable[ResultRow], config: RunConfig) -> str:
    return _dump_json({
        "run_id": config_digest(config),
        "config": config_echo(config),
        "rows": [row.model_dump() for row in rows],
    })


def write_results(rows: Iterable[ResultRow], path: Union[str, Path], fmt: str,
                  config: RunConfig) -> None:
    """
    Write result rows as CSV or JSON.

    Args:
        rows: Rows in output order
        path: Destination file
        fmt: "csv" or "json"
        config: Effective config, embedded in JSON output

    Raises:
        ValueError for an unknown format, OSError when the path is not writable
    """
    if fmt == "csv":
        text = generate_results_csv(rows)
    elif fmt == "json":
        text = generate_results_json(rows, config)
    else:
        raise ValueError(f"unknown output format {fmt!r}, expected one of {OUTPUT_FORMATS}")
    _write_text(text, path)


# -----------------------------------------------------------------------
# Sweep grid
# -----------------------------------------------------------------------

def generate_sweep_csv(grid: SweepGrid) -> str:
    """One row per price, one column per density; every row leads with the run id."""
    output = StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(["run_id", "price_eur_km", *(format_value(float(d)) for d in grid.densities)])
    for price, row in zip(grid.prices, grid.daily_trips):
        writer.writerow([grid.run_id, format_value(float(price)), *(format_value(float(v)) for v in row)])
    return output.getvalue()


def generate_sweep_json(grid: SweepGrid, config: RunConfig) -> str:
    return _dump_json({
        "run_id": grid.run_id,
        "config": config_echo(config),
        "year": grid.year,
        "prices": grid.prices,
        "densities": grid.densities,
        "daily_trips": grid.daily_trips,
    })


def write_sweep(grid: SweepGrid, path: Union[str, Path], fmt: str, config: RunConfig) -> None:
    if fmt == "csv":
        text = generate_sweep_csv(grid)
    elif fmt == "json":
        text = generate_sweep_json(grid, config)
    else:
        raise ValueError(f"unknown output format {fmt!r}, expected one of {OUTPUT_FORMATS}")
    _write_text(text, path)


# -----------------------------------------------------------------------
# OD dump
# -----------------------------------------------------------------------

def generate_od_csv(od: ODMatrix, run_id: str, block_size: int = 256) -> str:
    """Every OD pair with trips > 0, origins and destinations in grid order."""
    grid = od.grid
    output = StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(OD_COLUMNS)
    for origins, trips in od.iter_blocks(block_size):
        rows = np.arange(grid.cell_count)[origins]
        for local, origin in enumerate(rows):
            for dest in np.flatnonzero(trips[local] > 0):
                writer.writerow([
                    run_id, int(grid.ix[origin]), int(grid.iy[origin]),
                    int(grid.ix[dest]), int(grid.iy[dest]),
                    format_value(float(trips[local, dest])),
                ])
    return output.getvalue()


def write_od_dump(od: ODMatrix, path: Union[str, Path], run_id: str, block_size: int = 256) -> None:
    _write_text(generate_od_csv(od, run_id, block_size), path)
