import argparse
import json
import logging
from typing import Optional

from fastapi import APIRouter, File, Form, HTTPException, UploadFile
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse, Response

from app.cli import DEFAULT_DENSITIES, DEFAULT_PRICES, DEFAULT_YEARS, parse_float_range, parse_year_range
from app.exceptions import CityDataError, ForecastError
from app.models.config import RunConfig, build_config, config_digest, config_echo
from app.models.schemas import CityRecord, ScenarioName, ScenarioSpec
from app.services.city_database import parse_city_database
from app.services.city_demand import city_demand
from app.services.csv_generator import (
    OUTPUT_FORMATS,
    generate_results_csv,
    generate_sweep_csv,
    row_from_city_result,
    rows_from_global,
)
from app.services.scenarios import run_scenario, run_sweep

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["forecast"])


def _error_detail(exc: ForecastError) -> dict:
    detail = {"message": str(exc)}
    if isinstance(exc, CityDataError) and exc.issues:
        detail["issues"] = [{"line": line, "message": msg} for line, msg in exc.issues]
    return detail


async def _read_cities(file: UploadFile) -> list[CityRecord]:
    if not file.filename or not file.filename.lower().endswith(".csv"):
        raise HTTPException(status_code=400, detail="City database must be a .csv file")
    content = await file.read()
    try:
        return parse_city_database(content, source=file.filename)
    except CityDataError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))


def _parse_config(config: Optional[str]) -> RunConfig:
    """Config form field: a JSON document with the same keys as the config file."""
    if not config:
        return build_config()
    try:
        data = json.loads(config)
    except json.JSONDecodeError as exc:
        raise HTTPException(status_code=400, detail=f"Invalid config JSON: {exc}")
    if not isinstance(data, dict):
        raise HTTPException(status_code=400, detail="Config must be a JSON object")
    try:
        return build_config(data)
    except ForecastError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))


def _check_format(output_format: str) -> None:
    if output_format not in OUTPUT_FORMATS:
        raise HTTPException(status_code=400, detail=f"output_format must be one of {list(OUTPUT_FORMATS)}")


def _csv_response(content: str, filename: str) -> Response:
    return Response(
        content=content,
        media_type="text/csv",
        headers={"Content-Disposition": f"attachment; filename={filename}"},
    )


@router.post("/cities/validate")
async def validate_cities(file: UploadFile = File(...)):
    """Validate an uploaded city database and summarise it."""
    cities = await _read_cities(file)
    return {
        "success": True,
        "city_count": len(cities),
        "countries": sorted({c.country for c in cities}),
        "cities": [c.model_dump() for c in cities],
    }


@router.post("/forecast/city")
async def forecast_city(
    file: UploadFile = File(...),
    city_id: str = Form(...),
    year: int = Form(...),
    price: float = Form(...),
    vd: float = Form(...),
    config: Optional[str] = Form(default=None),
    output_format: str = Form(default="json"),
):
    """Demand for one city at a ticket price and reference vertiport density."""
    _check_format(output_format)
    cities = await _read_cities(file)
    run_config = _parse_config(config)

    record = next((c for c in cities if c.city_id == city_id), None)
    if record is None:
        raise HTTPException(status_code=404, detail=f"City {city_id} not found")
    if price <= 0 or vd <= 0:
        raise HTTPException(status_code=422, detail="price and vd must be positive")

    try:
        result = await run_in_threadpool(city_demand, record, year, price, vd, run_config)
    except ForecastError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))

    if output_format == "csv":
        row = row_from_city_result(result, config_digest(run_config))
        return _csv_response(generate_results_csv([row]), f"{city_id}_{year}.csv")
    return JSONResponse(content={
        "run_id": config_digest(run_config),
        "config": config_echo(run_config),
        "result": result.model_dump(),
    })


@router.post("/forecast/sweep")
async def forecast_sweep(
    file: UploadFile = File(...),
    prices: str = Form(default=DEFAULT_PRICES),
    densities: str = Form(default=DEFAULT_DENSITIES),
    year: Optional[int] = Form(default=None),
    config: Optional[str] = Form(default=None),
    output_format: str = Form(default="json"),
):
    """Global daily trips over a price x vertiport density grid."""
    _check_format(output_format)
    cities = await _read_cities(file)
    run_config = _parse_config(config)
    try:
        price_values = parse_float_range(prices)
        density_values = parse_float_range(densities)
    except argparse.ArgumentTypeError as exc:
        raise HTTPException(status_code=422, detail=str(exc))

    sweep_year = year if year is not None else run_config.run.base_year
    try:
        grid = await run_in_threadpool(run_sweep, cities, price_values, density_values, sweep_year, run_config)
    except ForecastError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))

    if output_format == "csv":
        return _csv_response(generate_sweep_csv(grid), f"sweep_{sweep_year}.csv")
    return JSONResponse(content={**grid.model_dump(), "config": config_echo(run_config)})


@router.post("/forecast/scenario")
async def forecast_scenario(
    file: UploadFile = File(...),
    name: str = Form(...),
    years: str = Form(default=DEFAULT_YEARS),
    by_country: bool = Form(default=False),
    config: Optional[str] = Form(default=None),
    output_format: str = Form(default="json"),
):
    """Market scenario time series with global (and optionally per-country) totals."""
    _check_format(output_format)
    cities = await _read_cities(file)
    run_config = _parse_config(config)
    try:
        spec = ScenarioSpec(name=ScenarioName(name), years=tuple(parse_year_range(years)))
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))

    try:
        series = await run_in_threadpool(run_scenario, spec, cities, run_config)
    except ForecastError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))

    run_id = config_digest(run_config)
    rows = [row for result in series for row in rows_from_global(result, run_id, by_country=by_country)]
    if output_format == "csv":
        return _csv_response(generate_results_csv(rows), f"scenario_{spec.name.value}.csv")
    return JSONResponse(content={
        "run_id": run_id,
        "config": config_echo(run_config),
        "rows": [row.model_dump() for row in rows],
    })
