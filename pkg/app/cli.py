"""
Command-line entry point: validate, run-city, sweep, scenario and synth-db.

Exit codes: 0 success, 1 data or IO error, 2 usage error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from app.exceptions import ForecastError, ScenarioError
from app.models.config import RunConfig, config_digest, config_echo, load_config
from app.models.schemas import ScenarioName, ScenarioSpec
from app.services.city_database import (
    generate_city_database_csv,
    generate_synthetic_database,
    load_city_database,
    load_growth_table,
)
from app.services.city_demand import evaluate_city, prepare_city
from app.services.csv_generator import (
    OUTPUT_FORMATS,
    generate_results_csv,
    generate_results_json,
    generate_sweep_csv,
    generate_sweep_json,
    row_from_city_result,
    rows_from_global,
    write_od_dump,
)
from app.services.projection import project_city
from app.services.scenarios import run_scenario, run_sweep
from app.services.transport_options import vertiport_density

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE = 2

DEFAULT_PRICES = "2.5:6.0:0.5"
DEFAULT_DENSITIES = "0.01,0.02,0.04"
DEFAULT_YEARS = "2030:2050:5"


# -----------------------------------------------------------------------
# Argument types
# -----------------------------------------------------------------------

def parse_float_range(text: str) -> list[float]:
    """
    Parse "start:stop:step" (inclusive) or a comma separated list.

    Examples:
        "2.5:6.0:0.5" -> [2.5, 3.0, ..., 6.0]
        "0.01,0.02,0.04" -> [0.01, 0.02, 0.04]
    """
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise argparse.ArgumentTypeError(f"invalid range {text!r}: need start <= stop and step > 0")
            count = int(round((stop - start) / step)) + 1
            values = [round(start + i * step, 10) for i in range(count)]
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from exc

    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    if any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"values must be positive in {text!r}")
    return values


def parse_year_range(text: str) -> list[int]:
    """Parse "2030:2050:5" (inclusive) or "2030,2040" into years."""
    try:
        if ":" in text:
            start, stop, step = (int(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise argparse.ArgumentTypeError(f"invalid year range {text!r}")
            years = list(range(start, stop + 1, step))
        else:
            years = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid year list {text!r}") from exc
    if not years:
        raise argparse.ArgumentTypeError(f"empty year range {text!r}")
    return years


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from exc
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


# -----------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML or JSON config document (default: built-in values)")
    common.add_argument("--out", type=Path, help="Output file (default: stdout)")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default="csv", help="Output format (default: csv)")
    common.add_argument("--threads", type=positive_int, default=1, help="Worker processes (default: 1)")
    common.add_argument("--seed-echo", action="store_true",
                        help="Echo the effective config to <out>.config.json, or stdout without --out")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--cities", type=Path, required=True, help="City database CSV")
    data.add_argument("--growth", type=Path, help="Optional per-year growth table CSV")

    parser = argparse.ArgumentParser(
        prog="airtaxi-forecast",
        description="Urban air taxi demand, movement and fleet forecasts for a city database",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common, data], help="Load the city database and config and report")

    city = sub.add_parser("run-city", parents=[common, data], help="Demand for a single city")
    city.add_argument("--city", required=True, help="city_id")
    city.add_argument("--year", type=int, required=True)
    city.add_argument("--price", type=positive_float, required=True, help="Ticket price in EUR per km")
    city.add_argument("--vd", type=positive_float, required=True,
                      help="Reference vertiport density per sq km (scaled to the city)")
    city.add_argument("--dump-od", type=Path, help="Write the city's OD matrix as CSV")

    sweep = sub.add_parser("sweep", parents=[common, data], help="Global trips over a price x density grid")
    sweep.add_argument("--prices", type=parse_float_range, default=DEFAULT_PRICES)
    sweep.add_argument("--densities", type=parse_float_range, default=DEFAULT_DENSITIES)
    sweep.add_argument("--year", type=int, help="Forecast year (default: config base year)")

    scenario = sub.add_parser("scenario", parents=[common, data], help="Market scenario time series")
    scenario.add_argument("--name", choices=[s.value for s in ScenarioName], required=True)
    scenario.add_argument("--years", type=parse_year_range, default=DEFAULT_YEARS)
    scenario.add_argument("--by-country", action="store_true", help="Add one row per country")

    synth = sub.add_parser("synth-db", parents=[common], help="Write a synthetic city database")
    synth.add_argument("--count", type=positive_int, default=990)
    synth.add_argument("--seed", type=int, default=7)

    return parser


# -----------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------

def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    logger.info("Wrote %s", out)


def _echo_config(config: RunConfig, out: Optional[Path]) -> None:
    text = json.dumps(config_echo(config), sort_keys=True, indent=2) + "\n"
    _emit(text, out.with_name(out.name + ".config.json") if out else None)


def _cmd_validate(args, config: RunConfig) -> int:
    db = load_city_database(args.cities)
    growth = load_growth_table(args.growth)
    countries = len({r.country for r in db})
    lines = [
        f"cities: {len(db)}",
        f"countries: {countries}",
        f"growth entries: {len(growth) if growth else 0}",
        f"config digest: {config_digest(config)}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_run_city(args, config: RunConfig) -> int:
    db = load_city_database(args.cities)
    growth = load_growth_table(args.growth)
    record = next((r for r in db if r.city_id == args.city), None)
    if record is None:
        raise ForecastError(f"unknown city id {args.city!r}")

    city = project_city(record, args.year, config.run.base_year, growth)
    model = prepare_city(city, config)
    vd_city = vertiport_density(city.area_sqkm, city.gdp_per_capita, args.vd, config.density)
    result = evaluate_city(model, args.price, vd_city, config)
    logger.info(
        "%s %d: %d cells, %d vertiports, %.1f air trips/day of %.1f internal",
        result.city_id, result.year, result.cell_count, result.vertiport_count,
        result.daily_air_trips, result.daily_internal_trips,
    )

    if args.dump_od:
        write_od_dump(model.od, args.dump_od, config_digest(config), config.run.block_size)

    rows = [row_from_city_result(result, config_digest(config))]
    text = generate_results_csv(rows) if args.format == "csv" else generate_results_json(rows, config)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_sweep(args, config: RunConfig) -> int:
    db = load_city_database(args.cities)
    growth = load_growth_table(args.growth)
    year = args.year if args.year is not None else config.run.base_year
    grid = run_sweep(db, args.prices, args.densities, year, config, args.threads, growth)
    text = generate_sweep_csv(grid) if args.format == "csv" else generate_sweep_json(grid, config)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_scenario(args, config: RunConfig) -> int:
    db = load_city_database(args.cities)
    growth = load_growth_table(args.growth)
    spec = ScenarioSpec(name=ScenarioName(args.name), years=tuple(args.years))
    series = run_scenario(spec, db, config, args.threads, growth)

    run_id = config_digest(config)
    rows = [row for result in series for row in rows_from_global(result, run_id, by_country=args.by_country)]
    text = generate_results_csv(rows) if args.format == "csv" else generate_results_json(rows, config)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_synth_db(args, config: RunConfig) -> int:
    records = generate_synthetic_database(args.count, args.seed)
    _emit(generate_city_database_csv(records), args.out)
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "run-city": _cmd_run_city,
    "sweep": _cmd_sweep,
    "scenario": _cmd_scenario,
    "synth-db": _cmd_synth_db,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        config = load_config(args.config)
        logger.info(
            "Command %s, run id %s, flight-time basis %s, %d worker(s)",
            args.command, config_digest(config), config.run.flight_time_basis.value, args.threads,
        )
        if args.seed_echo:
            _echo_config(config, args.out)
        return COMMANDS[args.command](args, config)
    except ScenarioError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ForecastError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
