from enum import Enum
import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class FrozenModel(BaseModel):
    """Immutable parameter model; unknown keys are rejected."""
    model_config = ConfigDict(frozen=True, extra="forbid")


# -----------------------------------------------------------------------
# Model parameter groups
# -----------------------------------------------------------------------

class GridSpec(FrozenModel):
    """Square cell size shared by every city."""
    cell_edge_km: float = Field(2.0, gt=0)


class ExponentDenominator(str, Enum):
    """Denominator of the density exponent: corrected (d_max) or as printed (d)."""
    D_MAX = "d_max"
    D = "d"


class DecayParams(FrozenModel):
    """Centre-to-edge population decay."""
    x: float = Field(10.0, gt=1)   # centre / edge density ratio
    k: float = Field(2.0, gt=0)    # edge reference value
    exponent_denominator: ExponentDenominator = ExponentDenominator.D_MAX


class TripParams(FrozenModel):
    """Trip generation rate and the cumulative trip-length law."""
    trips_per_person_per_day: float = Field(3.0, gt=0)
    share_slope: float = 0.2051
    share_intercept: float = 0.0592


class AmtParams(FrozenModel):
    """Alternate ground mode (AMT)."""
    speed_kmh: float = Field(18.0, gt=0)
    detour_factor: float = Field(1.2, ge=1)
    cost_slope: float = Field(6e-6, ge=0)       # EUR per km per EUR GDP per capita
    cost_intercept: float = Field(0.0703, ge=0)  # EUR per km
    cost_adjustment: float = Field(1.7, gt=0)


class AirTaxiParams(FrozenModel):
    """Air taxi leg timings. The ticket price is a run input, not a parameter."""
    cruise_kmh: float = Field(100.0, gt=0)
    flight_detour: float = Field(1.05, ge=1)
    takeoff_min: float = Field(2.0, ge=0)
    landing_min: float = Field(2.0, ge=0)
    boarding_min: float = Field(3.0, ge=0)
    deboarding_min: float = Field(3.0, ge=0)

    @property
    def fixed_time_h(self) -> float:
        """Take-off, landing, boarding and deboarding in hours."""
        return (self.takeoff_min + self.landing_min + self.boarding_min + self.deboarding_min) / 60.0


class AreaCurve(str, Enum):
    KNEE_LINEAR = "knee_linear"
    NONE = "none"


class GdpCurve(str, Enum):
    POWER = "power"
    NONE = "none"


class DensityModel(FrozenModel):
    """City-specific vertiport density scaling around the reference city."""
    area_ref_sqkm: float = Field(3000.0, gt=0)
    gdp_ref: float = Field(65000.0, gt=0)
    area_curve: AreaCurve = AreaCurve.KNEE_LINEAR
    area_knee_fraction: float = Field(0.2, gt=0, le=1)
    gdp_curve: GdpCurve = GdpCurve.POWER
    gdp_exponent: float = Field(2.0, gt=0)
    min_vertiports: int = Field(5, ge=5)


class ChoiceParams(FrozenModel):
    """Binary logit between AMT and air taxi."""
    beta_gc: float = Field(-0.25, lt=0)   # utility per EUR of generalized cost
    beta_amt: float = 0.0
    beta_air: float = 0.0
    vtt_slope: float = 0.0003              # EUR/h per EUR GDP per capita
    vtt_intercept: float = -0.3404         # EUR/h


class FleetParams(FrozenModel):
    """Aircraft size, occupancy and utilisation."""
    seats_per_aircraft: int = Field(4, ge=1)
    seat_load_factor: float = Field(0.5, gt=0, le=1)
    utilization_per_hour: float = Field(0.33, gt=0)


class DensityInterpolation(str, Enum):
    GEOMETRIC = "geometric"
    LINEAR = "linear"


class MarketPaths(FrozenModel):
    """Ticket price and reference density anchors for the market scenarios."""
    first_year: int = 2030
    last_year: int = 2050
    price_optimistic_2030: float = Field(4.10, gt=0)
    price_conservative_2030: float = Field(5.70, gt=0)
    price_reduction_by_last_year: float = Field(1.0 / 3.0, ge=0, lt=1)
    vd_high_2030: float = Field(0.002, gt=0)
    vd_high_2050: float = Field(0.02, gt=0)
    vd_low_2030: float = Field(0.001, gt=0)
    vd_low_2050: float = Field(0.01, gt=0)
    density_interpolation: DensityInterpolation = DensityInterpolation.GEOMETRIC

    @model_validator(mode="after")
    def _check_years(self) -> "MarketPaths":
        if self.last_year <= self.first_year:
            raise ValueError("last_year must be after first_year")
        return self


class FlightTimeBasis(str, Enum):
    """Which per-trip minutes count as flight time for the fleet equation."""
    AIRBORNE = "airborne"
    AIRBORNE_TURNAROUND = "airborne_turnaround"


class SweepDensityMode(str, Enum):
    """How a sweep density value is applied to each city."""
    UNIFORM = "uniform"
    REFERENCE = "reference"


class RunSettings(FrozenModel):
    """Run-level switches that are not model parameters."""
    base_year: int = 2022
    eligibility_threshold: float = Field(1000.0, ge=0)  # daily air trips
    flight_time_basis: FlightTimeBasis = FlightTimeBasis.AIRBORNE
    sweep_density_mode: SweepDensityMode = SweepDensityMode.UNIFORM
    block_size: int = Field(256, ge=1)  # origin cells per vectorised block


# -----------------------------------------------------------------------
# City data
# -----------------------------------------------------------------------

# Database scope: cities above this size
MIN_CITY_POPULATION = 500_000


class CityRecord(FrozenModel):
    """One urban agglomeration of the city database."""
    city_id: str = Field(min_length=1)
    name: str
    country: str
    population_2022: float = Field(gt=0)
    area_sqkm: float = Field(gt=0)
    gdp_per_capita_2022: float = Field(ge=0)
    pop_growth_rate: float = Field(0.0, gt=-1)
    gdp_growth_rate: float = Field(0.0, gt=-1)

    @field_validator("population_2022", "area_sqkm", "gdp_per_capita_2022",
                     "pop_growth_rate", "gdp_growth_rate")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value


class ProjectedCity(FrozenModel):
    """A city record projected to a forecast year."""
    city_id: str
    name: str
    country: str
    year: int
    population: float = Field(gt=0)
    area_sqkm: float = Field(gt=0)
    gdp_per_capita: float = Field(ge=0)


# -----------------------------------------------------------------------
# Scenarios
# -----------------------------------------------------------------------

class DensityLevel(str, Enum):
    HIGH = "high"
    LOW = "low"


class PriceLevel(str, Enum):
    OPTIMISTIC = "optimistic"
    CONSERVATIVE = "conservative"


class ScenarioName(str, Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"


# Market development scenarios: (vertiport density path, ticket price path)
SCENARIO_LEVERS: dict[ScenarioName, tuple[DensityLevel, PriceLevel]] = {
    ScenarioName.S1: (DensityLevel.HIGH, PriceLevel.OPTIMISTIC),
    ScenarioName.S2: (DensityLevel.LOW, PriceLevel.CONSERVATIVE),
    ScenarioName.S3: (DensityLevel.HIGH, PriceLevel.CONSERVATIVE),
    ScenarioName.S4: (DensityLevel.LOW, PriceLevel.OPTIMISTIC),
}


class ScenarioSpec(FrozenModel):
    """A market scenario and the years it is evaluated for."""
    name: ScenarioName
    years: tuple[int, ...] = (2030, 2035, 2040, 2045, 2050)

    @property
    def density(self) -> DensityLevel:
        return SCENARIO_LEVERS[self.name][0]

    @property
    def price(self) -> PriceLevel:
        return SCENARIO_LEVERS[self.name][1]


# -----------------------------------------------------------------------
# Results
# -----------------------------------------------------------------------

class CityResult(BaseModel):
    """Demand, movements and fleet for one city in one year."""
    model_config = ConfigDict(frozen=True)

    city_id: str
    country: str
    year: int
    ticket_price: float
    vd_city: float
    vertiport_count: int
    cell_count: int
    daily_internal_trips: float = 0.0   # trips starting and ending inside the city
    discarded_trips: float = 0.0        # trips leaving the city
    daily_air_trips: float = 0.0
    air_share: float = 0.0
    daily_movements: float = 0.0
    daily_flight_hours: float = 0.0
    fleet_size: float = 0.0
    fleet_size_ceil: int = 0
    mean_access_km: float = 0.0         # air-trip weighted
    mean_egress_km: float = 0.0
    eligible: bool = False


class AggregateTotals(BaseModel):
    """Summed city values for one scope (global or one country)."""
    scope: str
    total_daily_trips: float = 0.0
    total_daily_movements: float = 0.0
    total_daily_flight_hours: float = 0.0
    total_fleet: float = 0.0
    total_fleet_ceil: int = 0
    eligible_city_count: int = 0
    city_count: int = 0


class GlobalResult(BaseModel):
    """All cities for one year and one (price, density) setting."""
    year: int
    scenario: Optional[str] = None
    ticket_price: float
    vd: float
    totals: AggregateTotals
    cities: list[CityResult] = []

    @property
    def total_daily_trips(self) -> float:
        return self.totals.total_daily_trips

    @property
    def total_daily_movements(self) -> float:
        return self.totals.total_daily_movements

    @property
    def total_fleet(self) -> float:
        return self.totals.total_fleet

    @property
    def eligible_city_count(self) -> int:
        return self.totals.eligible_city_count

    def country_totals(self) -> list[AggregateTotals]:
        """Totals per country, sorted by country name."""
        from app.services.city_demand import aggregate_totals

        countries = sorted({c.country for c in self.cities})
        return [
            aggregate_totals(
                [c for c in self.cities if c.country == country],
                scope=f"country:{country}",
            )
            for country in countries
        ]


class ResultRow(BaseModel):
    """Flat output row for CSV / JSON export."""
    run_id: str
    scenario: str = ""
    year: int
    scope: str              # city_id, GLOBAL or country:<name>
    price_eur_km: float = Field(ge=0)
    vd_per_sqkm: float = Field(ge=0)
    daily_trips: float = Field(ge=0)
    daily_movements: float = Field(ge=0)
    daily_flight_hours: float = Field(ge=0)
    fleet_size: float = Field(ge=0)
    eligible: bool

    @field_validator("price_eur_km", "vd_per_sqkm", "daily_trips", "daily_movements",
                     "daily_flight_hours", "fleet_size")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value


class SweepGrid(BaseModel):
    """Global daily trips for every (price, density) pair; rows follow prices."""
    run_id: str
    year: int
    prices: list[float]
    densities: list[float]
    daily_trips: list[list[float]]
