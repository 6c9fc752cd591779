"""
Door-to-door time and cost of the ground mode (AMT) and of the three-leg air taxi trip,
plus the city-specific vertiport density.
"""
from dataclasses import dataclass
import logging
import math
from typing import Sequence

import numpy as np

from app.models.schemas import AirTaxiParams, AmtParams, AreaCurve, DensityModel, GdpCurve
from app.services.city_geometry import (
    MIN_VERTIPORTS,
    CityGrid,
    VertiportNetwork,
    nearest_vertiport,
    nearest_vertiports,
)

logger = logging.getLogger(__name__)

# Scaling factors stay in (0, 1]
MIN_SCALING_FACTOR = 1e-6


@dataclass(frozen=True)
class ModeOption:
    """Time (hours) and monetary cost (EUR) of one itinerary."""
    time_h: float
    cost_eur: float
    available: bool = True


UNAVAILABLE = ModeOption(time_h=math.inf, cost_eur=math.inf, available=False)


# -----------------------------------------------------------------------
# Alternate mode
# -----------------------------------------------------------------------

def amt_cost_per_km(gdp_per_capita: float, params: AmtParams = AmtParams()) -> float:
    """Ground mode operating cost per km: (6e-6 * GDP + 0.0703) * 1.7."""
    return (params.cost_slope * gdp_per_capita + params.cost_intercept) * params.cost_adjustment


def amt_option(d_linear_km: float, gdp: float, params: AmtParams = AmtParams()) -> ModeOption:
    """
    Direct ground trip.

    Time uses the linear distance at the average urban speed; cost applies the detour.
    """
    if d_linear_km < 0:
        raise ValueError(f"distance must be non-negative, got {d_linear_km}")
    return ModeOption(
        time_h=d_linear_km / params.speed_kmh,
        cost_eur=amt_cost_per_km(gdp, params) * d_linear_km * params.detour_factor,
    )


# -----------------------------------------------------------------------
# Vertiport density
# -----------------------------------------------------------------------

def area_scaling_factor(area_sqkm: float, model: DensityModel = DensityModel()) -> float:
    """Linear up to the knee (a fraction of the reference area), 1 beyond it."""
    if model.area_curve == AreaCurve.NONE:
        return 1.0
    knee = model.area_knee_fraction * model.area_ref_sqkm
    return min(1.0, area_sqkm / knee)


def gdp_scaling_factor(gdp: float, model: DensityModel = DensityModel()) -> float:
    """(GDP / GDP_ref) ** exponent, capped at 1 and floored at MIN_SCALING_FACTOR."""
    if model.gdp_curve == GdpCurve.NONE:
        return 1.0
    return min(1.0, max(MIN_SCALING_FACTOR, (gdp / model.gdp_ref) ** model.gdp_exponent))


def vertiport_density(area_sqkm: float, gdp: float, vd_ref: float,
                      model: DensityModel = DensityModel()) -> float:
    """
    City-specific vertiport density vd_ref * SF_area * SF_GDP.

    Args:
        area_sqkm: City area
        gdp: GDP per capita in EUR
        vd_ref: Reference density (vertiports per sq km) of the run
        model: Reference city and scaling curves

    Returns:
        Vertiports per sq km
    """
    if not area_sqkm > 0:
        raise ValueError(f"area must be positive, got {area_sqkm}")
    if gdp < 0:
        raise ValueError(f"GDP per capita must be non-negative, got {gdp}")
    return vd_ref * area_scaling_factor(area_sqkm, model) * gdp_scaling_factor(gdp, model)


def vertiport_count(area_sqkm: float, vd_city: float, minimum: int = MIN_VERTIPORTS) -> int:
    """Vertiports for a city: density times area, rounded half up, at least `minimum`."""
    if vd_city < 0:
        raise ValueError(f"vertiport density must be non-negative, got {vd_city}")
    return max(minimum, int(math.floor(vd_city * area_sqkm + 0.5)))


# -----------------------------------------------------------------------
# Air taxi
# -----------------------------------------------------------------------

def air_taxi_option(origin_center: Sequence[float], dest_center: Sequence[float],
                    network: VertiportNetwork, ticket_price_per_km: float, gdp: float,
                    at: AirTaxiParams = AirTaxiParams(),
                    amt: AmtParams = AmtParams()) -> ModeOption:
    """
    Pre-carriage, flight and onward carriage between two points.

    Both ground legs use the AMT speed and cost rules; the flight covers the detoured
    distance between the nearest vertiports. The same vertiport at both ends means no
    flight, so the option is unavailable.
    """
    v_o, access_km = nearest_vertiport(origin_center, network)
    v_d, egress_km = nearest_vertiport(dest_center, network)
    if v_o == v_d:
        return UNAVAILABLE

    o = network.positions[v_o]
    d = network.positions[v_d]
    flight_km = math.hypot(d[0] - o[0], d[1] - o[1]) * at.flight_detour

    access = amt_option(access_km, gdp, amt)
    egress = amt_option(egress_km, gdp, amt)
    return ModeOption(
        time_h=access.time_h + egress.time_h + flight_km / at.cruise_kmh + at.fixed_time_h,
        cost_eur=access.cost_eur + egress.cost_eur + ticket_price_per_km * flight_km,
    )


@dataclass(frozen=True)
class CellAccess:
    """Nearest vertiport and ground distance to it for every grid cell."""
    vertiport: np.ndarray
    access_km: np.ndarray
    flight_km: np.ndarray  # detoured vertiport-to-vertiport distance matrix


def cell_access(grid: CityGrid, network: VertiportNetwork,
                at: AirTaxiParams = AirTaxiParams()) -> CellAccess:
    """Precompute per-cell access legs and the vertiport flight distances."""
    vertiport, access_km = nearest_vertiports(grid.centers_km, network)
    p = network.positions
    flight_km = np.hypot(p[:, None, 0] - p[None, :, 0], p[:, None, 1] - p[None, :, 1]) * at.flight_detour
    return CellAccess(vertiport=vertiport, access_km=access_km, flight_km=flight_km)


@dataclass(frozen=True)
class OptionBlock:
    """Both modes for a block of OD pairs (origin rows x all destinations)."""
    amt_time_h: np.ndarray
    amt_cost_eur: np.ndarray
    air_time_h: np.ndarray
    air_cost_eur: np.ndarray
    air_available: np.ndarray
    flight_km: np.ndarray
    access_km: np.ndarray
    egress_km: np.ndarray


def option_block(grid: CityGrid, origins: slice, access: CellAccess, ticket_price_per_km: float,
                 gdp: float, at: AirTaxiParams = AirTaxiParams(),
                 amt: AmtParams = AmtParams()) -> OptionBlock:
    """
    Vectorised amt_option / air_taxi_option for every pair in a block of origins.

    Unavailable air options carry infinite time and cost.
    """
    rate = amt_cost_per_km(gdp, amt)
    d_linear = grid.key_distance_km(grid.lattice_keys(origins))

    v_o = access.vertiport[origins][:, None]
    v_d = access.vertiport[None, :]
    available = v_o != v_d
    flight_km = access.flight_km[v_o, v_d]
    access_km = np.broadcast_to(access.access_km[origins][:, None], d_linear.shape)
    egress_km = np.broadcast_to(access.access_km[None, :], d_linear.shape)
    air_time = access_km / amt.speed_kmh + egress_km / amt.speed_kmh \
        + flight_km / at.cruise_kmh + at.fixed_time_h
    air_cost = rate * access_km * amt.detour_factor + rate * egress_km * amt.detour_factor \
        + ticket_price_per_km * flight_km

    return OptionBlock(
        amt_time_h=d_linear / amt.speed_kmh,
        amt_cost_eur=rate * d_linear * amt.detour_factor,
        air_time_h=np.where(available, air_time, np.inf),
        air_cost_eur=np.where(available, air_cost, np.inf),
        air_available=available,
        flight_km=np.where(available, flight_km, 0.0),
        access_km=access_km,
        egress_km=egress_km,
    )
