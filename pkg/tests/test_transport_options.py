import math

import numpy as np
import pytest

from app.models.schemas import AirTaxiParams, AreaCurve, DensityModel, GdpCurve
from app.services.city_geometry import VertiportNetwork, build_grid, place_vertiports
from app.services.transport_options import (
    MIN_SCALING_FACTOR,
    air_taxi_option,
    amt_cost_per_km,
    amt_option,
    area_scaling_factor,
    cell_access,
    gdp_scaling_factor,
    option_block,
    vertiport_count,
    vertiport_density,
)


def test_amt_cost_per_km():
    assert amt_cost_per_km(0.0) == pytest.approx(0.119510, abs=1e-9)
    assert amt_cost_per_km(50_000.0) == pytest.approx(0.62951, abs=1e-6)
    g = 30_000.0
    assert amt_cost_per_km(2 * g) - amt_cost_per_km(g) == pytest.approx(6e-6 * g * 1.7, rel=1e-12)


def test_amt_option():
    option = amt_option(9.0, 50_000.0)
    assert option.time_h == pytest.approx(0.5)
    assert option.cost_eur == pytest.approx(9.0 * 1.2 * 0.62951, abs=1e-6)
    assert option.available
    zero = amt_option(0.0, 50_000.0)
    assert (zero.time_h, zero.cost_eur) == (0.0, 0.0)


def test_amt_option_rejects_negative_distance():
    with pytest.raises(ValueError):
        amt_option(-1.0, 50_000.0)


def test_vertiport_density_reference_city():
    assert vertiport_density(3000.0, 65_000.0, 0.02) == pytest.approx(0.02)


def test_area_knee():
    assert area_scaling_factor(600.0) == 1.0
    assert area_scaling_factor(9000.0) == 1.0
    assert area_scaling_factor(300.0) == pytest.approx(0.5)
    assert area_scaling_factor(300.0, DensityModel(area_curve=AreaCurve.NONE)) == 1.0


def test_gdp_curve():
    assert vertiport_density(1000.0, 32_500.0, 0.02) == pytest.approx(0.005)
    assert gdp_scaling_factor(130_000.0) == 1.0
    assert gdp_scaling_factor(1.0, DensityModel(gdp_curve=GdpCurve.NONE)) == 1.0


def test_scaling_factors_stay_positive():
    assert gdp_scaling_factor(0.0) == MIN_SCALING_FACTOR
    assert 0.0 < vertiport_density(1000.0, 0.0, 0.02) <= 0.02
    assert 0.0 < area_scaling_factor(1e-3) <= 1.0
    assert vertiport_count(1000.0, vertiport_density(1000.0, 0.0, 0.02)) == 5


def test_vertiport_count():
    assert vertiport_count(3000.0, 0.02) == 60
    assert vertiport_count(800.0, 0.001) == 5
    # 0.025 * 300 = 7.5 rounds half up
    assert vertiport_count(300.0, 0.025) == 8
    assert vertiport_count(100.0, 0.0) == 5


def test_air_taxi_option_between_vertiports():
    network = VertiportNetwork(positions=np.array([
        [0.0, 0.0], [20.0, 0.0], [100.0, 100.0], [-100.0, 100.0], [0.0, -100.0],
    ]))
    option = air_taxi_option((0.0, 0.0), (20.0, 0.0), network, 3.0, 50_000.0)
    assert option.available
    assert option.time_h == pytest.approx(21.0 / 100.0 + 10.0 / 60.0, abs=1e-9)
    assert option.cost_eur == pytest.approx(63.0)


def test_air_taxi_option_same_vertiport_unavailable():
    network = place_vertiports(5.0, 5)
    option = air_taxi_option((0.1, 0.1), (0.1, 0.1), network, 3.0, 50_000.0)
    assert not option.available
    assert math.isinf(option.time_h) and math.isinf(option.cost_eur)


def test_air_taxi_option_includes_ground_legs():
    network = place_vertiports(8.0, 6)
    origin, dest = (1.0, -3.0), (-5.0, 4.0)
    option = air_taxi_option(origin, dest, network, 4.0, 20_000.0)
    rate = amt_cost_per_km(20_000.0)
    p = network.positions
    a = np.hypot(*(p - origin).T).min()
    e = np.hypot(*(p - dest).T).min()
    assert option.cost_eur > rate * 1.2 * (a + e)
    assert option.time_h > (a + e) / 18.0 + 10.0 / 60.0


def test_more_vertiports_never_lengthen_access():
    grid = build_grid(400.0)
    sparse = place_vertiports(grid.radius_km, 6)
    dense = VertiportNetwork(positions=np.vstack((sparse.positions, place_vertiports(grid.radius_km, 20).positions)))
    a = cell_access(grid, sparse).access_km
    b = cell_access(grid, dense).access_km
    assert np.all(b <= a)


def test_option_block_matches_scalar_api():
    grid = build_grid(150.0)
    network = place_vertiports(grid.radius_km, 9)
    access = cell_access(grid, network)
    gdp, ticket = 42_000.0, 3.5
    block = option_block(grid, slice(0, grid.cell_count), access, ticket, gdp)
    centres = grid.centers_km

    for o in range(0, grid.cell_count, 3):
        for d in range(0, grid.cell_count, 2):
            d_lin = grid.intra_distance_km if o == d else float(np.hypot(*(centres[o] - centres[d])))
            amt = amt_option(d_lin, gdp)
            assert block.amt_time_h[o, d] == pytest.approx(amt.time_h, rel=1e-12)
            assert block.amt_cost_eur[o, d] == pytest.approx(amt.cost_eur, rel=1e-12)

            air = air_taxi_option(centres[o], centres[d], network, ticket, gdp)
            assert bool(block.air_available[o, d]) == air.available
            if air.available:
                assert block.air_time_h[o, d] == pytest.approx(air.time_h, rel=1e-12)
                assert block.air_cost_eur[o, d] == pytest.approx(air.cost_eur, rel=1e-12)
            else:
                assert math.isinf(block.air_cost_eur[o, d])


@pytest.mark.parametrize("area", [5.0, 400.0, 3000.0, 9000.0])
def test_sunflower_relayout_never_lengthens_mean_access(area):
    grid = build_grid(area)
    means = [float(cell_access(grid, place_vertiports(grid.radius_km, n)).access_km.mean())
             for n in (5, 10, 20, 40, 80)]
    assert all(b <= a + 1e-12 for a, b in zip(means, means[1:]))


def test_faster_cruise_shortens_door_to_door_time():
    network = place_vertiports(15.0, 12)
    origin, dest = (-9.0, 2.0), (8.0, -6.0)
    times = [air_taxi_option(origin, dest, network, 3.0, 40_000.0, AirTaxiParams(cruise_kmh=v)).time_h
             for v in (60.0, 100.0, 150.0, 250.0)]
    assert all(b < a for a, b in zip(times, times[1:]))
