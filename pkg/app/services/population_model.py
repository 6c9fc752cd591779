"""
Monocentric population distribution over the grid cells.
"""
from dataclasses import dataclass
import math

import numpy as np
from numpy.typing import ArrayLike

from app.models.schemas import DecayParams, ExponentDenominator
from app.services.city_geometry import CityGrid


@dataclass(frozen=True)
class PopulationField:
    """Real-valued persons per cell, aligned with CityGrid cell order."""
    pop: np.ndarray

    @property
    def total(self) -> float:
        return math.fsum(self.pop)


def density_factor(d: ArrayLike, d_max: float, params: DecayParams = DecayParams()):
    """
    Population density factor p(d) = k * x**((d_max - d) / d_max).

    p(0) = x*k at the centre and p(d_max) = k at the outermost cell. With the
    printed denominator (`exponent_denominator = d`) the exponent is (d_max - d)/d.

    Args:
        d: Distance(s) from the centre cell in km
        d_max: Distance of the outermost cell centre
        params: x (centre/edge ratio) and k (edge reference)

    Returns:
        Factor(s) with the shape of d; 1.0 everywhere for a single-cell city
    """
    d = np.asarray(d, dtype=float)
    if d_max <= 0:
        return np.ones_like(d)[()]

    denominator = d_max if params.exponent_denominator == ExponentDenominator.D_MAX else d
    log_x = math.log(params.x * params.k) - math.log(params.k)
    exponent = log_x * (d_max - d) / denominator + math.log(params.k)
    return np.exp(exponent)[()]


def distribute_population(grid: CityGrid, total_pop: float,
                          params: DecayParams = DecayParams()) -> PopulationField:
    """
    Split the city population over cells in proportion to the density factor.

    Args:
        grid: City grid
        total_pop: Inhabitants
        params: Decay parameters

    Returns:
        PopulationField summing to total_pop
    """
    if not total_pop > 0:
        raise ValueError(f"population must be positive, got {total_pop}")

    d = grid.dist_from_center_km
    if params.exponent_denominator == ExponentDenominator.D and grid.cell_count > 1:
        # printed form diverges at d = 0; the centre uses the intra-cell distance
        d = np.where(d == 0, grid.intra_distance_km, d)

    factors = np.atleast_1d(density_factor(d, grid.d_max_km, params))
    pop = total_pop * factors / math.fsum(factors)
    pop.setflags(write=False)
    return PopulationField(pop=pop)
