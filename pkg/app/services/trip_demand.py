"""
Trip generation and distribution over the grid cells.

Each origin cell produces pop * trips_per_person trips. The cumulative trip-length law
assigns a share of them to every discrete distance class reachable from the origin,
and each class share is split over its destination cells by destination population.
Trips longer than the farthest reachable class leave the city and are discarded.
"""
from dataclasses import dataclass
import logging
import math
from typing import Iterator

import numpy as np
from numpy.typing import ArrayLike

from app.models.schemas import TripParams
from app.services.city_geometry import CityGrid
from app.services.population_model import PopulationField

logger = logging.getLogger(__name__)


def cumulative_trip_share(d: ArrayLike, params: TripParams = TripParams()):
    """
    Share of all trips no longer than d km: clamp(0.2051 * ln(d) + 0.0592, 0, 1).

    Args:
        d: Distance(s) in km, strictly positive

    Returns:
        Share(s) in [0, 1], non-decreasing in d
    """
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("trip distance must be positive")
    raw = params.share_slope * np.log(d) + params.share_intercept
    return np.clip(raw, 0.0, 1.0)[()]


@dataclass(frozen=True)
class ODMatrix:
    """
    Daily trips between cell pairs, stored per distance class.

    `class_keys` lists every non-zero squared lattice offset in the city. For origin c and
    class m, `class_trips[c, m]` trips are shared by the destinations at that offset in
    proportion to their population; `class_pop[c, m]` is their population sum (0 when the
    class is not reachable from c). The intra-cell class is held in `intra_trips`.
    """
    grid: CityGrid
    dest_pop: np.ndarray
    generated: np.ndarray
    intra_trips: np.ndarray
    discarded: np.ndarray
    class_keys: np.ndarray
    key_index: np.ndarray
    class_trips: np.ndarray
    class_pop: np.ndarray

    @property
    def cell_count(self) -> int:
        return self.grid.cell_count

    @property
    def distributed(self) -> np.ndarray:
        """Trips per origin that stay inside the city."""
        return self.intra_trips + self.class_trips.sum(axis=1)

    @property
    def total_internal(self) -> float:
        return math.fsum(self.intra_trips) + math.fsum(self.class_trips.ravel())

    @property
    def total_discarded(self) -> float:
        return math.fsum(self.discarded)

    def block(self, origins: slice) -> np.ndarray:
        """Dense trips for a block of origin rows against all destinations."""
        rows = np.arange(self.cell_count)[origins]
        if self.class_keys.size == 0:
            trips = np.zeros((rows.size, self.cell_count))
            trips[np.arange(rows.size), rows] = self.intra_trips[rows]
            return trips

        keys = self.grid.lattice_keys(origins)
        idx = self.key_index[keys]
        same = idx < 0
        idx = np.where(same, 0, idx)

        row_sel = np.arange(rows.size)[:, None]
        class_pop = self.class_pop[rows][row_sel, idx]
        class_trips = self.class_trips[rows][row_sel, idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            trips = np.where(class_pop > 0, class_trips * self.dest_pop[None, :] / class_pop, 0.0)
        trips[same] = 0.0
        trips[np.arange(rows.size), rows] = self.intra_trips[rows]
        return trips

    def dense(self) -> np.ndarray:
        """Full N x N matrix; for debugging and small grids only."""
        return self.block(slice(None))

    def trips(self, origin: int, dest: int) -> float:
        return float(self.block(slice(origin, origin + 1))[0, dest])

    def iter_blocks(self, block_size: int) -> Iterator[tuple[slice, np.ndarray]]:
        for start in range(0, self.cell_count, block_size):
            origins = slice(start, min(start + block_size, self.cell_count))
            yield origins, self.block(origins)


def build_od_matrix(grid: CityGrid, field: PopulationField,
                    params: TripParams = TripParams(), block_size: int = 256) -> ODMatrix:
    """
    Build the trip table for a city.

    Args:
        grid: City grid
        field: Population per cell, aligned with grid
        params: Trip rate and trip-length law
        block_size: Origin rows processed per vectorised step

    Returns:
        ODMatrix with row conservation distributed + discarded = generated
    """
    n = grid.cell_count
    if field.pop.shape != (n,):
        raise ValueError("population field is not aligned with the grid")

    pop = field.pop
    generated = pop * params.trips_per_person_per_day
    y_intra = float(cumulative_trip_share(grid.intra_distance_km, params))

    # Every non-zero offset occurring in the city; reachable sets are per origin
    max_key = int(grid.lattice_keys(slice(grid.center_index, grid.center_index + 1)).max()) * 4
    seen = np.zeros(max_key + 1, dtype=bool)
    for start in range(0, n, block_size):
        seen[np.unique(grid.lattice_keys(slice(start, start + block_size)))] = True
    seen[0] = False
    class_keys = np.flatnonzero(seen)
    m = class_keys.size
    key_index = np.full(max_key + 1, -1, dtype=np.int64)
    key_index[class_keys] = np.arange(m)

    y_class = (np.atleast_1d(cumulative_trip_share(grid.key_distance_km(class_keys), params))
               if m else np.zeros(0))

    class_trips = np.zeros((n, m))
    class_pop = np.zeros((n, m))
    discarded = np.empty(n)

    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        rows = stop - start
        idx = key_index[grid.lattice_keys(slice(start, stop))]
        # key 0 (the origin itself) goes to a spare column that is dropped
        idx = np.where(idx < 0, m, idx)
        flat = (np.arange(rows)[:, None] * (m + 1) + idx).ravel()
        weights = np.broadcast_to(pop[None, :], idx.shape).ravel()
        block_pop = np.bincount(flat, weights=weights, minlength=rows * (m + 1)).reshape(rows, m + 1)[:, :m]
        present = np.bincount(flat, minlength=rows * (m + 1)).reshape(rows, m + 1)[:, :m] > 0

        # Share of each reachable class = y(d_i) - y(d_{i-1}), starting from the intra class
        reached = np.maximum.accumulate(np.where(present, y_class[None, :], -np.inf), axis=1)
        reached = np.maximum(reached, y_intra)
        previous = np.concatenate((np.full((rows, 1), y_intra), reached[:, :-1]), axis=1)
        shares = np.where(present, np.maximum(y_class[None, :] - previous, 0.0), 0.0)

        class_trips[start:stop] = generated[start:stop, None] * shares
        class_pop[start:stop] = block_pop
        last = reached[:, -1] if m else np.full(rows, y_intra)
        discarded[start:stop] = generated[start:stop] * (1.0 - last)

    intra_trips = generated * y_intra
    for array in (generated, intra_trips, discarded, class_trips, class_pop):
        array.setflags(write=False)

    logger.debug("OD matrix: %d cells, %d distance classes", n, m)
    return ODMatrix(
        grid=grid,
        dest_pop=pop,
        generated=generated,
        intra_trips=intra_trips,
        discarded=discarded,
        class_keys=class_keys,
        key_index=key_index,
        class_trips=class_trips,
        class_pop=class_pop,
    )
