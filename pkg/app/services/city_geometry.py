"""
Schematic circular city: square grid cells on an integer lattice, exact distance classes
and the sunflower vertiport layout.
"""
from dataclasses import dataclass, field
import logging
import math
from typing import Sequence

import numpy as np

from app.exceptions import GeometryError
from app.models.schemas import GridSpec

logger = logging.getLogger(__name__)

# Golden angle 2*pi*(1 - 1/phi) = pi*(3 - sqrt(5)) ~ 2.399963 rad
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

# Every city gets at least this many vertiports
MIN_VERTIPORTS = 5

# Relative slack for the centre-in-circle test so area = pi*r^2 keeps boundary cells
_CIRCLE_RTOL = 1e-9


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Cell:
    ix: int
    iy: int
    center_km: tuple[float, float]


@dataclass(frozen=True)
class DistanceClass:
    """All cell pairs sharing one exact squared lattice offset."""
    key: int
    distance_km: float


@dataclass(frozen=True)
class CityGrid:
    """
    Generic circular city.

    Cell arrays are aligned: cell i sits at lattice (ix[i], iy[i]). Arrays are read-only.
    """
    spec: GridSpec
    ix: np.ndarray
    iy: np.ndarray
    radius_km: float
    d_max_km: float
    center_index: int
    dist_from_center_km: np.ndarray = field(repr=False)

    @property
    def cell_count(self) -> int:
        return int(self.ix.shape[0])

    @property
    def cell_edge_km(self) -> float:
        return self.spec.cell_edge_km

    @property
    def intra_distance_km(self) -> float:
        """Trips inside one cell travel half a cell edge."""
        return self.spec.cell_edge_km / 2.0

    @property
    def centers_km(self) -> np.ndarray:
        s = self.spec.cell_edge_km
        return np.column_stack((self.ix * s, self.iy * s)).astype(float)

    @property
    def cells(self) -> tuple[Cell, ...]:
        s = self.spec.cell_edge_km
        return tuple(
            Cell(int(x), int(y), (float(x * s), float(y * s)))
            for x, y in zip(self.ix, self.iy)
        )

    def lattice_keys(self, origins: slice = slice(None)) -> np.ndarray:
        """Squared lattice offsets (origin rows x all destinations) as exact integers."""
        dx = self.ix[origins, None] - self.ix[None, :]
        dy = self.iy[origins, None] - self.iy[None, :]
        return dx * dx + dy * dy

    def key_distance_km(self, keys: np.ndarray) -> np.ndarray:
        """Distance of each lattice key; key 0 maps to the intra-cell distance."""
        s = self.spec.cell_edge_km
        keys = np.asarray(keys)
        return np.where(keys == 0, s / 2.0, s * np.sqrt(keys.astype(float)))


@dataclass(frozen=True)
class VertiportNetwork:
    positions: np.ndarray  # (count, 2) km, read-only

    @property
    def count(self) -> int:
        return int(self.positions.shape[0])


# -----------------------------------------------------------------------
# Grid construction
# -----------------------------------------------------------------------

def build_grid(area_sqkm: float, spec: GridSpec = GridSpec()) -> CityGrid:
    """
    Approximate a city by a circle of equal area covered with square cells.

    A lattice cell belongs to the city when its centre lies inside the circle.

    Args:
        area_sqkm: Built-up city area
        spec: Cell size

    Returns:
        CityGrid with cells in lexicographic (ix, iy) order
    """
    if not (area_sqkm > 0 and math.isfinite(area_sqkm)):
        raise GeometryError(f"area must be positive, got {area_sqkm}")

    s = spec.cell_edge_km
    radius_km = math.sqrt(area_sqkm / math.pi)
    # (radius / s)^2 without the sqrt round trip
    limit = area_sqkm / (math.pi * s * s) * (1.0 + _CIRCLE_RTOL)
    reach = int(math.floor(math.sqrt(limit)))

    axis = np.arange(-reach, reach + 1, dtype=np.int64)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    gx = gx.ravel()
    gy = gy.ravel()
    inside = gx * gx + gy * gy <= limit
    ix, iy = gx[inside], gy[inside]

    if ix.size == 0:
        # Degenerate tiny city: centre cell only
        ix = np.zeros(1, dtype=np.int64)
        iy = np.zeros(1, dtype=np.int64)

    center_index = int(np.flatnonzero((ix == 0) & (iy == 0))[0])
    dist = s * np.sqrt((ix * ix + iy * iy).astype(float))

    logger.debug("Grid for %.1f sq km: %d cells, radius %.3f km", area_sqkm, ix.size, radius_km)
    return CityGrid(
        spec=spec,
        ix=_frozen(ix),
        iy=_frozen(iy),
        radius_km=radius_km,
        d_max_km=float(dist.max()),
        center_index=center_index,
        dist_from_center_km=_frozen(dist),
    )


def distance_classes(grid: CityGrid, block_size: int = 256) -> list[DistanceClass]:
    """
    Distinct discrete distances between cell pairs, ascending.

    The intra-cell class (key 0, half a cell edge) is always first.
    """
    present = {0}
    for start in range(0, grid.cell_count, block_size):
        keys = grid.lattice_keys(slice(start, start + block_size))
        present.update(int(k) for k in np.unique(keys))

    ordered = np.array(sorted(present), dtype=np.int64)
    distances = grid.key_distance_km(ordered)
    return [DistanceClass(int(k), float(d)) for k, d in zip(ordered, distances)]


# -----------------------------------------------------------------------
# Vertiports
# -----------------------------------------------------------------------

def place_vertiports(radius_km: float, n: int) -> VertiportNetwork:
    """
    Spread n vertiports evenly over the city disc with the sunflower spiral.

    Point i (1..n) sits at radius R*sqrt((i - 0.5)/n) and angle i * golden angle.
    """
    if n < MIN_VERTIPORTS:
        raise GeometryError(f"a city needs at least {MIN_VERTIPORTS} vertiports, got {n}")
    if not radius_km > 0:
        raise GeometryError(f"radius must be positive, got {radius_km}")

    i = np.arange(1, n + 1, dtype=float)
    r = radius_km * np.sqrt((i - 0.5) / n)
    theta = i * GOLDEN_ANGLE
    positions = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return VertiportNetwork(positions=_frozen(positions))


def nearest_vertiports(points_km: np.ndarray, network: VertiportNetwork) -> tuple[np.ndarray, np.ndarray]:
    """
    Nearest vertiport for many points at once.

    Returns:
        (index array, distance array); ties go to the lowest index
    """
    if network.count == 0:
        raise GeometryError("vertiport network is empty")
    points_km = np.atleast_2d(np.asarray(points_km, dtype=float))
    dx = points_km[:, None, 0] - network.positions[None, :, 0]
    dy = points_km[:, None, 1] - network.positions[None, :, 1]
    dist = np.hypot(dx, dy)
    index = np.argmin(dist, axis=1)
    return index, dist[np.arange(points_km.shape[0]), index]


def nearest_vertiport(point_km: Sequence[float], network: VertiportNetwork) -> tuple[int, float]:
    """
    Nearest vertiport to a point (pre-carriage / onward-carriage endpoint).

    Returns:
        (0-based index, Euclidean distance in km)
    """
    index, dist = nearest_vertiports(np.asarray([point_km], dtype=float), network)
    return int(index[0]), float(dist[0])
