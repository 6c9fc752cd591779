import math

import numpy as np
import pytest

from app.exceptions import GeometryError
from app.models.schemas import GridSpec
from app.services.city_geometry import (
    GOLDEN_ANGLE,
    VertiportNetwork,
    build_grid,
    distance_classes,
    nearest_vertiport,
    nearest_vertiports,
    place_vertiports,
)


def _lattice_set(grid):
    return {(int(x), int(y)) for x, y in zip(grid.ix, grid.iy)}


def test_five_cell_grid():
    grid = build_grid(math.pi * 4.0)
    assert grid.cell_count == 5
    assert _lattice_set(grid) == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert grid.radius_km == pytest.approx(2.0)
    assert grid.d_max_km == pytest.approx(2.0)
    assert (int(grid.ix[grid.center_index]), int(grid.iy[grid.center_index])) == (0, 0)


def test_tiny_area_falls_back_to_centre_cell():
    grid = build_grid(0.1)
    assert grid.cell_count == 1
    assert grid.d_max_km == 0.0


def test_grid_matches_lattice_enumeration_and_symmetry():
    area = 720.0
    grid = build_grid(area)
    assert grid.radius_km == pytest.approx(15.139, abs=1e-3)

    limit = area / (math.pi * 4.0)
    reach = int(math.sqrt(limit)) + 1
    expected = {(x, y) for x in range(-reach, reach + 1) for y in range(-reach, reach + 1)
                if x * x + y * y <= limit}
    cells = _lattice_set(grid)
    assert cells == expected

    for x, y in cells:
        for sx, sy in ((x, -y), (-x, y), (y, x), (-y, -x)):
            assert (sx, sy) in cells


def test_cells_are_lexicographic_and_read_only():
    grid = build_grid(300.0)
    pairs = list(zip(grid.ix.tolist(), grid.iy.tolist()))
    assert pairs == sorted(pairs)
    with pytest.raises(ValueError):
        grid.ix[0] = 99


def test_cell_centres_follow_cell_edge():
    grid = build_grid(100.0, GridSpec(cell_edge_km=1.0))
    centres = grid.centers_km
    assert np.array_equal(centres[:, 0], grid.ix.astype(float))
    assert grid.cells[grid.center_index].center_km == (0.0, 0.0)


@pytest.mark.parametrize("area", [0.0, -5.0, float("nan")])
def test_invalid_area_rejected(area):
    with pytest.raises(GeometryError):
        build_grid(area)


def test_distance_classes_five_cell_grid():
    classes = distance_classes(build_grid(math.pi * 4.0))
    assert [c.key for c in classes] == [0, 1, 2, 4]
    assert [c.distance_km for c in classes] == pytest.approx([1.0, 2.0, 2.0 * math.sqrt(2.0), 4.0])


def test_distance_classes_single_cell():
    classes = distance_classes(build_grid(0.1))
    assert len(classes) == 1
    assert classes[0].key == 0
    assert classes[0].distance_km == 1.0


def test_distance_classes_keep_exact_keys_apart():
    classes = distance_classes(build_grid(500.0), block_size=7)
    keys = [c.key for c in classes]
    assert keys == sorted(set(keys))
    assert 1 in keys and 2 in keys
    distances = [c.distance_km for c in classes]
    assert distances == sorted(distances)


def test_place_vertiports_radii():
    network = place_vertiports(10.0, 5)
    radii = np.hypot(network.positions[:, 0], network.positions[:, 1])
    assert radii == pytest.approx([3.162, 5.477, 7.071, 8.367, 9.487], abs=1e-3)
    assert np.all(radii < 10.0)


def test_place_vertiports_angles():
    network = place_vertiports(5.0, 8)
    angles = np.arctan2(network.positions[:, 1], network.positions[:, 0])
    expected = np.angle(np.exp(1j * np.arange(1, 9) * GOLDEN_ANGLE))
    assert angles == pytest.approx(expected)


def test_place_vertiports_even_coverage():
    positions = place_vertiports(10.0, 40).positions
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    nearest = dist.min(axis=1)
    assert nearest.max() / nearest.min() < 2.5


@pytest.mark.parametrize("radius, n", [(10.0, 4), (10.0, 0), (0.0, 5)])
def test_place_vertiports_rejects_bad_input(radius, n):
    with pytest.raises(GeometryError):
        place_vertiports(radius, n)


def test_nearest_vertiport_at_origin():
    network = place_vertiports(10.0, 5)
    index, distance = nearest_vertiport((0.0, 0.0), network)
    assert index == 0
    assert distance == pytest.approx(3.162, abs=1e-3)


def test_nearest_vertiport_on_a_vertiport():
    network = place_vertiports(10.0, 7)
    x, y = network.positions[3]
    assert nearest_vertiport((x, y), network) == (3, 0.0)


def test_nearest_vertiport_tie_goes_to_lowest_index():
    positions = np.array([[5.0, 5.0], [9.0, 9.0], [-1.0, 0.0], [7.0, 7.0], [1.0, 0.0]])
    network = VertiportNetwork(positions=positions)
    index, distance = nearest_vertiport((0.0, 0.0), network)
    assert index == 2
    assert distance == 1.0


def test_nearest_vertiports_matches_scalar():
    network = place_vertiports(8.0, 12)
    grid = build_grid(200.0)
    index, distance = nearest_vertiports(grid.centers_km, network)
    for i, centre in enumerate(grid.centers_km):
        assert (int(index[i]), float(distance[i])) == nearest_vertiport(centre, network)


def test_empty_network_rejected():
    with pytest.raises(GeometryError):
        nearest_vertiport((0.0, 0.0), VertiportNetwork(positions=np.zeros((0, 2))))
