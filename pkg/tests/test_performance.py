import time

import pytest

from app.models.config import build_config
from app.services.city_database import generate_synthetic_database
from app.services.scenarios import run_sweep
from app.services.worker_pool import default_workers


@pytest.mark.slow
def test_global_sweep_point_over_990_cities():
    db = generate_synthetic_database(990, seed=7)
    assert max(r.area_sqkm for r in db) == 9000.0

    start = time.perf_counter()
    grid = run_sweep(db, [3.0], [0.02], 2030, build_config(), workers=min(8, default_workers()))
    elapsed = time.perf_counter() - start

    assert grid.daily_trips[0][0] > 0.0
    assert elapsed < 120.0
