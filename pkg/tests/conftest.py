from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from barometer.cube import Category, DataCube, Dimension


def make_cube(dim_specs, values, **kwargs):
    """Build a cube from [(dim_id, [category ids]), ...] and a flat value list."""
    dims = tuple(
        Dimension(dim_id, dim_id.title(), tuple(Category(c, c) for c in cats))
        for dim_id, cats in dim_specs
    )
    return DataCube(dims, tuple(values), **kwargs)


def cube_from_spec(category_lists, values, dim_ids):
    return make_cube(list(zip(dim_ids, category_lists)), values)


@pytest.fixture
def rng():
    return random.Random(20260810)


@pytest.fixture
def region_age_cube():
    # region x age, 3 x 4, row-major with age fastest
    return make_cube(
        [
            ("region", ["ringerike", "hole", "jevnaker"]),
            ("age", ["0-17", "18-34", "35-66", "67+"]),
        ],
        [
            8600, 9900, 19400, 5100,
            1540, 1510, 2930, 820,
            1500, 1480, 2900, 940,
        ],
        unit="persons",
    )
