"""Regional growth barometer: statistical cubes, ingestion, charts, exports."""

from .cube import (
    Category,
    CubeError,
    DataCube,
    Dimension,
    DimensionError,
    ShapeError,
    combine,
    cube_arith,
)
from .jsonstat import JsonStatError, parse_jsonstat

__version__ = "0.1.0"

__all__ = [
    "Category",
    "CubeError",
    "DataCube",
    "Dimension",
    "DimensionError",
    "JsonStatError",
    "ShapeError",
    "combine",
    "cube_arith",
    "parse_jsonstat",
    "__version__",
]
