"""Multidimensional statistical data cubes and their algebra.

A :class:`DataCube` is an ordered list of dimensions plus a linearized
sequence of cells.  Cells are 64-bit floats or ``None`` (the missing
marker).  Linearization is row-major: the last dimension varies fastest,
which is also the value ordering used by statistics-office APIs, so
parsed payloads need no reshuffle.

All operations are pure: cubes are immutable after construction and may
be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence


class CubeError(ValueError):
    """Base class for cube construction and algebra errors."""


class DimensionError(CubeError):
    """Unknown dimension or category, or an invalid category selection."""


class ShapeError(CubeError):
    """Dimension structures of the operands do not line up."""


DIMENSION_ROLES = ("time", "geo", "metric")


class Category(NamedTuple):
    id: str
    label: str


@dataclass(frozen=True)
class Dimension:
    """One axis of a cube: an id, a display label and ordered categories."""

    id: str
    label: str
    categories: tuple[Category, ...]
    role: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise CubeError("dimension id must be non-empty")
        cats = tuple(
            c if isinstance(c, Category) else Category(str(c[0]), str(c[1]))
            for c in self.categories
        )
        object.__setattr__(self, "categories", cats)
        if not cats:
            raise CubeError(f"dimension '{self.id}' has no categories")
        seen = set()
        for cat in cats:
            if cat.id in seen:
                raise CubeError(f"dimension '{self.id}' repeats category '{cat.id}'")
            seen.add(cat.id)
        if self.role is not None and self.role not in DIMENSION_ROLES:
            raise CubeError(f"dimension '{self.id}' has unknown role '{self.role}'")

    @property
    def size(self) -> int:
        return len(self.categories)

    @property
    def category_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.categories)

    def position(self, category_id: str) -> int:
        """Position of a category id, or DimensionError if absent."""
        for i, cat in enumerate(self.categories):
            if cat.id == category_id:
                return i
        raise DimensionError(
            f"dimension '{self.id}' has no category '{category_id}'"
        )

    def label_of(self, category_id: str) -> str:
        return self.categories[self.position(category_id)].label


Cell = float | None
CellAddress = Sequence[str]


def _normalize_cell(value: object, offset: int) -> Cell:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CubeError(f"cell {offset} is not numeric: {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise CubeError(f"cell {offset} is not finite: {value!r}")
    return v


@dataclass(frozen=True)
class DataCube:
    """An immutable multidimensional dataset.

    ``values`` holds one cell per point of the dimension cross-product,
    last dimension fastest.  A ``None`` cell is missing; present cells
    are finite floats.
    """

    dimensions: tuple[Dimension, ...]
    values: tuple[Cell, ...]
    unit: str | None = None
    source_id: str | None = None
    updated_at: datetime | None = None

    def __post_init__(self) -> None:
        dims = tuple(self.dimensions)
        object.__setattr__(self, "dimensions", dims)
        if not dims:
            raise CubeError("a cube needs at least one dimension")
        seen = set()
        for dim in dims:
            if dim.id in seen:
                raise CubeError(f"duplicate dimension id '{dim.id}'")
            seen.add(dim.id)
        values = tuple(_normalize_cell(v, i) for i, v in enumerate(self.values))
        object.__setattr__(self, "values", values)
        expected = math.prod(d.size for d in dims)
        if len(values) != expected:
            raise ShapeError(
                f"value count {len(values)} does not match cell count {expected}"
            )

    # -- structure ---------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(d.size for d in self.dimensions)

    @property
    def rank(self) -> int:
        return len(self.dimensions)

    @property
    def dimension_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.dimensions)

    def dimension(self, dim_id: str) -> Dimension:
        for dim in self.dimensions:
            if dim.id == dim_id:
                return dim
        raise DimensionError(f"cube has no dimension '{dim_id}'")

    def dimension_index(self, dim_id: str) -> int:
        for i, dim in enumerate(self.dimensions):
            if dim.id == dim_id:
                return i
        raise DimensionError(f"cube has no dimension '{dim_id}'")

    def _strides(self) -> tuple[int, ...]:
        strides = [1] * len(self.dimensions)
        for i in range(len(self.dimensions) - 2, -1, -1):
            strides[i] = strides[i + 1] * self.dimensions[i + 1].size
        return tuple(strides)

    # -- addressing --------------------------------------------------------

    def cell_index(self, address: CellAddress) -> int:
        """Offset of a cell addressed by one category id per dimension.

        Bijective over valid addresses: last dimension varies fastest.
        """
        if len(address) != len(self.dimensions):
            raise DimensionError(
                f"address has {len(address)} entries for {len(self.dimensions)} dimensions"
            )
        offset = 0
        for dim, stride, category_id in zip(self.dimensions, self._strides(), address):
            offset += dim.position(category_id) * stride
        return offset

    def value_at(self, address: CellAddress) -> Cell:
        return self.values[self.cell_index(address)]

    def addresses(self) -> Iterable[tuple[str, ...]]:
        """All cell addresses in linearization order."""
        return product(*(d.category_ids for d in self.dimensions))

    # -- algebra -----------------------------------------------------------

    def slice(self, keep: Mapping[str, Iterable[str]]) -> "DataCube":
        """Keep only the named categories of the named dimensions.

        Selected categories stay in their original order; dimensions not
        named in ``keep`` pass through whole.
        """
        keep_sets: dict[str, set[str]] = {}
        for dim_id, category_ids in keep.items():
            dim = self.dimension(dim_id)
            wanted = set(category_ids)
            if not wanted:
                raise DimensionError(f"empty category selection for dimension '{dim_id}'")
            for category_id in wanted:
                dim.position(category_id)
            keep_sets[dim_id] = wanted

        new_dims: list[Dimension] = []
        positions: list[list[int]] = []
        for dim in self.dimensions:
            if dim.id in keep_sets:
                kept = [
                    (i, cat)
                    for i, cat in enumerate(dim.categories)
                    if cat.id in keep_sets[dim.id]
                ]
                new_dims.append(
                    Dimension(dim.id, dim.label, tuple(cat for _, cat in kept), dim.role)
                )
                positions.append([i for i, _ in kept])
            else:
                new_dims.append(dim)
                positions.append(list(range(dim.size)))

        strides = self._strides()
        new_values = [
            self.values[sum(p * s for p, s in zip(combo, strides))]
            for combo in product(*positions)
        ]
        return DataCube(
            tuple(new_dims), tuple(new_values), self.unit, self.source_id, self.updated_at
        )

    def aggregate(
        self, dim_id: str, grouping: Mapping[str, Iterable[str]]
    ) -> "DataCube":
        """Replace one dimension by groups of its categories, summing cells.

        Every old category may appear in at most one group; categories
        left out of the grouping are dropped.  A group containing a
        missing cell sums to missing.
        """
        axis = self.dimension_index(dim_id)
        dim = self.dimensions[axis]
        groups: list[tuple[str, list[int]]] = []
        used: set[str] = set()
        for new_id, members in grouping.items():
            member_list = list(members)
            if not member_list:
                raise DimensionError(f"group '{new_id}' of dimension '{dim_id}' is empty")
            member_positions = []
            for category_id in member_list:
                if category_id in used:
                    raise DimensionError(
                        f"category '{category_id}' appears in more than one group"
                    )
                used.add(category_id)
                member_positions.append(dim.position(category_id))
            groups.append((new_id, member_positions))
        if not groups:
            raise DimensionError(f"grouping for dimension '{dim_id}' is empty")

        new_dim = Dimension(
            dim.id,
            dim.label,
            tuple(Category(new_id, new_id) for new_id, _ in groups),
            dim.role,
        )
        new_dims = self.dimensions[:axis] + (new_dim,) + self.dimensions[axis + 1 :]

        strides = self._strides()
        position_ranges = [
            list(range(d.size)) if i != axis else list(range(len(groups)))
            for i, d in enumerate(self.dimensions)
        ]
        new_values: list[Cell] = []
        for combo in product(*position_ranges):
            total: Cell = 0.0
            for member_pos in groups[combo[axis]][1]:
                offset = sum(
                    (member_pos if i == axis else p) * s
                    for i, (p, s) in enumerate(zip(combo, strides))
                )
                cell = self.values[offset]
                if cell is None:
                    total = None
                    break
                total += cell
            new_values.append(total)
        return DataCube(
            new_dims, tuple(new_values), self.unit, self.source_id, self.updated_at
        )

    def squeeze(self, dim_id: str) -> "DataCube":
        """Drop a dimension that has exactly one category."""
        axis = self.dimension_index(dim_id)
        if self.dimensions[axis].size != 1:
            raise ShapeError(
                f"dimension '{dim_id}' has {self.dimensions[axis].size} categories, cannot squeeze"
            )
        if self.rank == 1:
            raise ShapeError("cannot squeeze the only dimension of a cube")
        new_dims = self.dimensions[:axis] + self.dimensions[axis + 1 :]
        return DataCube(new_dims, self.values, self.unit, self.source_id, self.updated_at)

    def __add__(self, other: "DataCube") -> "DataCube":
        return cube_arith(self, other, "add")

    def __sub__(self, other: "DataCube") -> "DataCube":
        return cube_arith(self, other, "sub")

    def to_series(
        self, x_dim: str, series_dim: str | None = None
    ) -> "SeriesTable":
        """Lay the cube out as chartable series over the categories of one axis.

        Rank-1 cubes yield a single anonymous series; rank-2 cubes need
        both an x and a series dimension.  Missing cells surface as gaps.
        """
        x = self.dimension(x_dim)
        if series_dim is None:
            if self.rank != 1:
                raise ShapeError(
                    f"cube has rank {self.rank}; pick a series dimension or slice first"
                )
            return SeriesTable(x, (Series(None, self.values),))
        s = self.dimension(series_dim)
        if series_dim == x_dim:
            raise DimensionError("x and series dimension must differ")
        if self.rank != 2:
            raise ShapeError(
                f"cube has rank {self.rank}; slice down to two dimensions first"
            )
        rows = []
        for series_cat in s.categories:
            row = []
            for x_cat in x.categories:
                address = tuple(
                    series_cat.id if d.id == series_dim else x_cat.id
                    for d in self.dimensions
                )
                row.append(self.value_at(address))
            rows.append(Series(series_cat.label, tuple(row)))
        return SeriesTable(x, tuple(rows))


class Series(NamedTuple):
    name: str | None
    values: tuple[Cell, ...]


@dataclass(frozen=True)
class SeriesTable:
    x: Dimension
    series: tuple[Series, ...]

    @property
    def x_labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.x.categories)


def combine(cubes: Sequence[DataCube], new_dim: Dimension) -> DataCube:
    """Stack cubes of identical structure along a new leading dimension.

    Slicing the result on one category of ``new_dim`` reproduces the
    corresponding input cube.
    """
    if not cubes:
        raise ShapeError("combine needs at least one cube")
    if new_dim.size != len(cubes):
        raise ShapeError(
            f"new dimension '{new_dim.id}' has {new_dim.size} categories "
            f"for {len(cubes)} cubes"
        )
    first = cubes[0]
    for cube in cubes[1:]:
        _check_same_structure(first, cube)
    values: list[Cell] = []
    for cube in cubes:
        values.extend(cube.values)
    units = {c.unit for c in cubes}
    unit = units.pop() if len(units) == 1 else None
    return DataCube((new_dim,) + first.dimensions, tuple(values), unit)


def cube_arith(a: DataCube, b: DataCube, op: str) -> DataCube:
    """Cell-wise add or sub; a missing operand makes the cell missing."""
    if op not in ("add", "sub"):
        raise CubeError(f"unknown operator '{op}'")
    _check_same_structure(a, b)
    values: list[Cell] = []
    for left, right in zip(a.values, b.values):
        if left is None or right is None:
            values.append(None)
        elif op == "add":
            values.append(left + right)
        else:
            values.append(left - right)
    unit = a.unit if a.unit == b.unit else None
    return DataCube(a.dimensions, tuple(values), unit)


def _check_same_structure(a: DataCube, b: DataCube) -> None:
    if len(a.dimensions) != len(b.dimensions):
        raise ShapeError(
            f"rank mismatch: {len(a.dimensions)} vs {len(b.dimensions)} dimensions"
        )
    for left, right in zip(a.dimensions, b.dimensions):
        if left.id != right.id:
            raise ShapeError(f"dimension mismatch: '{left.id}' vs '{right.id}'")
        if left.category_ids != right.category_ids:
            raise ShapeError(
                f"dimension '{left.id}' categories differ: "
                f"{left.category_ids} vs {right.category_ids}"
            )


# -- canonical serialization ------------------------------------------------
#
# The persisted form of a cube: stable field order, UTF-8.  This is the
# format snapshots and published survey aggregates are stored in.


def cube_to_dict(cube: DataCube) -> dict:
    return {
        "dimensions": [
            {
                "id": d.id,
                "label": d.label,
                "role": d.role,
                "categories": [[c.id, c.label] for c in d.categories],
            }
            for d in cube.dimensions
        ],
        "values": list(cube.values),
        "unit": cube.unit,
        "source_id": cube.source_id,
        "updated_at": cube.updated_at.isoformat() if cube.updated_at else None,
    }


def cube_to_json(cube: DataCube) -> str:
    return json.dumps(cube_to_dict(cube), ensure_ascii=False, separators=(",", ":"))


def cube_from_dict(doc: Mapping) -> DataCube:
    dimensions = tuple(
        Dimension(
            d["id"],
            d["label"],
            tuple(Category(c[0], c[1]) for c in d["categories"]),
            d.get("role"),
        )
        for d in doc["dimensions"]
    )
    updated_at = None
    if doc.get("updated_at"):
        updated_at = datetime.fromisoformat(doc["updated_at"])
        if updated_at.tzinfo is None:
            updated_at = updated_at.replace(tzinfo=timezone.utc)
    return DataCube(
        dimensions,
        tuple(doc["values"]),
        doc.get("unit"),
        doc.get("source_id"),
        updated_at,
    )


def cube_from_json(payload: str) -> DataCube:
    return cube_from_dict(json.loads(payload))
