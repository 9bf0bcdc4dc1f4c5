"""Parser for the JSON-stat 2.0 wire format (json-stat.org).

Only the single-dataset class ``dataset`` is accepted; collection and
dimension responses are rejected.  Parse failures carry the path of the
offending document member so ingestion logs point at the right spot.
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from typing import Mapping

from .cube import Category, CubeError, DataCube, Dimension


class JsonStatError(CubeError):
    """A malformed JSON-stat document; ``path`` names the bad member."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or 'document'}: {message}")
        self.path = path


_ROLE_NAMES = ("time", "geo", "metric")


def parse_jsonstat(payload: str | bytes) -> DataCube:
    """Parse a JSON-stat 2.0 dataset document into a DataCube.

    Dimension order follows the document's ``id`` list, sizes the
    ``size`` list, and values keep document order (last dimension
    fastest).  Sparse value maps and explicit nulls become missing
    markers.
    """
    try:
        doc = json.loads(payload, parse_constant=_reject_constant)
    except _NonFiniteJson as exc:
        raise JsonStatError("value", str(exc)) from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise JsonStatError("", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise JsonStatError("", "top level is not an object")

    cls = doc.get("class", "dataset")
    if cls != "dataset":
        raise JsonStatError("class", f"unsupported class '{cls}' (only 'dataset')")

    dim_ids = _require(doc, "id", list)
    sizes = _require(doc, "size", list)
    if len(dim_ids) != len(sizes):
        raise JsonStatError(
            "size", f"{len(sizes)} sizes for {len(dim_ids)} dimension ids"
        )
    if not dim_ids:
        raise JsonStatError("id", "no dimensions declared")
    for i, (dim_id, size) in enumerate(zip(dim_ids, sizes)):
        if not isinstance(dim_id, str) or not dim_id:
            raise JsonStatError(f"id/{i}", "dimension id must be a non-empty string")
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise JsonStatError(f"size/{i}", f"size must be a positive integer, got {size!r}")

    roles = _parse_roles(doc)
    dim_section = _require(doc, "dimension", dict)
    dimensions = tuple(
        _parse_dimension(dim_section, dim_id, size, roles.get(dim_id))
        for dim_id, size in zip(dim_ids, sizes)
    )

    cell_count = math.prod(sizes)
    values = _parse_values(doc, cell_count)

    updated_at = None
    updated = doc.get("updated")
    if isinstance(updated, str):
        updated_at = _parse_timestamp(updated)

    return DataCube(dimensions, values, unit=None, source_id=None, updated_at=updated_at)


class _NonFiniteJson(ValueError):
    pass


def _reject_constant(name: str) -> float:
    raise _NonFiniteJson(f"non-finite number {name} is not allowed")


def _require(doc: Mapping, member: str, kind: type) -> object:
    if member not in doc:
        raise JsonStatError(member, "required member is missing")
    value = doc[member]
    if not isinstance(value, kind):
        raise JsonStatError(member, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_roles(doc: Mapping) -> dict[str, str]:
    roles: dict[str, str] = {}
    role_section = doc.get("role")
    if role_section is None:
        return roles
    if not isinstance(role_section, dict):
        raise JsonStatError("role", "expected an object")
    for role_name, members in role_section.items():
        if role_name not in _ROLE_NAMES:
            continue
        if not isinstance(members, list):
            raise JsonStatError(f"role/{role_name}", "expected a list of dimension ids")
        for dim_id in members:
            roles[dim_id] = role_name
    return roles


def _parse_dimension(
    section: Mapping, dim_id: str, size: int, role: str | None
) -> Dimension:
    path = f"dimension/{dim_id}"
    if dim_id not in section:
        raise JsonStatError(path, "dimension is missing from the dimension member")
    spec = section[dim_id]
    if not isinstance(spec, dict):
        raise JsonStatError(path, "expected an object")
    label = spec.get("label", dim_id)
    if not isinstance(label, str):
        raise JsonStatError(f"{path}/label", "expected a string")
    category = spec.get("category")
    if not isinstance(category, dict):
        raise JsonStatError(f"{path}/category", "required member is missing or not an object")

    labels = category.get("label", {})
    if not isinstance(labels, dict):
        raise JsonStatError(f"{path}/category/label", "expected an object")

    index = category.get("index")
    if index is None:
        # Single-category dimensions may omit the index and carry only a label.
        ids = list(labels.keys())
        if len(ids) != 1:
            raise JsonStatError(
                f"{path}/category", "index missing and label does not name exactly one category"
            )
    elif isinstance(index, list):
        ids = list(index)
    elif isinstance(index, dict):
        for cat_id, pos in index.items():
            if not isinstance(pos, int) or isinstance(pos, bool):
                raise JsonStatError(
                    f"{path}/category/index/{cat_id}", f"position must be an integer, got {pos!r}"
                )
        positions = sorted(index.values())
        if positions != list(range(len(index))):
            raise JsonStatError(
                f"{path}/category/index", "positions are not a gapless 0-based sequence"
            )
        ids = [cat_id for cat_id, _ in sorted(index.items(), key=lambda item: item[1])]
    else:
        raise JsonStatError(f"{path}/category/index", "expected an object or a list")

    if len(ids) != size:
        raise JsonStatError(
            f"{path}/category", f"{len(ids)} categories for declared size {size}"
        )
    for cat_id in ids:
        if not isinstance(cat_id, str) or not cat_id:
            raise JsonStatError(f"{path}/category", f"bad category id {cat_id!r}")

    categories = tuple(Category(cat_id, str(labels.get(cat_id, cat_id))) for cat_id in ids)
    return Dimension(dim_id, label, categories, role)


def _parse_values(doc: Mapping, cell_count: int) -> tuple[float | None, ...]:
    if "value" not in doc:
        raise JsonStatError("value", "required member is missing")
    raw = doc["value"]
    if isinstance(raw, list):
        if len(raw) != cell_count:
            raise JsonStatError(
                "value", f"{len(raw)} values for {cell_count} declared cells"
            )
        return tuple(_parse_cell(v, f"value/{i}") for i, v in enumerate(raw))
    if isinstance(raw, dict):
        cells: list[float | None] = [None] * cell_count
        for key, v in raw.items():
            try:
                offset = int(key)
            except (TypeError, ValueError):
                raise JsonStatError(f"value/{key}", "sparse key is not an integer") from None
            if not 0 <= offset < cell_count:
                raise JsonStatError(
                    f"value/{key}", f"sparse key outside 0..{cell_count - 1}"
                )
            cells[offset] = _parse_cell(v, f"value/{key}")
        return tuple(cells)
    raise JsonStatError("value", f"expected a list or an object, got {type(raw).__name__}")


def _parse_cell(value: object, path: str) -> float | None:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise JsonStatError(path, f"cell is not numeric: {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise JsonStatError(path, f"cell is not finite: {value!r}")
    return v


def _parse_timestamp(text: str) -> datetime | None:
    try:
        stamp = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        return None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)
