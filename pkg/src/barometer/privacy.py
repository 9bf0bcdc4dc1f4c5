"""Survey de-identification, aggregation and minimum-count suppression.

Identified responses live in their own store partition and never reach
the public service; everything published goes through this pipeline:

    deidentify -> dedupe -> aggregate -> suppress -> publish

Identifier fields (organization number, business name) are flagged in
the submission schema itself, stripping is driven by those flags, and
``publish`` refuses tables that skipped suppression or still carry an
identifier field anywhere.
"""

from __future__ import annotations

import hashlib
import hmac
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Mapping, Sequence

from .cube import Category, Cell, DataCube, Dimension, cube_to_json


class PrivacyError(ValueError):
    pass


class UnsuppressedTableError(PrivacyError):
    """The table never went through suppression and must not be published."""


class IdentifierLeakError(PrivacyError):
    """An identifier field survived into data meant for publication."""


Answer = str | float | int | bool

# Submission schema: classification drives stripping, types drive plan checks.
SURVEY_SCHEMA: dict[str, dict] = {
    "response_id": {"classification": "identifier", "kind": "text"},
    "org_number": {"classification": "identifier", "kind": "text"},
    "business_name": {"classification": "identifier", "kind": "text"},
    "region": {"classification": "quasi", "kind": "categorical"},
    "received_at": {"classification": "metadata", "kind": "timestamp"},
    "answers": {"classification": "payload", "kind": "map"},
}

IDENTIFIER_FIELDS = tuple(
    name for name, spec in SURVEY_SCHEMA.items() if spec["classification"] == "identifier"
)

VALID_STATS = ("count", "mean", "share")
AFFIRMATIVE_STRINGS = ("yes", "true", "y", "1")


@dataclass(frozen=True)
class SurveyResponse:
    """A raw, identified submission. Never leaves the identified partition."""

    response_id: str
    region: str
    received_at: datetime
    answers: Mapping[str, Answer]
    org_number: str | None = None
    business_name: str | None = None


@dataclass(frozen=True)
class StrippedResponse:
    """A de-identified response: identifiers gone, pseudonym kept for dedup."""

    pseudonym: str
    region: str
    received_at: datetime
    answers: Mapping[str, Answer]


def deidentify(
    response: SurveyResponse | StrippedResponse, salt: bytes
) -> StrippedResponse:
    """Strip identifier fields; idempotent on already-stripped responses.

    The pseudonym is a keyed one-way digest of the stable identity
    (organization number when present, else the response id), so repeat
    submissions collapse without retaining who submitted.
    """
    if isinstance(response, StrippedResponse):
        return response
    basis = response.org_number or response.response_id
    pseudonym = hmac.new(salt, basis.encode("utf-8"), hashlib.sha256).hexdigest()
    return StrippedResponse(
        pseudonym=pseudonym,
        region=response.region,
        received_at=response.received_at,
        answers=dict(response.answers),
    )


def dedupe(responses: Sequence[StrippedResponse]) -> list[StrippedResponse]:
    """Keep only the latest submission per pseudonym."""
    latest: dict[str, StrippedResponse] = {}
    for response in responses:
        current = latest.get(response.pseudonym)
        if current is None or response.received_at >= current.received_at:
            latest[response.pseudonym] = response
    return sorted(latest.values(), key=lambda r: (r.received_at, r.pseudonym))


@dataclass(frozen=True)
class AggregationPlan:
    group_by: tuple[str, ...]
    measures: tuple[tuple[str, str], ...]  # (question id, count|mean|share)

    def __post_init__(self) -> None:
        if not self.group_by:
            raise PrivacyError("plan needs at least one group-by dimension")
        if not self.measures:
            raise PrivacyError("plan needs at least one measure")
        for question, stat in self.measures:
            if stat not in VALID_STATS:
                raise PrivacyError(f"unknown statistic '{stat}' for question '{question}'")


@dataclass(frozen=True)
class AggregateCell:
    key: tuple[str, ...]
    count: int | None
    measures: Mapping[str, Cell] | None
    suppressed: bool = False


@dataclass(frozen=True)
class AggregateTable:
    group_by: tuple[str, ...]
    measures: tuple[tuple[str, str], ...]
    cells: tuple[AggregateCell, ...]
    total_responses: int
    k_threshold: int | None = None  # set by suppress(); publish() requires it


def _group_value(response: StrippedResponse, field: str) -> str:
    if field == "region":
        return response.region
    value = response.answers.get(field)
    if value is None:
        return "unknown"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, float)):
        raise PrivacyError(f"question '{field}' is numeric and cannot be grouped by")
    return str(value)


def _is_affirmative(value: Answer) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return value > 0
    return str(value).strip().lower() in AFFIRMATIVE_STRINGS


def aggregate_survey(
    responses: Sequence[StrippedResponse], plan: AggregationPlan
) -> AggregateTable:
    """Group responses and compute the planned measures, one cell per key.

    count: members with an answer to the question; mean: arithmetic mean
    of numeric answers; share: percent of answering members whose answer
    is affirmative (yes/true/positive).
    """
    groups: dict[tuple[str, ...], list[StrippedResponse]] = {}
    for response in responses:
        key = tuple(_group_value(response, field) for field in plan.group_by)
        groups.setdefault(key, []).append(response)

    cells = []
    for key in sorted(groups):
        members = groups[key]
        measures: dict[str, Cell] = {}
        for question, stat in plan.measures:
            answered = [m.answers[question] for m in members if question in m.answers]
            name = f"{question}:{stat}"
            if stat == "count":
                measures[name] = float(len(answered))
            elif stat == "mean":
                numeric = [
                    float(a) for a in answered
                    if isinstance(a, (int, float)) and not isinstance(a, bool)
                ]
                measures[name] = sum(numeric) / len(numeric) if numeric else None
            else:  # share
                if not answered:
                    measures[name] = None
                else:
                    hits = sum(1 for a in answered if _is_affirmative(a))
                    measures[name] = hits / len(answered) * 100.0
        cells.append(AggregateCell(key, len(members), measures))
    return AggregateTable(
        group_by=plan.group_by,
        measures=plan.measures,
        cells=tuple(cells),
        total_responses=len(responses),
    )


def suppress(table: AggregateTable, k: int) -> AggregateTable:
    """Blank every cell with fewer than k respondents; k >= 1."""
    if k < 1:
        raise PrivacyError("suppression threshold must be at least 1")
    cells = []
    for cell in table.cells:
        if cell.count is not None and cell.count < k:
            cells.append(AggregateCell(cell.key, None, None, suppressed=True))
        else:
            cells.append(cell)
    return AggregateTable(
        group_by=table.group_by,
        measures=table.measures,
        cells=tuple(cells),
        total_responses=table.total_responses,
        k_threshold=k,
    )


def publish(table: AggregateTable) -> DataCube:
    """Turn a suppressed table into a cube; suppressed cells become missing.

    Refuses tables that skipped suppression and fails hard if any
    identifier field name is still present anywhere.
    """
    if table.k_threshold is None:
        raise UnsuppressedTableError(
            "table has not been suppression-checked; run suppress() first"
        )
    _scan_for_identifiers(table)

    dimensions = []
    for axis, field in enumerate(table.group_by):
        observed = sorted({cell.key[axis] for cell in table.cells})
        if not observed:
            observed = ["none"]
        dimensions.append(
            Dimension(field, field.capitalize(), tuple(Category(c, c) for c in observed))
        )
    measure_names = ["respondents"] + [f"{q}:{stat}" for q, stat in table.measures]
    dimensions.append(
        Dimension(
            "measure",
            "Measure",
            tuple(Category(name, name) for name in measure_names),
        )
    )

    cube_dims = tuple(dimensions)
    size = 1
    for d in cube_dims:
        size *= d.size
    values: list[Cell] = [None] * size

    probe = DataCube(cube_dims, tuple([None] * size))
    for cell in table.cells:
        for name in measure_names:
            offset = probe.cell_index(tuple(cell.key) + (name,))
            if cell.suppressed:
                values[offset] = None
            elif name == "respondents":
                values[offset] = float(cell.count)
            else:
                values[offset] = cell.measures.get(name)

    cube = DataCube(
        cube_dims,
        tuple(values),
        unit=None,
        source_id=None,
        updated_at=datetime.now(timezone.utc),
    )
    serialized = cube_to_json(cube)
    for field in IDENTIFIER_FIELDS:
        if field in serialized:
            raise IdentifierLeakError(f"published cube mentions '{field}'")
    return cube


def _scan_for_identifiers(table: AggregateTable) -> None:
    for field in table.group_by:
        if field in IDENTIFIER_FIELDS:
            raise IdentifierLeakError(f"group-by field '{field}' is an identifier")
    for question, _ in table.measures:
        if question in IDENTIFIER_FIELDS:
            raise IdentifierLeakError(f"measure question '{question}' is an identifier")
    for cell in table.cells:
        if cell.measures is None:
            continue
        for name in cell.measures:
            if name.split(":")[0] in IDENTIFIER_FIELDS:
                raise IdentifierLeakError(f"cell measure '{name}' is an identifier")


class SurveyStore:
    """Append-only identified partition plus the published aggregate.

    Only ``submit`` and the publish pipeline touch the identified side;
    the HTTP service reads nothing but the published cube.
    """

    def __init__(self) -> None:
        self._responses: list[SurveyResponse] = []
        self._lock = threading.Lock()

    def submit(
        self,
        region: str,
        answers: Mapping[str, Answer],
        org_number: str | None = None,
        business_name: str | None = None,
        received_at: datetime | None = None,
    ) -> str:
        """Store an identified response; returns an opaque receipt id."""
        receipt = uuid.uuid4().hex
        response = SurveyResponse(
            response_id=receipt,
            region=region,
            received_at=received_at or datetime.now(timezone.utc),
            answers=dict(answers),
            org_number=org_number,
            business_name=business_name,
        )
        with self._lock:
            self._responses.append(response)
        return receipt

    def count(self) -> int:
        with self._lock:
            return len(self._responses)

    def snapshot_responses(self) -> list[SurveyResponse]:
        """Frozen copy for the publish pipeline; not for the public API."""
        with self._lock:
            return list(self._responses)


def publish_pipeline(
    responses: Sequence[SurveyResponse | StrippedResponse],
    plan: AggregationPlan,
    k: int,
    salt: bytes,
) -> DataCube:
    """The whole path from identified responses to a publishable cube."""
    stripped = [deidentify(r, salt) for r in responses]
    table = aggregate_survey(dedupe(stripped), plan)
    return publish(suppress(table, k))
