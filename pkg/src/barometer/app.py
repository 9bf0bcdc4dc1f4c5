"""Wires the stores, catalog, ingestion and pipelines into one application.

This is the composition root shared by the HTTP service, the CLI and the
report writer.
"""

from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from pathlib import Path

from .catalog import Catalog, VariableEntry, catalog_from_yaml
from .charts import ChartKind, ChartSpec, alternative_kinds, build_chart
from .config import AppConfig
from .cube import CubeError, cube_to_json
from .derive import Evaluation, IndicatorResult, Recipe, evaluate, growth_indicators
from .ingest import (
    FixtureTransport,
    HttpTransport,
    IngestService,
    SnapshotStore,
    Transport,
    refresh_all,
)
from .privacy import (
    AggregationPlan,
    SurveyStore,
    dedupe,
    deidentify,
    aggregate_survey,
    publish,
    suppress,
)
from .ingest import content_hash

log = logging.getLogger(__name__)

STACKING_KINDS = (
    ChartKind.STACKED_COLUMN,
    ChartKind.STACKED_PERCENT_COLUMN,
    ChartKind.COLUMN_DRILLDOWN,
)


class Application:
    def __init__(self, config: AppConfig, transport: Transport | None = None):
        self.config = config
        if config.catalog_path is None:
            raise ValueError("configuration does not name a catalog document")
        self.catalog: Catalog = catalog_from_yaml(
            Path(config.catalog_path).read_text(encoding="utf-8")
        )
        self.catalog.validate()
        if config.data_dir:
            self.store = SnapshotStore.load(config.data_dir)
        else:
            self.store = SnapshotStore()
        if transport is not None:
            self.transport = transport
        elif config.fixture_mode:
            if config.payload_dir is None:
                raise ValueError("fixture mode needs a payload directory")
            self.transport = FixtureTransport(config.payload_dir)
        else:
            self.transport = HttpTransport()
        self.ingest = IngestService(self.store, self.transport)
        self.surveys = SurveyStore()

    # -- lifecycle ---------------------------------------------------------

    def startup(self) -> None:
        if self.config.survey_seed_path and self.config.fixture_mode:
            self.seed_survey(self.config.survey_seed_path)
        if self.config.fetch_on_startup:
            outcomes = refresh_all(self.config.sources, self.ingest)
            log.info("startup fetch: %s", outcomes)
            if self.surveys.count():
                self.republish_survey()
        if self.config.data_dir:
            self.store.save(self.config.data_dir)

    def seed_survey(self, path: Path) -> int:
        rows = json.loads(Path(path).read_text(encoding="utf-8"))
        for row in rows:
            self.surveys.submit(
                region=row["region"],
                answers=row["answers"],
                org_number=row.get("org_number"),
                business_name=row.get("business_name"),
                received_at=datetime.fromisoformat(row["received_at"]),
            )
        return len(rows)

    # -- ingestion ---------------------------------------------------------

    def refresh_source(self, source_id: str):
        for source in self.config.sources:
            if source.source_id == source_id:
                outcome, snapshot = self.ingest.refresh(
                    source, datetime.now(timezone.utc)
                )
                if self.config.data_dir:
                    self.store.save(self.config.data_dir)
                return outcome, snapshot
        return None, None

    # -- survey publication --------------------------------------------------

    def republish_survey(self) -> tuple[str, int | None]:
        """Run the privacy pipeline and store the aggregate as a snapshot."""
        publication = self.catalog.survey
        if publication is None:
            raise ValueError("catalog does not configure a survey publication")
        plan = AggregationPlan(publication.group_by, publication.measures)
        salt = self.config.survey_salt.encode("utf-8")
        stripped = [deidentify(r, salt) for r in self.surveys.snapshot_responses()]
        table = suppress(
            aggregate_survey(dedupe(stripped), plan), self.config.k_threshold
        )
        cube = publish(table)
        payload = cube_to_json(cube).encode("utf-8")
        outcome, snapshot = self.store.record(
            publication.source_id,
            payload,
            cube,
            content_hash(payload),
            datetime.now(timezone.utc),
        )
        return outcome, snapshot.version if snapshot else None

    # -- derived data --------------------------------------------------------

    def recipe_for(self, entry: VariableEntry) -> Recipe:
        if entry.recipe_id is None or entry.recipe_id not in self.catalog.recipes:
            raise ValueError(f"variable {entry.number} has no usable recipe")
        return self.catalog.recipes[entry.recipe_id]

    def evaluate_variable(self, entry: VariableEntry) -> Evaluation:
        return evaluate(self.recipe_for(entry), self.store)

    def indicator_results(self) -> list[IndicatorResult]:
        config = self.catalog.indicators
        if config is None:
            raise ValueError("catalog does not configure growth indicators")
        recipes = []
        for indicator, number in config.variables.items():
            entry = self.catalog.get(number)
            recipes.append((indicator, number, self.recipe_for(entry)))
        return growth_indicators(self.store, config.window, recipes)

    # -- charts ----------------------------------------------------------------

    def variable_chart(
        self,
        entry: VariableEntry,
        kind: ChartKind | str | None = None,
        x_dim: str | None = None,
        series_dim: str | None = None,
        filters: dict[str, str] | None = None,
    ) -> tuple[ChartSpec, Evaluation]:
        """Evaluate a variable and shape it into a chart.

        Filters slice one category out of a dimension and drop that axis
        from the chart.  When a filter removes the configured series
        axis, the default stacking kinds fall back to the variable's
        first plain alternative, so a drilldown detail view renders as a
        simple column chart rather than a one-series stack.
        """
        evaluation = self.evaluate_variable(entry)
        cube = evaluation.cube
        if filters:
            cube = cube.slice({dim: [cat] for dim, cat in filters.items()})
            for dim in filters:
                if cube.rank > 1:
                    cube = cube.squeeze(dim)
        remaining = cube.dimension_ids

        x = x_dim or entry.x_dim
        if x not in remaining:
            x = remaining[0]
        series = series_dim if series_dim is not None else entry.series_dim
        if series not in remaining or series == x:
            series = None
        if series is None and cube.rank == 2:
            series = next(d for d in remaining if d != x)

        if kind is not None:
            chosen = ChartKind(kind)
        else:
            chosen = entry.default_chart
            if series is None and chosen in STACKING_KINDS:
                chosen = next(
                    (
                        k
                        for k in alternative_kinds(entry)
                        if k in (ChartKind.COLUMN, ChartKind.LINE)
                    ),
                    chosen,
                )
        spec = build_chart(
            cube, entry, chosen, x, series, provenance=evaluation.provenance
        )
        return spec, evaluation


def parse_filters(text: str | None) -> dict[str, str]:
    """Parse 'dim:category[,dim:category...]' filter expressions."""
    if not text:
        return {}
    filters = {}
    for clause in text.split(","):
        if ":" not in clause:
            raise CubeError(f"bad filter clause '{clause}', expected dim:category")
        dim, _, category = clause.partition(":")
        if not dim or not category:
            raise CubeError(f"bad filter clause '{clause}', expected dim:category")
        filters[dim.strip()] = category.strip()
    return filters
