"""The HTTP boundary: catalog navigation, statistics, exports and survey intake.

Read endpoints are side-effect free; survey submissions go straight into
the identified partition and are never echoed back; admin endpoints sit
behind a static bearer token.
"""

from __future__ import annotations

import logging
from typing import Annotated

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Response
from fastapi.responses import FileResponse, HTMLResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .app import Application, parse_filters
from .catalog import UnknownVariableError
from .charts import ChartError, ChartKind, alternative_kinds, spec_to_dict
from .config import AppConfig, fixture_config
from .cube import CubeError
from .derive import DerivationError, MissingSourceError
from .export import to_csv, to_svg, to_table
from .privacy import Answer

log = logging.getLogger(__name__)

EXPORT_FORMATS = ("csv", "svg")

FALLBACK_SHELL = """<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>Growth barometer</title></head>
<body>
<h1>Growth barometer</h1>
<p>The exploration UI has not been built. The API is available under
<a href="/api/groups">/api/groups</a> and <code>/api/statistic/{number}</code>;
interactive docs at <a href="/docs">/docs</a>.</p>
</body>
</html>
"""


class SurveySubmission(BaseModel):
    region: str = Field(min_length=1)
    answers: dict[str, Answer] = Field(min_length=1)
    org_number: str | None = None
    business_name: str | None = None


def create_app(config: AppConfig | None = None, application: Application | None = None) -> FastAPI:
    if application is None:
        application = Application(config or fixture_config())
        application.startup()
    state = application

    api = FastAPI(title="Growth barometer", version="1.0", docs_url="/docs")

    def require_admin(
        authorization: Annotated[str | None, Header()] = None,
    ) -> None:
        token = state.config.admin_token
        if not token or authorization != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="admin token required")

    def load_entry(number: int):
        try:
            return state.catalog.get(number)
        except UnknownVariableError:
            raise HTTPException(status_code=404, detail=f"no statistic numbered {number}")

    def chart_for(
        entry,
        kind: str | None = None,
        x: str | None = None,
        series: str | None = None,
        filter_expr: str | None = None,
    ):
        if kind is not None:
            try:
                requested = ChartKind(kind)
            except ValueError:
                raise HTTPException(status_code=422, detail=f"unknown chart kind '{kind}'")
            offered = alternative_kinds(entry)
            if requested not in offered:
                raise HTTPException(
                    status_code=422,
                    detail=(
                        f"kind '{kind}' is not offered for statistic {entry.number}; "
                        f"choose one of {[k.value for k in offered]}"
                    ),
                )
        try:
            filters = parse_filters(filter_expr)
            return state.variable_chart(entry, kind, x, series, filters)
        except MissingSourceError as exc:
            raise HTTPException(
                status_code=503,
                detail=f"no snapshot available yet for source '{exc.source_id}'",
            )
        except (CubeError, ChartError, DerivationError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    # -- public API ------------------------------------------------------

    @api.get("/api/groups")
    def groups():
        return {"groups": state.catalog.navigation_tree()}

    @api.get("/api/statistic/{number}")
    def statistic(number: int):
        entry = load_entry(number)
        spec, evaluation = chart_for(entry)
        return {
            "variable": _entry_payload(state, entry),
            "provenance": [list(p) for p in evaluation.provenance],
            "chart": spec_to_dict(spec),
        }

    @api.get("/api/statistic/{number}/chart")
    def statistic_chart(
        number: int,
        kind: str | None = None,
        x: str | None = None,
        series: str | None = None,
        filter: str | None = Query(default=None),
    ):
        entry = load_entry(number)
        spec, _ = chart_for(entry, kind, x, series, filter)
        return spec_to_dict(spec)

    @api.get("/api/statistic/{number}/table")
    def statistic_table(
        number: int,
        kind: str | None = None,
        x: str | None = None,
        series: str | None = None,
        filter: str | None = Query(default=None),
    ):
        entry = load_entry(number)
        spec, _ = chart_for(entry, kind, x, series, filter)
        table = to_table(spec)
        return {"headers": list(table.headers), "rows": [list(r) for r in table.rows]}

    @api.get("/api/statistic/{number}/export")
    def statistic_export(
        number: int,
        format: str = Query(...),
        kind: str | None = None,
        x: str | None = None,
        series: str | None = None,
        filter: str | None = Query(default=None),
    ):
        if format not in EXPORT_FORMATS:
            raise HTTPException(
                status_code=422,
                detail=f"unsupported format '{format}'; supported: {', '.join(EXPORT_FORMATS)}",
            )
        entry = load_entry(number)
        spec, _ = chart_for(entry, kind, x, series, filter)
        filename = f"statistic-{number}.{format}"
        if format == "csv":
            body = to_csv(spec).encode("utf-8")
            media = "text/csv; charset=utf-8"
        else:
            try:
                body = to_svg(spec).encode("utf-8")
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            media = "image/svg+xml"
        return Response(
            content=body,
            media_type=media,
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    @api.get("/api/indicators")
    def indicators():
        try:
            results = state.indicator_results()
        except ValueError as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        return {
            "window": list(state.catalog.indicators.window),
            "indicators": [
                {
                    "indicator": r.indicator,
                    "variable": r.variable,
                    "net_change": r.value,
                    "error": r.error,
                    "provenance": [list(p) for p in r.provenance],
                }
                for r in results
            ],
        }

    @api.post("/api/survey/responses", status_code=202)
    def submit_survey(submission: SurveySubmission):
        receipt = state.surveys.submit(
            region=submission.region,
            answers=submission.answers,
            org_number=submission.org_number,
            business_name=submission.business_name,
        )
        return {"receipt": receipt}

    # -- admin -------------------------------------------------------------

    @api.post("/api/admin/refresh/{source_id}", dependencies=[Depends(require_admin)])
    def admin_refresh(source_id: str):
        outcome, snapshot = state.refresh_source(source_id)
        if outcome is None:
            raise HTTPException(status_code=404, detail=f"unknown source '{source_id}'")
        if outcome == "error":
            status = state.ingest.status_for(source_id)
            return {"outcome": "error", "error": status.last_error}
        return {"outcome": outcome, "version": snapshot.version if snapshot else None}

    @api.post("/api/admin/survey/republish", dependencies=[Depends(require_admin)])
    def admin_republish_survey():
        try:
            outcome, version = state.republish_survey()
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"outcome": outcome, "version": version}

    @api.get("/healthz")
    def healthz():
        sources = {}
        for source in state.config.sources:
            status = state.ingest.statuses.get(source.source_id)
            latest = state.store.latest(source.source_id)
            sources[source.source_id] = {
                "enabled": source.enabled,
                "last_attempt": status.last_attempt.isoformat() if status and status.last_attempt else None,
                "last_success": status.last_success.isoformat() if status and status.last_success else None,
                "consecutive_failures": status.consecutive_failures if status else 0,
                "last_error": status.last_error if status else None,
                "latest_version": latest.version if latest else None,
            }
        return {"status": "ok", "sources": sources}

    # -- UI shell ------------------------------------------------------------

    ui_dist = state.config.ui_dist

    def shell() -> Response:
        if ui_dist and (ui_dist / "index.html").exists():
            return FileResponse(ui_dist / "index.html")
        return HTMLResponse(FALLBACK_SHELL)

    @api.get("/", include_in_schema=False)
    def root():
        return shell()

    @api.get("/statistic/{number}", include_in_schema=False)
    def statistic_page(number: int):
        # deep links into the exploration UI; the client reads the number
        # from the location itself
        return shell()

    if ui_dist and (ui_dist / "assets").exists():
        api.mount("/assets", StaticFiles(directory=ui_dist / "assets"), name="assets")

    api.state.application = state
    return api


def _entry_payload(state: Application, entry) -> dict:
    return {
        "number": entry.number,
        "title": entry.title,
        "description": entry.description,
        "group": entry.group,
        "category": entry.category,
        "unit": entry.unit,
        "default_chart": entry.default_chart.value,
        "alternative_charts": [k.value for k in entry.alternative_charts],
        "related_documents": [
            {"label": d.label, "url": d.url} for d in entry.related_documents
        ],
        "related_variables": [
            {"number": number, "title": title}
            for number, title in state.catalog.related(entry.number)
        ],
    }
