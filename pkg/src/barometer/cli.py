"""Command line entry points: serve the API, fetch sources, write reports."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .app import Application
from .config import AppConfig, fixture_config, load_config


def _load(config_path: str | None) -> AppConfig:
    if config_path is None:
        return fixture_config()
    return load_config(Path(config_path))


@click.group()
@click.option("--verbose", is_flag=True, help="Log at debug level.")
def main(verbose: bool) -> None:
    """Regional growth barometer."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Configuration file; defaults to the bundled offline fixtures.")
@click.option("--host", default=None, help="Override the listen host.")
@click.option("--port", default=None, type=int, help="Override the listen port.")
def serve(config_path, host, port) -> None:
    """Run the HTTP service (and its periodic fetcher)."""
    import threading

    import uvicorn

    from .api import create_app
    from .ingest import Scheduler, WallClock

    config = _load(config_path)
    if host:
        config.host = host
    if port:
        config.port = port
    application = Application(config)
    application.startup()
    if not config.fixture_mode and config.sources:
        scheduler = Scheduler(
            lambda: config.sources, application.ingest, WallClock(), tick_seconds=300
        )
        thread = threading.Thread(target=scheduler.run_forever, daemon=True)
        thread.start()
    uvicorn.run(create_app(application=application), host=config.host, port=config.port)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--source", "source_id", default=None, help="Fetch one source only.")
def fetch(config_path, source_id) -> None:
    """Fetch sources once and store new snapshot versions."""
    config = _load(config_path)
    application = Application(config)
    sources = [
        s for s in config.sources if source_id is None or s.source_id == source_id
    ]
    if source_id and not sources:
        click.echo(f"unknown source '{source_id}'", err=True)
        sys.exit(1)
    from datetime import datetime, timezone

    for source in sources:
        outcome, snapshot = application.ingest.refresh(
            source, datetime.now(timezone.utc)
        )
        version = snapshot.version if snapshot else "-"
        click.echo(f"{source.source_id}: {outcome} (version {version})")
    if config.data_dir:
        application.store.save(config.data_dir)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True,
              help="Directory for the report files.")
@click.option("--variable", "numbers", type=int, multiple=True,
              help="Limit to specific variable numbers (repeatable).")
def report(config_path, out_dir, numbers) -> None:
    """Write CSV, SVG and PNG figures for published variables."""
    from .report import write_report

    application = Application(_load(config_path))
    application.startup()
    written = write_report(application, out_dir, list(numbers) or None)
    for path in written:
        click.echo(str(path))


@main.command("publish-survey")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def publish_survey(config_path) -> None:
    """Run the disclosure-control pipeline and publish the survey aggregate."""
    application = Application(_load(config_path))
    application.startup()
    outcome, version = application.republish_survey()
    click.echo(f"survey aggregate: {outcome} (version {version})")


if __name__ == "__main__":
    main()
