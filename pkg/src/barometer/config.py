"""Application configuration: file based, with environment overrides.

Relative paths inside a config file resolve against the file's own
directory, so the packaged fixture configuration works from anywhere.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .ingest import DEFAULT_REFRESH_INTERVAL, SourceDescriptor


@dataclass
class AppConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    admin_token: str | None = None
    k_threshold: int = 5
    survey_salt: str = "change-me"
    fixture_mode: bool = True
    fetch_on_startup: bool = True
    catalog_path: Path | None = None
    payload_dir: Path | None = None
    survey_seed_path: Path | None = None
    data_dir: Path | None = None
    ui_dist: Path | None = None
    sources: tuple[SourceDescriptor, ...] = field(default_factory=tuple)


def _resolve(base: Path, value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    return path if path.is_absolute() else base / path


def load_config(path: Path | str) -> AppConfig:
    path = Path(path)
    doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    base = path.parent
    listen = doc.get("listen", {})
    sources = tuple(
        SourceDescriptor(
            source_id=spec["id"],
            endpoint=spec["endpoint"],
            request_body=spec.get("request_body"),
            refresh_interval=int(spec.get("refresh_interval", DEFAULT_REFRESH_INTERVAL)),
            enabled=bool(spec.get("enabled", True)),
        )
        for spec in doc.get("sources", [])
    )
    config = AppConfig(
        host=listen.get("host", "127.0.0.1"),
        port=int(listen.get("port", 8000)),
        admin_token=doc.get("admin_token"),
        k_threshold=int(doc.get("k_threshold", 5)),
        survey_salt=str(doc.get("survey_salt", "change-me")),
        fixture_mode=bool(doc.get("fixture_mode", False)),
        fetch_on_startup=bool(doc.get("fetch_on_startup", True)),
        catalog_path=_resolve(base, doc.get("catalog")),
        payload_dir=_resolve(base, doc.get("payload_dir")),
        survey_seed_path=_resolve(base, doc.get("survey_seed")),
        data_dir=_resolve(base, doc.get("data_dir")),
        ui_dist=_resolve(base, doc.get("ui_dist")),
        sources=sources,
    )
    return apply_env_overrides(config)


def apply_env_overrides(config: AppConfig, env=os.environ) -> AppConfig:
    if "BAROMETER_HOST" in env:
        config.host = env["BAROMETER_HOST"]
    if "BAROMETER_PORT" in env:
        config.port = int(env["BAROMETER_PORT"])
    if "BAROMETER_ADMIN_TOKEN" in env:
        config.admin_token = env["BAROMETER_ADMIN_TOKEN"]
    if "BAROMETER_K_THRESHOLD" in env:
        config.k_threshold = int(env["BAROMETER_K_THRESHOLD"])
    if "BAROMETER_SURVEY_SALT" in env:
        config.survey_salt = env["BAROMETER_SURVEY_SALT"]
    if "BAROMETER_FIXTURE_MODE" in env:
        config.fixture_mode = env["BAROMETER_FIXTURE_MODE"].lower() in ("1", "true", "yes")
    if "BAROMETER_UI_DIST" in env:
        config.ui_dist = Path(env["BAROMETER_UI_DIST"])
    return config


def fixture_config_path() -> Path:
    return Path(__file__).parent / "fixtures" / "config.yaml"


def fixture_config() -> AppConfig:
    """The packaged offline configuration (recorded payloads, seeded survey)."""
    return load_config(fixture_config_path())
