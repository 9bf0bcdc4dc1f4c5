"""Periodic fetching of external open-data sources into versioned snapshots.

Sources are fetched over an injected transport and deduplicated by a
content hash of the raw payload, so refetching identical data never
creates a new version.  The clock is injected too, which makes the whole
scheduler testable without sleeping or live endpoints.

Failures never roll back the last good snapshot: consumers always see
the latest successful version.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time as _time
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Callable, Iterable, Protocol, Sequence

from .cube import DataCube, cube_from_json, cube_to_json
from .jsonstat import parse_jsonstat

log = logging.getLogger(__name__)

DEFAULT_REFRESH_INTERVAL = 24 * 3600  # seconds


class FetchError(Exception):
    """A fetch attempt failed; ``stage`` is transport, status or parse."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: str
    endpoint: str
    request_body: str | None = None
    format: str = "jsonstat2"
    refresh_interval: int = DEFAULT_REFRESH_INTERVAL
    enabled: bool = True

    def __post_init__(self) -> None:
        if not self.source_id:
            raise ValueError("source_id must be non-empty")
        if self.refresh_interval <= 0:
            raise ValueError(f"source '{self.source_id}': refresh_interval must be > 0")
        if self.format != "jsonstat2":
            raise ValueError(f"source '{self.source_id}': unsupported format '{self.format}'")


@dataclass(frozen=True)
class Snapshot:
    source_id: str
    fetched_at: datetime
    content_hash: str
    cube: DataCube
    version: int
    payload: bytes = b""


@dataclass
class FetchStatus:
    source_id: str
    last_attempt: datetime | None = None
    last_success: datetime | None = None
    consecutive_failures: int = 0
    last_error: str | None = None

    def record_success(self, now: datetime) -> None:
        self.last_attempt = now
        self.last_success = now
        self.consecutive_failures = 0
        self.last_error = None

    def record_failure(self, now: datetime, error: str) -> None:
        self.last_attempt = now
        self.consecutive_failures += 1
        self.last_error = error


class Transport(Protocol):
    """Anything that can turn a source descriptor into (status, body)."""

    def request(self, source: SourceDescriptor) -> tuple[int, bytes]: ...


class HttpTransport:
    """Live HTTP transport; POSTs the request body when one is configured."""

    def __init__(self, timeout: float = 30.0):
        self.timeout = timeout

    def request(self, source: SourceDescriptor) -> tuple[int, bytes]:
        import requests

        try:
            if source.request_body is not None:
                response = requests.post(
                    source.endpoint, data=source.request_body.encode("utf-8"),
                    headers={"Content-Type": "application/json"}, timeout=self.timeout,
                )
            else:
                response = requests.get(source.endpoint, timeout=self.timeout)
        except requests.RequestException as exc:
            raise FetchError("transport", f"{source.endpoint}: {exc}") from exc
        return response.status_code, response.content


class FixtureTransport:
    """Serves recorded payloads from disk, for offline operation and tests."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)

    def request(self, source: SourceDescriptor) -> tuple[int, bytes]:
        path = self.directory / f"{source.source_id}.json"
        if not path.exists():
            return 404, b""
        return 200, path.read_bytes()


@dataclass(frozen=True)
class FetchResult:
    payload: bytes
    cube: DataCube
    content_hash: str


def content_hash(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def fetch_once(source: SourceDescriptor, transport: Transport) -> FetchResult:
    """Fetch and parse one source; raises FetchError on any failure."""
    if not source.enabled:
        raise FetchError("transport", f"source '{source.source_id}' is disabled")
    try:
        status, payload = transport.request(source)
    except FetchError:
        raise
    except Exception as exc:  # transport bugs must not crash the scheduler
        raise FetchError("transport", f"{source.endpoint}: {exc}") from exc
    if not 200 <= status < 300:
        raise FetchError("status", f"{source.endpoint}: status {status}")
    try:
        cube = parse_jsonstat(payload)
    except ValueError as exc:
        raise FetchError("parse", str(exc)) from exc
    cube = replace(cube, source_id=source.source_id)
    return FetchResult(payload, cube, content_hash(payload))


class SnapshotStore:
    """Versioned snapshots per source; single writer, many readers.

    Snapshots are immutable and appended under a lock, so a reader either
    sees a complete snapshot or the previous one, never a partial write.
    """

    def __init__(self) -> None:
        self._snapshots: dict[str, list[Snapshot]] = {}
        self._lock = threading.Lock()

    def record(
        self,
        source_id: str,
        payload: bytes,
        cube: DataCube,
        digest: str,
        now: datetime,
    ) -> tuple[str, Snapshot]:
        """Store a fetched payload; returns ("new"|"unchanged", snapshot)."""
        with self._lock:
            history = self._snapshots.setdefault(source_id, [])
            if history and history[-1].content_hash == digest:
                return "unchanged", history[-1]
            snapshot = Snapshot(
                source_id=source_id,
                fetched_at=now,
                content_hash=digest,
                cube=cube,
                version=history[-1].version + 1 if history else 1,
                payload=payload,
            )
            history.append(snapshot)
            return "new", snapshot

    def latest(self, source_id: str) -> Snapshot | None:
        with self._lock:
            history = self._snapshots.get(source_id)
            return history[-1] if history else None

    def versions(self, source_id: str) -> list[Snapshot]:
        with self._lock:
            return list(self._snapshots.get(source_id, []))

    def source_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._snapshots)

    # -- directory persistence ------------------------------------------

    def save(self, directory: Path | str) -> None:
        root = Path(directory)
        for source_id in self.source_ids():
            source_dir = root / source_id
            source_dir.mkdir(parents=True, exist_ok=True)
            index = []
            for snap in self.versions(source_id):
                payload_name = f"v{snap.version:04d}.payload"
                (source_dir / payload_name).write_bytes(snap.payload)
                (source_dir / f"v{snap.version:04d}.cube.json").write_text(
                    cube_to_json(snap.cube), encoding="utf-8"
                )
                index.append(
                    {
                        "version": snap.version,
                        "fetched_at": snap.fetched_at.isoformat(),
                        "content_hash": snap.content_hash,
                        "payload": payload_name,
                    }
                )
            (source_dir / "index.json").write_text(
                json.dumps(index, indent=2), encoding="utf-8"
            )

    @classmethod
    def load(cls, directory: Path | str) -> "SnapshotStore":
        store = cls()
        root = Path(directory)
        if not root.exists():
            return store
        for source_dir in sorted(p for p in root.iterdir() if p.is_dir()):
            index_path = source_dir / "index.json"
            if not index_path.exists():
                continue
            history = []
            for entry in json.loads(index_path.read_text(encoding="utf-8")):
                cube = cube_from_json(
                    (source_dir / f"v{entry['version']:04d}.cube.json").read_text(
                        encoding="utf-8"
                    )
                )
                history.append(
                    Snapshot(
                        source_id=source_dir.name,
                        fetched_at=datetime.fromisoformat(entry["fetched_at"]),
                        content_hash=entry["content_hash"],
                        cube=cube,
                        version=entry["version"],
                        payload=(source_dir / entry["payload"]).read_bytes(),
                    )
                )
            history.sort(key=lambda s: s.version)
            store._snapshots[source_dir.name] = history
        return store


def refresh_due(
    source: SourceDescriptor, last_success: datetime | None, now: datetime
) -> bool:
    """True when the source was never fetched or its interval has elapsed."""
    if last_success is None:
        return True
    return now - last_success >= timedelta(seconds=source.refresh_interval)


class IngestService:
    """Fetches sources, records snapshots and tracks per-source status."""

    def __init__(self, store: SnapshotStore, transport: Transport):
        self.store = store
        self.transport = transport
        self.statuses: dict[str, FetchStatus] = {}

    def status_for(self, source_id: str) -> FetchStatus:
        return self.statuses.setdefault(source_id, FetchStatus(source_id))

    def refresh(self, source: SourceDescriptor, now: datetime) -> tuple[str, Snapshot | None]:
        """One fetch attempt; returns ("new"|"unchanged"|"error", snapshot)."""
        status = self.status_for(source.source_id)
        try:
            result = fetch_once(source, self.transport)
        except FetchError as exc:
            status.record_failure(now, f"{exc.stage}: {exc}")
            log.warning("fetch of %s failed (%s)", source.source_id, exc)
            return "error", None
        status.record_success(now)
        outcome, snapshot = self.store.record(
            source.source_id, result.payload, result.cube, result.content_hash, now
        )
        return outcome, snapshot


class Clock(Protocol):
    def now(self) -> datetime: ...
    def sleep(self, seconds: float) -> None: ...


class WallClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def sleep(self, seconds: float) -> None:
        _time.sleep(seconds)


class SimulatedClock:
    """Deterministic clock for tests; sleeping advances time instantly."""

    def __init__(self, start: datetime):
        self._now = start

    def now(self) -> datetime:
        return self._now

    def sleep(self, seconds: float) -> None:
        self._now += timedelta(seconds=seconds)


class Scheduler:
    """Drives periodic refreshes: each tick fetches every due, enabled source.

    ``sources`` is a callable returning the current descriptor list, so
    configuration changes (such as disabling a source) take effect at the
    next tick.
    """

    def __init__(
        self,
        sources: Callable[[], Sequence[SourceDescriptor]] | Sequence[SourceDescriptor],
        service: IngestService,
        clock: Clock,
        tick_seconds: float = 3600.0,
    ):
        self._sources = sources if callable(sources) else (lambda: sources)
        self.service = service
        self.clock = clock
        self.tick_seconds = tick_seconds

    def tick(self) -> int:
        """Fetch every enabled, due source exactly once; returns attempt count."""
        now = self.clock.now()
        attempts = 0
        for source in self._sources():
            if not source.enabled:
                continue
            status = self.service.status_for(source.source_id)
            if refresh_due(source, status.last_success, now):
                attempts += 1
                self.service.refresh(source, now)
        return attempts

    def run_for(self, duration: timedelta) -> int:
        """Run ticks over a horizon (inclusive of its endpoints); returns total attempts."""
        end = self.clock.now() + duration
        attempts = self.tick()
        while self.clock.now() + timedelta(seconds=self.tick_seconds) <= end:
            self.clock.sleep(self.tick_seconds)
            attempts += self.tick()
        return attempts

    def run_forever(self) -> None:
        while True:
            self.tick()
            self.clock.sleep(self.tick_seconds)


def refresh_all(
    sources: Iterable[SourceDescriptor], service: IngestService, now: datetime | None = None
) -> dict[str, str]:
    """One immediate refresh of every enabled source; returns outcomes by id."""
    now = now or datetime.now(timezone.utc)
    outcomes = {}
    for source in sources:
        if not source.enabled:
            continue
        outcome, _ = service.refresh(source, now)
        outcomes[source.source_id] = outcome
    return outcomes
