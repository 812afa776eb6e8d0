"""Content-addressed run store.

A run is one generation of an event stream from one config document.
Its id is the SHA-256 of the exact config bytes, so regenerating from
an unchanged file lands in the same run directory and a one-character
config edit opens a fresh one.

Layout under the store root, one directory per run:

    <run_id>/config.json        exact config snapshot (bytes as given)
    <run_id>/events.ndjson      one JSON object per event, sorted keys
    <run_id>/assessments.ndjson append-only review log, sequence-numbered
    <run_id>/meta.json          timestamps and counts

Timestamps live only in meta.json; every other artifact (and the SQL
export) is byte-identical across repeated runs of the same config.
Assessment appends take a file lock so concurrent reviewers interleave
without losing records; the latest record per event wins.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterator

from filelock import FileLock

from hazident.events import Event
from hazident.hazop import Malfunction
from hazident.model import AnalysisConfig, Guideword, GuidewordScope, SkillCategory, parse_config
from hazident.scenes import Scene


class StoreError(Exception):
    """Base class for run-store failures."""


class RunNotFoundError(StoreError):
    pass


class RunCorruptError(StoreError):
    """A run directory is missing required files or holds unreadable ones."""


class AssessmentError(StoreError):
    """An assessment violates a review rule (unknown event, missing rationale, ...)."""


class AssessmentStatus(str, Enum):
    HAZARDOUS = "hazardous"
    NOT_HAZARDOUS = "not_hazardous"
    UNSURE = "unsure"


@dataclass(frozen=True)
class Assessment:
    seq: int
    event_id: str
    status: AssessmentStatus
    rationale: str = ""
    assessor: str = ""


def run_id_for(document: str | bytes) -> str:
    data = document.encode("utf-8") if isinstance(document, str) else document
    return hashlib.sha256(data).hexdigest()


# ----------------------------------------------------------------- encoding


def event_to_record(event: Event) -> dict[str, Any]:
    malfunction = None
    if event.malfunction is not None:
        m = event.malfunction
        malfunction = {
            "id": m.id,
            "skill": m.skill,
            "skill_name": m.skill_name,
            "guideword": m.guideword.text,
            "guideword_scope": m.guideword.scope.value,
            "category": m.guideword.category.value,
            "parameter": m.parameter,
            "description": m.description,
            "note": m.note,
        }
    return {
        "id": event.id,
        "mode": event.mode,
        "malfunction": malfunction,
        "scene": {
            "id": event.scene.id,
            "index": event.scene.index,
            "values": dict(event.scene.values),
            "exceedances": list(event.scene.exceedances),
        },
        "failure_count": event.failure_count,
        "relevant": event.relevant,
        "drop_reasons": list(event.drop_reasons),
    }


def event_from_record(record: dict[str, Any]) -> Event:
    malfunction = None
    raw = record.get("malfunction")
    if raw is not None:
        malfunction = Malfunction(
            id=raw["id"],
            skill=raw["skill"],
            skill_name=raw["skill_name"],
            guideword=Guideword(
                text=raw["guideword"],
                scope=GuidewordScope(raw["guideword_scope"]),
                category=SkillCategory(raw["category"]),
            ),
            parameter=raw.get("parameter"),
            description=raw.get("description", ""),
            note=raw.get("note", ""),
        )
    scene_raw = record["scene"]
    scene = Scene(
        id=scene_raw["id"],
        index=scene_raw["index"],
        values=tuple(scene_raw["values"].items()),
        exceedances=tuple(scene_raw["exceedances"]),
    )
    return Event(
        id=record["id"],
        mode=record["mode"],
        malfunction=malfunction,
        scene=scene,
        failure_count=record["failure_count"],
        drop_reasons=tuple(record["drop_reasons"]),
    )


def _encode_line(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- run store


@dataclass(frozen=True)
class RunSummary:
    run_id: str
    created_at: str
    config_name: str
    config_version: str
    event_count: int
    relevant_count: int


class OpenRun:
    """One run directory, with events loaded and indexed by id."""

    def __init__(self, path: Path, config: AnalysisConfig, events: list[Event]):
        self.path = path
        self.run_id = path.name
        self.config = config
        self.events = events
        self._by_id = {e.id: e for e in events}
        self._relevant_ids = frozenset(e.id for e in events if e.relevant)

    def event(self, event_id: str) -> Event:
        try:
            return self._by_id[event_id]
        except KeyError:
            raise AssessmentError(f"unknown event id {event_id!r}") from None

    def has_event(self, event_id: str) -> bool:
        return event_id in self._by_id

    @property
    def assessments_path(self) -> Path:
        return self.path / "assessments.ndjson"

    def assessment_log(self) -> list[Assessment]:
        """Full append-only log in write order."""
        path = self.assessments_path
        if not path.exists():
            return []
        log: list[Assessment] = []
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                log.append(
                    Assessment(
                        seq=raw["seq"],
                        event_id=raw["event_id"],
                        status=AssessmentStatus(raw["status"]),
                        rationale=raw.get("rationale", ""),
                        assessor=raw.get("assessor", ""),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise RunCorruptError(f"{path}:{lineno}: unreadable assessment record: {exc}") from None
        return log

    def latest_assessments(self) -> dict[str, Assessment]:
        latest: dict[str, Assessment] = {}
        for assessment in self.assessment_log():
            latest[assessment.event_id] = assessment
        return latest

    def append_assessment(
        self, event_id: str, status: AssessmentStatus | str, rationale: str = "", assessor: str = ""
    ) -> Assessment:
        """Validate and append one review verdict; safe under concurrent writers.

        Only relevant events are reviewable, and a hazardous verdict
        requires a rationale. The sequence number is assigned under the
        lock, so interleaved writers never collide.
        """
        try:
            status = AssessmentStatus(status)
        except ValueError:
            allowed = ", ".join(s.value for s in AssessmentStatus)
            raise AssessmentError(f"unknown status {status!r} (allowed: {allowed})") from None
        event = self.event(event_id)
        if not event.relevant:
            raise AssessmentError(
                f"event {event_id!r} was dropped ({', '.join(event.drop_reasons)}); "
                "only relevant events are reviewed"
            )
        if status is AssessmentStatus.HAZARDOUS and not rationale.strip():
            raise AssessmentError("a hazardous verdict requires a rationale")
        path = self.assessments_path
        lock = FileLock(str(path) + ".lock")
        with lock:
            existing = 0
            if path.exists():
                with path.open("r", encoding="utf-8") as handle:
                    existing = sum(1 for line in handle if line.strip())
            assessment = Assessment(
                seq=existing + 1,
                event_id=event_id,
                status=status,
                rationale=rationale,
                assessor=assessor,
            )
            with path.open("a", encoding="utf-8") as handle:
                handle.write(
                    _encode_line(
                        {
                            "seq": assessment.seq,
                            "event_id": assessment.event_id,
                            "status": assessment.status.value,
                            "rationale": assessment.rationale,
                            "assessor": assessment.assessor,
                        }
                    )
                )
        return assessment

    def hazardous_by_mode(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for assessment in self.latest_assessments().values():
            if assessment.status is AssessmentStatus.HAZARDOUS:
                mode = self._by_id[assessment.event_id].mode
                counts[mode] = counts.get(mode, 0) + 1
        return counts

    def progress(self) -> dict[str, Any]:
        latest = self.latest_assessments()
        by_status = {status.value: 0 for status in AssessmentStatus}
        for assessment in latest.values():
            by_status[assessment.status.value] += 1
        relevant = len(self._relevant_ids)
        assessed = len(latest)
        by_mode = []
        mode_names = {m.id: m.name for m in self.config.modes}
        for mode in self.config.modes:
            mode_relevant = sum(1 for e in self.events if e.relevant and e.mode == mode.id)
            mode_assessed = sum(
                1 for a in latest.values() if self._by_id[a.event_id].mode == mode.id
            )
            mode_hazardous = sum(
                1
                for a in latest.values()
                if a.status is AssessmentStatus.HAZARDOUS and self._by_id[a.event_id].mode == mode.id
            )
            by_mode.append(
                {
                    "mode": mode.id,
                    "mode_name": mode_names[mode.id],
                    "relevant": mode_relevant,
                    "assessed": mode_assessed,
                    "hazardous": mode_hazardous,
                }
            )
        return {
            "total": len(self.events),
            "relevant": relevant,
            "assessed": assessed,
            "remaining": relevant - assessed,
            "by_status": by_status,
            "by_mode": by_mode,
        }


class RunStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)

    def run_path(self, run_id: str) -> Path:
        return self.root / run_id

    def save_run(self, config: AnalysisConfig, events: list[Event]) -> str:
        """Write (or refresh) the run for this config; returns the run id.

        Event and config artifacts are rewritten deterministically; an
        existing assessment log and the original creation timestamp are
        preserved.
        """
        from hazident.model import serialize_config

        document = config.source_text if config.source_text is not None else serialize_config(config)
        run_id = run_id_for(document)
        path = self.run_path(run_id)
        path.mkdir(parents=True, exist_ok=True)
        (path / "config.json").write_text(document, encoding="utf-8")
        with (path / "events.ndjson").open("w", encoding="utf-8") as handle:
            for event in events:
                handle.write(_encode_line(event_to_record(event)))
        meta_path = path / "meta.json"
        created_at = datetime.now(timezone.utc).isoformat()
        if meta_path.exists():
            try:
                created_at = json.loads(meta_path.read_text(encoding="utf-8"))["created_at"]
            except (json.JSONDecodeError, KeyError):
                pass  # unreadable meta is rebuilt wholesale
        meta = {
            "run_id": run_id,
            "created_at": created_at,
            "updated_at": datetime.now(timezone.utc).isoformat(),
            "config_name": str(config.metadata.get("name", "")),
            "config_version": str(config.metadata.get("version", "")),
            "event_count": len(events),
            "relevant_count": sum(1 for e in events if e.relevant),
        }
        meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return run_id

    def open_run(self, run_id: str) -> OpenRun:
        path = self.run_path(run_id)
        if not path.is_dir():
            raise RunNotFoundError(f"no run {run_id!r} under {self.root}")
        config_path = path / "config.json"
        events_path = path / "events.ndjson"
        for required in (config_path, events_path):
            if not required.exists():
                raise RunCorruptError(f"run {run_id!r} is missing {required.name}")
        config = parse_config(config_path.read_text(encoding="utf-8"))
        events: list[Event] = []
        for lineno, line in enumerate(events_path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                events.append(event_from_record(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise RunCorruptError(f"{events_path}:{lineno}: unreadable event record: {exc}") from None
        return OpenRun(path=path, config=config, events=events)

    def list_runs(self) -> list[RunSummary]:
        """Summaries for every readable run, newest first."""
        summaries: list[RunSummary] = []
        if not self.root.is_dir():
            return summaries
        for entry in sorted(self.root.iterdir()):
            meta_path = entry / "meta.json"
            if not meta_path.is_file():
                continue
            try:
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                continue  # skip unreadable runs in listings; open_run reports them
            summaries.append(
                RunSummary(
                    run_id=meta.get("run_id", entry.name),
                    created_at=meta.get("created_at", ""),
                    config_name=meta.get("config_name", ""),
                    config_version=meta.get("config_version", ""),
                    event_count=int(meta.get("event_count", 0)),
                    relevant_count=int(meta.get("relevant_count", 0)),
                )
            )
        summaries.sort(key=lambda s: (s.created_at, s.run_id), reverse=True)
        return summaries


# ---------------------------------------------------------------- SQL export


def _sql_str(value: str | None) -> str:
    if value is None:
        return "NULL"
    return "'" + value.replace("'", "''") + "'"


def _sql_ident(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def export_sql(run: OpenRun) -> str:
    """Schema plus data for one run as portable SQL (no timestamps).

    Scene dimensions become one column each, so the event table mirrors
    the catalog of the config that produced the run.
    """
    dims = run.config.scene_catalog.dimension_names()
    lines: list[str] = []
    columns = [
        '"id" TEXT PRIMARY KEY',
        '"mode" TEXT NOT NULL',
        '"malfunction_id" TEXT',
        '"skill" TEXT',
        '"guideword" TEXT',
        '"parameter" TEXT',
        '"malfunction" TEXT',
        '"scene_id" TEXT NOT NULL',
        '"failure_count" INTEGER NOT NULL',
        '"relevant" INTEGER NOT NULL',
        '"drop_reasons" TEXT NOT NULL',
    ]
    columns += [f"{_sql_ident('scene_' + d)} TEXT NOT NULL" for d in dims]
    lines.append("CREATE TABLE events (\n  " + ",\n  ".join(columns) + "\n);")
    lines.append(
        "CREATE TABLE assessments (\n"
        '  "seq" INTEGER PRIMARY KEY,\n'
        '  "event_id" TEXT NOT NULL REFERENCES events("id"),\n'
        '  "status" TEXT NOT NULL,\n'
        '  "rationale" TEXT NOT NULL,\n'
        '  "assessor" TEXT NOT NULL\n'
        ");"
    )
    for event in run.events:
        m = event.malfunction
        values = [
            _sql_str(event.id),
            _sql_str(event.mode),
            _sql_str(m.id if m else None),
            _sql_str(m.skill if m else None),
            _sql_str(m.guideword.text if m else None),
            _sql_str(m.parameter if m else None),
            _sql_str(m.description if m else None),
            _sql_str(event.scene.id),
            str(event.failure_count),
            "1" if event.relevant else "0",
            _sql_str(";".join(event.drop_reasons)),
        ]
        values += [_sql_str(event.scene.value_of(d)) for d in dims]
        lines.append(f"INSERT INTO events VALUES ({', '.join(values)});")
    for assessment in run.assessment_log():
        values = [
            str(assessment.seq),
            _sql_str(assessment.event_id),
            _sql_str(assessment.status.value),
            _sql_str(assessment.rationale),
            _sql_str(assessment.assessor),
        ]
        lines.append(f"INSERT INTO assessments VALUES ({', '.join(values)});")
    return "\n".join(lines) + "\n"


def iter_event_records(run: OpenRun) -> Iterator[dict[str, Any]]:
    for event in run.events:
        yield event_to_record(event)
