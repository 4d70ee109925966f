"""Deployment KPI tracking: alerts, analyst decisions, outcomes.

The event log is append-only and replayable from newline-delimited JSON.
Three KPIs are computed over half-open time windows [start, end):

1. total turbine downtime hours,
2. brakepad failures versus in-person investigations,
3. the share of alerts that were followed up.

A report compares an evaluation window against historic baseline windows of
identical length, since raw KPI values mean little without a reference.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass

from .errors import ConflictError, NotFoundError, SchemaError


@dataclass(frozen=True)
class Window:
    start: int
    end: int

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"window start {self.start} must precede end {self.end}")

    @property
    def duration(self) -> int:
        return self.end - self.start

    def contains(self, time: int) -> bool:
        return self.start <= time < self.end


@dataclass(frozen=True)
class Alert:
    alert_id: str
    entity_id: str
    time: int
    score: float


@dataclass(frozen=True)
class Decision:
    alert_id: str
    investigated: bool
    time: int


@dataclass(frozen=True)
class Outcome:
    entity_id: str
    time: int
    failed: bool
    downtime_hours: float

    def __post_init__(self):
        if self.downtime_hours < 0:
            raise ValueError(f"downtime_hours must be >= 0, got {self.downtime_hours}")


Event = Alert | Decision | Outcome


class EventLog:
    """Append-only event sequence; appends serialized, reads see snapshots."""

    def __init__(self, events=()):
        self._lock = threading.Lock()
        self._events: tuple[Event, ...] = ()
        self._alert_ids: set[str] = set()
        for event in events:
            self.record(event)

    def record(self, event: Event) -> None:
        with self._lock:
            if isinstance(event, Alert):
                if event.alert_id in self._alert_ids:
                    raise ConflictError(f"duplicate alert_id {event.alert_id!r}")
                self._alert_ids.add(event.alert_id)
            elif isinstance(event, Decision):
                if event.alert_id not in self._alert_ids:
                    raise NotFoundError(
                        f"decision references unknown alert_id {event.alert_id!r}",
                        alert_id=event.alert_id,
                    )
            elif not isinstance(event, Outcome):
                raise SchemaError(f"not an event: {event!r}")
            self._events = self._events + (event,)

    def events(self) -> tuple[Event, ...]:
        return self._events

    def __len__(self):
        return len(self._events)


def record_event(log: EventLog, event: Event) -> EventLog:
    log.record(event)
    return log


def event_to_json(event: Event) -> str:
    if isinstance(event, Alert):
        body = {"kind": "alert", "alert_id": event.alert_id, "entity_id": event.entity_id,
                "time": event.time, "score": event.score}
    elif isinstance(event, Decision):
        body = {"kind": "decision", "alert_id": event.alert_id,
                "investigated": event.investigated, "time": event.time}
    else:
        body = {"kind": "outcome", "entity_id": event.entity_id, "time": event.time,
                "failed": event.failed, "downtime_hours": event.downtime_hours}
    return json.dumps(body)


def event_from_json(document: dict, where: str = "event") -> Event:
    if not isinstance(document, dict) or "kind" not in document:
        raise SchemaError(f"{where}: missing 'kind'")
    kind = document["kind"]
    shapes = {
        "alert": {"kind", "alert_id", "entity_id", "time", "score"},
        "decision": {"kind", "alert_id", "investigated", "time"},
        "outcome": {"kind", "entity_id", "time", "failed", "downtime_hours"},
    }
    if kind not in shapes:
        raise SchemaError(f"{where}: unknown kind {kind!r}")
    extra = set(document) - shapes[kind]
    missing = shapes[kind] - set(document)
    if extra:
        raise SchemaError(f"{where}: unknown field {sorted(extra)[0]!r}")
    if missing:
        raise SchemaError(f"{where}: missing field {sorted(missing)[0]!r}")
    try:
        if kind == "alert":
            return Alert(alert_id=str(document["alert_id"]), entity_id=str(document["entity_id"]),
                         time=int(document["time"]), score=float(document["score"]))
        if kind == "decision":
            if not isinstance(document["investigated"], bool):
                raise SchemaError(f"{where}: investigated must be boolean")
            return Decision(alert_id=str(document["alert_id"]),
                            investigated=document["investigated"], time=int(document["time"]))
        if not isinstance(document["failed"], bool):
            raise SchemaError(f"{where}: failed must be boolean")
        return Outcome(entity_id=str(document["entity_id"]), time=int(document["time"]),
                       failed=document["failed"], downtime_hours=float(document["downtime_hours"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_event_log(path) -> EventLog:
    log = EventLog()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                document = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"event log line {lineno}: invalid JSON: {exc}") from exc
            log.record(event_from_json(document, where=f"event log line {lineno}"))
    return log


def save_event_log(log: EventLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in log.events():
            fh.write(event_to_json(event) + "\n")


def kpi_total_downtime(log: EventLog, window: Window) -> float:
    """KPI 1: summed downtime hours of outcomes inside the window."""
    return float(sum(e.downtime_hours for e in log.events()
                     if isinstance(e, Outcome) and window.contains(e.time)))


def kpi_failures_vs_investigations(log: EventLog, window: Window) -> tuple[int, int]:
    """KPI 2: (failures, in-person investigations) inside the window."""
    failures = sum(1 for e in log.events()
                   if isinstance(e, Outcome) and e.failed and window.contains(e.time))
    investigations = sum(1 for e in log.events()
                         if isinstance(e, Decision) and e.investigated and window.contains(e.time))
    return failures, investigations


def kpi_alert_followup_rate(log: EventLog, window: Window) -> float | None:
    """KPI 3: share of in-window alerts that were investigated.

    An alert belongs to the window of its own timestamp; the follow-up
    decision may land later. No alerts means the rate is undefined (None),
    which is not the same thing as zero follow-up.
    """
    alerts = [e.alert_id for e in log.events()
              if isinstance(e, Alert) and window.contains(e.time)]
    if not alerts:
        return None
    investigated = {e.alert_id for e in log.events()
                    if isinstance(e, Decision) and e.investigated}
    return sum(1 for a in alerts if a in investigated) / len(alerts)


@dataclass(frozen=True)
class KpiValues:
    window: Window
    kpi1_total_downtime_hours: float
    kpi2_failures: int
    kpi2_investigations: int
    kpi3_alert_followup_rate: float | None


@dataclass(frozen=True)
class KpiDeltas:
    kpi1_total_downtime_hours: float | None
    kpi2_failures: float | None
    kpi2_investigations: float | None
    kpi3_alert_followup_rate: float | None


@dataclass(frozen=True)
class KpiReport:
    evaluation: KpiValues
    baselines: tuple[KpiValues, ...]
    deltas: KpiDeltas


def _window_values(log: EventLog, window: Window) -> KpiValues:
    failures, investigations = kpi_failures_vs_investigations(log, window)
    return KpiValues(
        window=window,
        kpi1_total_downtime_hours=kpi_total_downtime(log, window),
        kpi2_failures=failures,
        kpi2_investigations=investigations,
        kpi3_alert_followup_rate=kpi_alert_followup_rate(log, window),
    )


def baseline_report(log: EventLog, eval_window: Window, historic_windows) -> KpiReport:
    """KPIs for the evaluation window against same-length historic windows.

    Deltas are evaluation minus the arithmetic mean over baselines; undefined
    follow-up rates drop out of the mean, and a delta is None whenever either
    side is undefined.
    """
    baselines = []
    for window in historic_windows:
        if window.duration != eval_window.duration:
            raise ValueError(
                f"baseline window ({window.start}, {window.end}) has duration "
                f"{window.duration}, evaluation window has {eval_window.duration}"
            )
        baselines.append(_window_values(log, window))
    evaluation = _window_values(log, eval_window)

    def mean(values):
        values = list(values)
        return math.fsum(values) / len(values) if values else None

    mean_downtime = mean(b.kpi1_total_downtime_hours for b in baselines)
    mean_failures = mean(b.kpi2_failures for b in baselines)
    mean_investigations = mean(b.kpi2_investigations for b in baselines)
    defined_rates = [b.kpi3_alert_followup_rate for b in baselines
                     if b.kpi3_alert_followup_rate is not None]
    mean_rate = mean(defined_rates)

    eval_rate = evaluation.kpi3_alert_followup_rate
    deltas = KpiDeltas(
        kpi1_total_downtime_hours=(None if mean_downtime is None
                                   else evaluation.kpi1_total_downtime_hours - mean_downtime),
        kpi2_failures=None if mean_failures is None else evaluation.kpi2_failures - mean_failures,
        kpi2_investigations=(None if mean_investigations is None
                             else evaluation.kpi2_investigations - mean_investigations),
        kpi3_alert_followup_rate=(None if eval_rate is None or mean_rate is None
                                  else eval_rate - mean_rate),
    )
    return KpiReport(evaluation=evaluation, baselines=tuple(baselines), deltas=deltas)


def _values_to_dict(values: KpiValues) -> dict:
    return {
        "window": {"start": values.window.start, "end": values.window.end},
        "kpi1_total_downtime_hours": values.kpi1_total_downtime_hours,
        "kpi2": {"failures": values.kpi2_failures, "investigations": values.kpi2_investigations},
        "kpi3_alert_followup_rate": values.kpi3_alert_followup_rate,
    }


def report_to_dict(report: KpiReport) -> dict:
    body = _values_to_dict(report.evaluation)
    body["baselines"] = [_values_to_dict(b) for b in report.baselines]
    body["deltas"] = {
        "kpi1_total_downtime_hours": report.deltas.kpi1_total_downtime_hours,
        "kpi2_failures": report.deltas.kpi2_failures,
        "kpi2_investigations": report.deltas.kpi2_investigations,
        "kpi3_alert_followup_rate": report.deltas.kpi3_alert_followup_rate,
    }
    return body
