"""Durable storage for the risk register.

One register is one JSON document plus a sibling append-only event log
(one JSON object per line). All writes go through an atomic
write-temp-then-rename so a crash mid-save never corrupts the previous
file. Mutations are expected to come from a single writer; readers work
on loaded snapshots.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import time
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Callable, Iterable, Optional

from . import dynamics as dyn
from .core import (
    AdmissibilityDegree,
    Driver,
    Dynamics,
    Observation,
    ObservationKind,
    Origin,
    Presence,
    ProbabilityBand,
    RiskRecord,
    RiskStatus,
)
from .errors import (
    DanglingDependency,
    DuplicateId,
    InvalidHorizon,
    MalformedTable,
    ParseError,
    PathExists,
    RiskwardenError,
    SchemaVersionMismatch,
    UnknownRisk,
)

SCHEMA_VERSION = 1
DEFAULT_PERIOD_DAYS = 30

# Test hook: called between writing the temp file and renaming it over the
# target. Raising here simulates a crash mid-save.
_pre_rename_hook: Optional[Callable[[str], None]] = None


@dataclass(frozen=True)
class Horizon:
    stage: str
    periods: int
    period_days: int = DEFAULT_PERIOD_DAYS


@dataclass
class Register:
    version: int
    created_at: str
    horizon: Horizon
    period_epoch: str  # ISO date anchoring t = 0
    taxonomy: list[str]
    risks: dict[str, RiskRecord]
    path: Optional[str] = field(default=None, compare=False)

    def events_path(self) -> str:
        if self.path is None:
            raise RiskwardenError("register has no backing path")
        return self.path + ".events"

    def to_period(self, day: date) -> float:
        epoch = date.fromisoformat(self.period_epoch)
        return (day - epoch).days / self.horizon.period_days


# --- serialization ----------------------------------------------------------

def _risk_to_dict(risk: RiskRecord) -> dict:
    return {
        "id": risk.id,
        "name": risk.name,
        "sphere": risk.sphere,
        "origin": risk.origin.value,
        "presence": risk.presence.value,
        "dynamics": risk.dynamics.value,
        "band": risk.band.value,
        "score": risk.score,
        "driver": {"kind": risk.driver.kind.value, "value": risk.driver.value},
        "status": risk.status.value,
        "dependencies": list(risk.dependencies),
        "history": [
            {"t": o.t, "kind": o.kind.value, "value": o.value, "note": o.note}
            for o in risk.history
        ],
        "admissibility": risk.admissibility.value,
    }


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r} in {where}")
    return obj[key]


def _risk_from_dict(obj: dict) -> RiskRecord:
    try:
        risk_id = _require(obj, "id", "risk")
        where = f"risk {risk_id!r}"
        driver_obj = _require(obj, "driver", where)
        return RiskRecord(
            id=risk_id,
            name=_require(obj, "name", where),
            sphere=_require(obj, "sphere", where),
            origin=Origin(_require(obj, "origin", where)),
            presence=Presence(_require(obj, "presence", where)),
            dynamics=Dynamics(_require(obj, "dynamics", where)),
            band=ProbabilityBand(_require(obj, "band", where)),
            score=float(_require(obj, "score", where)),
            driver=Driver(ObservationKind(driver_obj["kind"]), float(driver_obj["value"])),
            status=RiskStatus(_require(obj, "status", where)),
            dependencies=tuple(_require(obj, "dependencies", where)),
            history=tuple(
                Observation(t=float(h["t"]), kind=ObservationKind(h["kind"]),
                            value=float(h["value"]), note=h.get("note"))
                for h in _require(obj, "history", where)
            ),
            admissibility=AdmissibilityDegree(obj.get("admissibility", "admissible")),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed risk entry: {exc}") from exc


def register_to_dict(register: Register) -> dict:
    return {
        "version": register.version,
        "created_at": register.created_at,
        "horizon": {
            "stage": register.horizon.stage,
            "periods": register.horizon.periods,
            "period_days": register.horizon.period_days,
        },
        "period_epoch": register.period_epoch,
        "taxonomy": list(register.taxonomy),
        "risks": [_risk_to_dict(r) for r in register.risks.values()],
    }


def register_from_dict(obj: dict, path: Optional[str] = None) -> Register:
    version = _require(obj, "version", "register")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"register schema version {version} unsupported (expected {SCHEMA_VERSION})"
        )
    try:
        horizon_obj = _require(obj, "horizon", "register")
        horizon = Horizon(
            stage=horizon_obj["stage"],
            periods=int(horizon_obj["periods"]),
            period_days=int(horizon_obj.get("period_days", DEFAULT_PERIOD_DAYS)),
        )
        risks = {}
        for risk_obj in _require(obj, "risks", "register"):
            risk = _risk_from_dict(risk_obj)
            risks[risk.id] = risk
        return Register(
            version=version,
            created_at=_require(obj, "created_at", "register"),
            horizon=horizon,
            period_epoch=_require(obj, "period_epoch", "register"),
            taxonomy=list(_require(obj, "taxonomy", "register")),
            risks=risks,
            path=path,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed register document: {exc}") from exc


# --- persistence ------------------------------------------------------------

def _atomic_write(path: str, payload: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fp:
        fp.write(payload)
        fp.flush()
        os.fsync(fp.fileno())
    if _pre_rename_hook is not None:
        _pre_rename_hook(path)
    os.replace(tmp, path)


def save_register(register: Register, path: Optional[str] = None) -> None:
    target = path or register.path
    if target is None:
        raise RiskwardenError("no path given for save")
    _atomic_write(target, json.dumps(register_to_dict(register), indent=2))
    register.path = target


def load_register(path: str) -> Register:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            obj = json.load(fp)
    except FileNotFoundError:
        raise ParseError(f"register file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"register file {path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"register file {path}: top level must be an object")
    return register_from_dict(obj, path=path)


def create_register(path: str, horizon: Horizon, taxonomy: Iterable[str],
                    period_epoch: Optional[str] = None) -> Register:
    if os.path.exists(path):
        raise PathExists(f"register file already exists: {path}")
    if horizon.periods < 1:
        raise InvalidHorizon(f"horizon must cover >= 1 period, got {horizon.periods}")
    register = Register(
        version=SCHEMA_VERSION,
        created_at=datetime.now(timezone.utc).isoformat(),
        horizon=horizon,
        period_epoch=period_epoch or date.today().isoformat(),
        taxonomy=list(taxonomy),
        risks={},
        path=path,
    )
    save_register(register, path)
    open(register.events_path(), "a", encoding="utf-8").close()
    return register


# --- event log --------------------------------------------------------------

def _snapshot_dict(snap: Optional[dyn.RiskSnapshot]) -> Optional[dict]:
    if snap is None:
        return None
    return {
        "presence": snap.presence.value,
        "band": snap.band.value,
        "admissibility": snap.admissibility.value,
        "score": snap.score,
    }


def _append_event(register: Register, t: float, risk_id: str, kind: str,
                  before: Optional[dyn.RiskSnapshot],
                  after: Optional[dyn.RiskSnapshot]) -> None:
    entry = {
        "t": t,
        "wall_time": datetime.now(timezone.utc).isoformat(),
        "risk_id": risk_id,
        "kind": kind,
        "before": _snapshot_dict(before),
        "after": _snapshot_dict(after),
    }
    with open(register.events_path(), "a", encoding="utf-8") as fp:
        fp.write(json.dumps(entry) + "\n")


def read_events(register: Register, since: Optional[float] = None) -> list[dict]:
    events = []
    try:
        with open(register.events_path(), "r", encoding="utf-8") as fp:
            for line in fp:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                if since is None or entry["t"] >= since:
                    events.append(entry)
    except FileNotFoundError:
        pass
    return events


# --- mutations ---------------------------------------------------------------

def add_risk(register: Register, risk: RiskRecord) -> None:
    if risk.id in register.risks:
        raise DuplicateId(f"risk id {risk.id!r} already registered")
    for dep in risk.dependencies:
        if dep not in register.risks:
            raise DanglingDependency(f"risk {risk.id!r} depends on unknown id {dep!r}")
    risk.validate()
    register.risks[risk.id] = risk
    last_t = risk.history[-1].t if risk.history else 0.0
    _append_event(register, last_t, risk.id, "risk_added", None,
                  dyn.RiskSnapshot.of(risk))
    save_register(register)


def get_risk(register: Register, risk_id: str) -> RiskRecord:
    if risk_id not in register.risks:
        raise UnknownRisk(f"unknown risk id {risk_id!r}")
    return register.risks[risk_id]


def list_risks(register: Register, active_only: bool = False) -> list[RiskRecord]:
    risks = list(register.risks.values())
    if active_only:
        risks = [r for r in risks if r.is_active]
    return risks


def update_risk_metadata(register: Register, risk_id: str, *,
                         name: Optional[str] = None,
                         sphere: Optional[str] = None,
                         dependencies: Optional[Iterable[str]] = None) -> RiskRecord:
    risk = get_risk(register, risk_id)
    changes = {}
    if name is not None:
        changes["name"] = name
    if sphere is not None:
        changes["sphere"] = sphere
    if dependencies is not None:
        deps = tuple(dependencies)
        for dep in deps:
            if dep == risk_id or dep not in register.risks:
                raise DanglingDependency(f"invalid dependency {dep!r} for {risk_id!r}")
        changes["dependencies"] = deps
    updated = dataclasses.replace(risk, **changes)
    register.risks[risk_id] = updated
    last_t = updated.history[-1].t if updated.history else 0.0
    _append_event(register, last_t, risk_id, "metadata_updated",
                  dyn.RiskSnapshot.of(risk), dyn.RiskSnapshot.of(updated))
    save_register(register)
    return updated


def retire_risk(register: Register, risk_id: str) -> RiskRecord:
    risk = get_risk(register, risk_id)
    if not risk.is_active:
        raise UnknownRisk(f"risk {risk_id!r} is already retired")
    updated = dataclasses.replace(risk, status=RiskStatus.RETIRED)
    register.risks[risk_id] = updated
    last_t = risk.history[-1].t if risk.history else 0.0
    _append_event(register, last_t, risk_id, "risk_retired",
                  dyn.RiskSnapshot.of(risk), dyn.RiskSnapshot.of(updated))
    save_register(register)
    return updated


def record_observation(
    register: Register,
    risk_id: str,
    obs: Observation,
    *,
    materialized: bool = False,
    declare_catastrophic: bool = False,
) -> list[dyn.TransitionEvent]:
    risk = get_risk(register, risk_id)
    if not risk.is_active:
        raise UnknownRisk(f"risk {risk_id!r} is retired")
    updated, events = dyn.apply_observation(
        risk, obs, materialized=materialized,
        declare_catastrophic=declare_catastrophic,
    )
    register.risks[risk_id] = updated
    _append_event(register, obs.t, risk_id, "observation_recorded",
                  dyn.RiskSnapshot.of(risk), dyn.RiskSnapshot.of(updated))
    for event in events:
        _append_event(register, event.t, risk_id, event.kind.value,
                      event.before, event.after)
    save_register(register)
    return events


@dataclass(frozen=True)
class RejectedRow:
    row: int
    reason: str


IMPORT_COLUMNS = ("risk_id", "t", "kind", "value", "note")


def import_observations(register: Register, table: str) -> tuple[int, list[RejectedRow]]:
    """Bulk-ingest a CSV of observations; returns (accepted, rejects).

    Rows apply in (risk_id, t) order. Structural problems raise
    MalformedTable; per-row failures land in the rejects list.
    """
    reader = csv.reader(io.StringIO(table))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedTable("empty observation table")
    header = [h.strip() for h in header]
    if header[: len(IMPORT_COLUMNS) - 1] != list(IMPORT_COLUMNS[:-1]):
        raise MalformedTable(
            f"header must start with {','.join(IMPORT_COLUMNS[:-1])}, got {','.join(header)}"
        )

    rows = []
    for line_no, raw in enumerate(reader, start=2):
        if not raw or all(not cell.strip() for cell in raw):
            continue
        rows.append((line_no, raw))

    parsed = []
    rejects: list[RejectedRow] = []
    for line_no, raw in rows:
        try:
            risk_id = raw[0].strip()
            t = float(raw[1])
            kind = ObservationKind(raw[2].strip().lower())
            value = float(raw[3])
            note = raw[4].strip() if len(raw) > 4 and raw[4].strip() else None
            parsed.append((line_no, risk_id, t, kind, value, note))
        except (IndexError, ValueError) as exc:
            rejects.append(RejectedRow(line_no, f"malformed row: {exc}"))

    parsed.sort(key=lambda row: (row[1], row[2]))
    accepted = 0
    for line_no, risk_id, t, kind, value, note in parsed:
        try:
            obs = Observation(t=t, kind=kind, value=value, note=note)
            record_observation(register, risk_id, obs)
            accepted += 1
        except RiskwardenError as exc:
            rejects.append(RejectedRow(line_no, f"{type(exc).__name__}: {exc.message}"))
    rejects.sort(key=lambda r: r.row)
    return accepted, rejects
