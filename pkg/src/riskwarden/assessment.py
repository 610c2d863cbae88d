"""Register-level mathematics: class sums, the integral vulnerability
indicator, mitigation priorities, what-if analysis and the nine-stage
assessment cycle.

The register decomposes as R = R_v + R_c (probable-class plus
existing-class sums over significant risks) and aggregates into the
integral indicator E_p, the product of all significant risk scores.
Note the deliberate empty-register convention E_p = 0 (not the algebraic
empty product 1): values near 1 read as maximal vulnerability, so an
empty register must not look maximally vulnerable.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional

from . import dynamics as dyn
from . import scoring
from .core import (
    AdmissibilityDegree,
    Driver,
    Dynamics,
    ObservationKind,
    Origin,
    Presence,
    ProbabilityBand,
    RiskRecord,
    is_significant,
    resolve_dynamics,
    resolve_strategy,
)
from .errors import EmptyTaxonomy, StageError, UnknownRisk

DEFAULT_EP_ALERT_THRESHOLD = 0.8


@dataclass(frozen=True)
class Crossing:
    threshold: float
    label: str  # "critical_value" or "catastrophic"
    at_t: float


@dataclass(frozen=True)
class RiskEntry:
    """Per-risk line of an assessment report."""

    id: str
    name: str
    sphere: str
    origin: Origin
    presence: Presence
    dynamics: Dynamics
    band: ProbabilityBand
    zone: scoring.Zone
    admissibility: AdmissibilityDegree
    score: float
    critical_value: float
    crossings: tuple[Crossing, ...]


@dataclass(frozen=True)
class Alert:
    risk_id: Optional[str]
    kind: str
    message: str


@dataclass(frozen=True)
class AssessmentReport:
    r_v: float
    r_c: float
    r_total: float
    e_p: float
    entries: tuple[RiskEntry, ...]
    priorities: tuple[str, ...]
    alerts: tuple[Alert, ...]
    strategic_review: tuple[str, ...]


@dataclass(frozen=True)
class Intervention:
    """One what-if step: set a new driver value or remove the risk."""

    risk_id: str
    new_driver: Optional[float] = None
    remove: bool = False


@dataclass(frozen=True)
class WhatIfScenario:
    interventions: tuple[Intervention, ...]
    label: str = ""


def _assessable(risks: Iterable[RiskRecord]) -> list[RiskRecord]:
    return [r for r in risks if r.is_active]


def class_sums(risks: Iterable[RiskRecord]) -> tuple[float, float, float]:
    """(R_v, R_c, R): significant probable and existing score sums."""
    r_v = 0.0
    r_c = 0.0
    for risk in _assessable(risks):
        if not is_significant(risk.score):
            continue
        if risk.presence is Presence.PROBABLE:
            r_v += risk.score
        else:
            r_c += risk.score
    return r_v, r_c, r_v + r_c


def integral_indicator(risks: Iterable[RiskRecord]) -> float:
    """Product of all significant active scores; 0 when none exist."""
    factors = [r.score for r in _assessable(risks) if is_significant(r.score)]
    if not factors:
        return 0.0
    e_p = 1.0
    for x in factors:
        e_p *= x
    return e_p


def _priority_class(risk: RiskRecord) -> int:
    growing = resolve_dynamics(risk.dynamics) is Dynamics.GROWING
    if risk.presence is Presence.EXISTING:
        return 1 if growing else 4
    if growing:
        return 2 if risk.band in (ProbabilityBand.MEDIUM, ProbabilityBand.HIGH) else 3
    return 5


def prioritize(risks: Iterable[RiskRecord]) -> list[str]:
    """Mitigation order: existing growing first, then probable growing with
    medium/high band, then the remaining classes; ties by score descending
    then id."""
    eligible = [r for r in _assessable(risks) if is_significant(r.score)]
    eligible.sort(key=lambda r: (_priority_class(r), -r.score, r.id))
    return [r.id for r in eligible]


def _entry(risk: RiskRecord, horizon_periods: Optional[float]) -> RiskEntry:
    row = resolve_strategy(risk.origin, risk.presence, risk.dynamics)
    crossings: list[Crossing] = []
    fit = dyn.score_trend(risk)
    if fit is not None:
        for threshold, label in ((row.critical_value, "critical_value"),
                                 (scoring.CATASTROPHIC_THRESHOLD, "catastrophic")):
            t_star = dyn.forecast_crossing(fit, threshold)
            if t_star is None:
                continue
            if horizon_periods is not None and t_star > fit.t_last + horizon_periods:
                continue
            crossings.append(Crossing(threshold, label, t_star))
    return RiskEntry(
        id=risk.id, name=risk.name, sphere=risk.sphere, origin=risk.origin,
        presence=risk.presence, dynamics=risk.dynamics, band=risk.band,
        zone=scoring.classify_zone(risk.presence, risk.score),
        admissibility=risk.admissibility, score=risk.score,
        critical_value=row.critical_value, crossings=tuple(crossings),
    )


def assess(
    risks: Iterable[RiskRecord],
    *,
    horizon_periods: Optional[float] = None,
    ep_alert_threshold: float = DEFAULT_EP_ALERT_THRESHOLD,
) -> AssessmentReport:
    """Full register assessment: sums, indicator, priorities, alerts and the
    strategic-review list (external critical/catastrophic risks)."""
    active = _assessable(risks)
    r_v, r_c, r_total = class_sums(active)
    e_p = integral_indicator(active)
    entries = tuple(_entry(r, horizon_periods) for r in active)

    alerts: list[Alert] = []
    for entry in entries:
        for crossing in entry.crossings:
            alerts.append(Alert(
                entry.id, f"approaching_{crossing.label}",
                f"risk {entry.id} forecast to reach {crossing.threshold:g} "
                f"at period {crossing.at_t:.3f}",
            ))
    if e_p >= ep_alert_threshold:
        alerts.append(Alert(
            None, "high_vulnerability",
            f"integral indicator {e_p:.6f} at or above threshold {ep_alert_threshold:g}",
        ))

    strategic_review = tuple(
        e.id for e in entries
        if e.origin is Origin.EXTERNAL
        and e.admissibility in (AdmissibilityDegree.CRITICAL,
                                AdmissibilityDegree.CATASTROPHIC)
    )
    return AssessmentReport(
        r_v=r_v, r_c=r_c, r_total=r_total, e_p=e_p, entries=entries,
        priorities=tuple(prioritize(active)), alerts=tuple(alerts),
        strategic_review=strategic_review,
    )


def apply_scenario(risks: Iterable[RiskRecord],
                   scenario: WhatIfScenario) -> list[RiskRecord]:
    """Apply interventions to copies of the risks; inputs are untouched."""
    by_id = {r.id: r for r in risks}
    for step in scenario.interventions:
        if step.risk_id not in by_id:
            raise UnknownRisk(f"unknown risk id {step.risk_id!r}")
        if step.remove:
            del by_id[step.risk_id]
            continue
        if step.new_driver is None:
            continue
        risk = by_id[step.risk_id]
        if risk.driver.kind is ObservationKind.PROBABILITY:
            new_score = scoring.score_probable(step.new_driver, risk.dynamics)
        else:
            new_score = scoring.score_existing(step.new_driver)
        by_id[step.risk_id] = dataclasses.replace(
            risk,
            driver=Driver(risk.driver.kind, step.new_driver),
            score=new_score,
        )
    return list(by_id.values())


def what_if(
    risks: Iterable[RiskRecord],
    scenario: WhatIfScenario,
    *,
    horizon_periods: Optional[float] = None,
    ep_alert_threshold: float = DEFAULT_EP_ALERT_THRESHOLD,
) -> AssessmentReport:
    """Assessment of a hypothetical register; never mutates the input."""
    adjusted = apply_scenario(list(risks), scenario)
    return assess(adjusted, horizon_periods=horizon_periods,
                  ep_alert_threshold=ep_alert_threshold)


# --- Nine-stage assessment cycle -------------------------------------------

STAGE_NAMES = (
    "horizon selection",
    "sphere grouping",
    "risk identification",
    "qualitative base and sphere trends",
    "magnitude and vector per risk",
    "probability and admissibility table",
    "dynamics, interdependency and ratings",
    "mitigation plan",
    "monitoring checklist",
)


@dataclass(frozen=True)
class StageResult:
    index: int
    name: str
    complete: bool
    timestamp: str
    output: object


@dataclass(frozen=True)
class CycleConfig:
    stage_label: str
    periods: float
    taxonomy: tuple[str, ...]
    ep_alert_threshold: float = DEFAULT_EP_ALERT_THRESHOLD


@dataclass(frozen=True)
class CycleReport:
    stages: tuple[StageResult, ...]

    @property
    def complete(self) -> bool:
        return all(s.complete for s in self.stages)


def run_cycle(risks: Iterable[RiskRecord], config: CycleConfig) -> CycleReport:
    """Execute the nine assessment stages in order over the register."""
    if not config.taxonomy:
        raise EmptyTaxonomy("cycle config must name at least one sphere")
    if config.periods < 1:
        raise StageError(1, f"horizon must cover >= 1 period, got {config.periods}")

    active = _assessable(risks)
    now = datetime.now(timezone.utc).isoformat()
    stages: list[StageResult] = []

    def done(index: int, output: object) -> None:
        stages.append(StageResult(index, STAGE_NAMES[index - 1], True, now, output))

    done(1, {"stage": config.stage_label, "periods": config.periods})

    by_sphere: dict[str, list[str]] = {label: [] for label in config.taxonomy}
    for risk in active:
        by_sphere.setdefault(risk.sphere, []).append(risk.id)
    done(2, by_sphere)

    done(3, [r.id for r in active])

    sphere_trends: dict[str, Optional[float]] = {}
    for sphere, ids in by_sphere.items():
        slopes = []
        for risk_id in ids:
            risk = next(r for r in active if r.id == risk_id)
            fit = dyn.score_trend(risk)
            if fit is not None:
                slopes.append(fit.slope)
        sphere_trends[sphere] = sum(slopes) / len(slopes) if slopes else None
    done(4, sphere_trends)

    done(5, {r.id: {"magnitude": r.score, "vector": r.dynamics.value} for r in active})

    done(6, {
        r.id: {
            "band": r.band.value,
            "driver": {"kind": r.driver.kind.value, "value": r.driver.value},
            "admissibility": r.admissibility.value,
        }
        for r in active
    })

    done(7, {
        r.id: {
            "dynamics": r.dynamics.value,
            "depends_on": list(r.dependencies),
            "priority_class": _priority_class(r),
        }
        for r in active
    })

    ordered = prioritize(active)
    by_id = {r.id: r for r in active}
    plan = [
        risk_id for risk_id in ordered
        if by_id[risk_id].presence is Presence.EXISTING
        and resolve_dynamics(by_id[risk_id].dynamics) is Dynamics.GROWING
    ]
    done(8, plan)

    report = assess(active, horizon_periods=config.periods,
                    ep_alert_threshold=config.ep_alert_threshold)
    watchlist = sorted({e.id for e in report.entries if e.crossings})
    done(9, watchlist)

    return CycleReport(stages=tuple(stages))
