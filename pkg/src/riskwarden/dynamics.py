"""Trend fitting, dynamics classification, threshold forecasting and the
lifecycle transition rules applied on every new observation.

The trend estimator is ordinary least squares over (period, score) pairs.
Dynamics classification uses a small deadband around zero slope; slopes
inside it are Stable, which resolves to Growing for all strategy lookups.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import scoring
from .core import (
    AdmissibilityDegree,
    Driver,
    Dynamics,
    Observation,
    ObservationKind,
    Presence,
    ProbabilityBand,
    RiskRecord,
    RiskStatus,
    band_rank,
    classify_admissibility,
    classify_band,
    resolve_strategy,
)
from .errors import (
    BackwardForecast,
    DegenerateTime,
    InsufficientHistory,
    KindMismatch,
    NonMonotoneTime,
)

# Slopes with |b| <= epsilon classify as Stable.
DEFAULT_EPSILON = 0.005


@dataclass(frozen=True)
class TrendFit:
    """Least-squares line x = intercept + slope * t over a score history."""

    slope: float
    intercept: float
    n: int
    t_last: float
    x_last: float


class TransitionKind(Enum):
    BAND_ESCALATION = "band_escalation"
    PROBABLE_TO_EXISTING = "probable_to_existing"
    EXISTING_TO_CATASTROPHIC = "existing_to_catastrophic"
    DEESCALATION_TO_PROBABLE = "deescalation_to_probable"
    BECAME_INSIGNIFICANT = "became_insignificant"


@dataclass(frozen=True)
class RiskSnapshot:
    presence: Presence
    band: ProbabilityBand
    admissibility: AdmissibilityDegree
    score: float

    @staticmethod
    def of(risk: RiskRecord) -> "RiskSnapshot":
        return RiskSnapshot(risk.presence, risk.band, risk.admissibility, risk.score)


@dataclass(frozen=True)
class TransitionEvent:
    risk_id: str
    t: float
    kind: TransitionKind
    before: RiskSnapshot
    after: RiskSnapshot


def fit_trend(history: list[tuple[float, float]]) -> TrendFit:
    """Closed-form OLS fit of (t, x) pairs."""
    if len(history) < 2:
        raise InsufficientHistory(f"trend fit needs >= 2 points, got {len(history)}")
    ts = [t for t, _ in history]
    xs = [x for _, x in history]
    n = len(ts)
    t_mean = sum(ts) / n
    x_mean = sum(xs) / n
    stt = sum((t - t_mean) ** 2 for t in ts)
    if stt == 0.0:
        raise DegenerateTime("all observation times are identical")
    stx = sum((t - t_mean) * (x - x_mean) for t, x in history)
    slope = stx / stt
    intercept = x_mean - slope * t_mean
    return TrendFit(slope=slope, intercept=intercept, n=n, t_last=ts[-1], x_last=xs[-1])


def classify_dynamics(fit: TrendFit, epsilon: float = DEFAULT_EPSILON) -> Dynamics:
    if fit.slope > epsilon:
        return Dynamics.GROWING
    if fit.slope < -epsilon:
        return Dynamics.DECLINING
    return Dynamics.STABLE


def forecast_score(fit: TrendFit, t: float) -> float:
    """Evaluate the trend line at a future period, clamped below at 0."""
    if t < fit.t_last:
        raise BackwardForecast(f"forecast time {t} precedes last observation {fit.t_last}")
    return max(0.0, fit.intercept + fit.slope * t)


def forecast_crossing(fit: TrendFit, threshold: float) -> Optional[float]:
    """Earliest period at which the trend line reaches ``threshold``.

    None when the line never crosses upward; t_last when already at or
    beyond the threshold.
    """
    if fit.x_last >= threshold:
        return fit.t_last
    if fit.slope > 0.0:
        # Solve on the fitted line so forecast_score(t*) == threshold;
        # floored at t_last when the line already sits above it.
        return max(fit.t_last, (threshold - fit.intercept) / fit.slope)
    return None


def _canonical_score(obs: Observation) -> float:
    # Monotone-increasing image of the driver, so the slope sign tracks the
    # driver trend regardless of the branch the stored score uses.
    if obs.kind is ObservationKind.PROBABILITY:
        return scoring.score_probable(obs.value, Dynamics.GROWING)
    return scoring.score_existing(obs.value)


def _branch_score(obs: Observation, dynamics: Dynamics) -> float:
    if obs.kind is ObservationKind.PROBABILITY:
        return scoring.score_probable(obs.value, dynamics)
    return scoring.score_existing(obs.value)


def _kind_series(history: tuple[Observation, ...], kind: ObservationKind,
                 dynamics: Dynamics, canonical: bool) -> list[tuple[float, float]]:
    return [
        (obs.t, _canonical_score(obs) if canonical else _branch_score(obs, dynamics))
        for obs in history
        if obs.kind is kind
    ]


def score_trend(risk: RiskRecord) -> Optional[TrendFit]:
    """OLS fit of the risk's stored-score series (current branch), or None
    when fewer than two same-kind observations exist."""
    kind = (ObservationKind.PROBABILITY if risk.presence is Presence.PROBABLE
            else ObservationKind.SEVERITY)
    series = _kind_series(risk.history, kind, risk.dynamics, canonical=False)
    if len(series) < 2:
        return None
    return fit_trend(series)


def _classify_from_history(history: tuple[Observation, ...], kind: ObservationKind,
                           fallback: Dynamics, epsilon: float) -> Dynamics:
    series = _kind_series(history, kind, Dynamics.GROWING, canonical=True)
    if len(series) < 2:
        return fallback
    return classify_dynamics(fit_trend(series), epsilon)


def _decline_confirmed(history: tuple[Observation, ...], epsilon: float) -> bool:
    # De-escalation needs two consecutive observations whose declining trend
    # forecasts the next-period score below the existing-band floor 0.5
    # (hysteresis against flapping at the 0.49 sentinel).
    def below_floor(hist: tuple[Observation, ...]) -> bool:
        series = _kind_series(hist, ObservationKind.SEVERITY, Dynamics.DECLINING,
                              canonical=False)
        if len(series) < 2:
            return False
        fit = fit_trend(series)
        if classify_dynamics(fit, epsilon) is not Dynamics.DECLINING:
            return False
        return forecast_score(fit, fit.t_last + 1.0) < scoring.EXISTING_FLOOR

    return below_floor(history) and below_floor(history[:-1])


def apply_observation(
    risk: RiskRecord,
    obs: Observation,
    *,
    materialized: bool = False,
    declare_catastrophic: bool = False,
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[RiskRecord, list[TransitionEvent]]:
    """Ingest one observation and return the updated risk plus any emitted
    lifecycle transition events.

    ``materialized`` forces a probable risk over to existing; severities
    with ``declare_catastrophic`` push an existing risk into the
    catastrophic zone (the severity mapping itself caps at 0.99).
    """
    expected = (ObservationKind.PROBABILITY if risk.presence is Presence.PROBABLE
                else ObservationKind.SEVERITY)
    if obs.kind is not expected:
        raise KindMismatch(
            f"risk {risk.id!r} is {risk.presence.value}, expected a "
            f"{expected.value} observation, got {obs.kind.value}"
        )
    if risk.history and obs.t <= risk.history[-1].t:
        raise NonMonotoneTime(
            f"observation time {obs.t} not after last history time {risk.history[-1].t}"
        )

    before = RiskSnapshot.of(risk)
    events: list[TransitionEvent] = []
    history = risk.history + (obs,)

    # Probable risk materializes: driver resets to the top of the existing
    # band (severity 1, score 0.99).
    if risk.presence is Presence.PROBABLE and (materialized or obs.value >= 0.99):
        updated = dataclasses.replace(
            risk,
            presence=Presence.EXISTING,
            dynamics=Dynamics.GROWING,
            band=classify_band(obs.value),
            driver=Driver(ObservationKind.SEVERITY, 1.0),
            score=scoring.score_existing(1.0),
            history=history,
        )
        updated = _refresh_admissibility(updated)
        events.append(TransitionEvent(risk.id, obs.t, TransitionKind.PROBABLE_TO_EXISTING,
                                      before, RiskSnapshot.of(updated)))
        return updated, events

    # Declared catastrophe: existing risks cross 1 only by explicit event.
    if risk.presence is Presence.EXISTING and declare_catastrophic:
        updated = dataclasses.replace(
            risk,
            driver=Driver(ObservationKind.SEVERITY, obs.value),
            score=scoring.CATASTROPHIC_THRESHOLD,
            status=RiskStatus.CATASTROPHIC,
            history=history,
        )
        updated = _refresh_admissibility(updated)
        events.append(TransitionEvent(risk.id, obs.t, TransitionKind.EXISTING_TO_CATASTROPHIC,
                                      before, RiskSnapshot.of(updated)))
        return updated, events

    new_dynamics = _classify_from_history(history, obs.kind, risk.dynamics, epsilon)
    new_driver = Driver(obs.kind, obs.value)

    if risk.presence is Presence.EXISTING:
        if _decline_confirmed(history, epsilon):
            series = _kind_series(history, ObservationKind.SEVERITY,
                                  Dynamics.DECLINING, canonical=False)
            fit = fit_trend(series)
            forecast = forecast_score(fit, fit.t_last + 1.0)
            lo = scoring.PROBABLE_DECLINING_GAIN * (1.0 - scoring.PROBABILITY_MAX)
            hi = scoring.PROBABLE_DECLINING_GAIN * (1.0 - scoring.PROBABILITY_MIN)
            clamped = min(max(forecast, lo), hi)
            y = scoring.inverse_probable(clamped, Dynamics.DECLINING)
            y = min(max(y, scoring.PROBABILITY_MIN), scoring.PROBABILITY_MAX)
            updated = dataclasses.replace(
                risk,
                presence=Presence.PROBABLE,
                dynamics=Dynamics.DECLINING,
                band=classify_band(y),
                driver=Driver(ObservationKind.PROBABILITY, y),
                score=scoring.score_probable(y, Dynamics.DECLINING),
                history=history,
            )
            updated = _refresh_admissibility(updated)
            events.append(TransitionEvent(risk.id, obs.t,
                                          TransitionKind.DEESCALATION_TO_PROBABLE,
                                          before, RiskSnapshot.of(updated)))
            return updated, events

        updated = dataclasses.replace(
            risk,
            dynamics=new_dynamics,
            driver=new_driver,
            score=scoring.score_existing(obs.value),
            history=history,
        )
        updated = _refresh_admissibility(updated)
        return updated, events

    # Probable risk: rescore on the resolved branch, reclassify band.
    new_score = scoring.score_probable(obs.value, new_dynamics)
    new_band = classify_band(obs.value)
    # Crossing the critical threshold forces the band to High.
    if new_score >= scoring.CATASTROPHIC_THRESHOLD > risk.score:
        new_band = ProbabilityBand.HIGH
    updated = dataclasses.replace(
        risk,
        dynamics=new_dynamics,
        band=new_band,
        driver=new_driver,
        score=new_score,
        history=history,
    )
    updated = _refresh_admissibility(updated)

    if band_rank(updated.band) > band_rank(before.band):
        events.append(TransitionEvent(risk.id, obs.t, TransitionKind.BAND_ESCALATION,
                                      before, RiskSnapshot.of(updated)))
    if updated.score <= 0.0 < before.score:
        events.append(TransitionEvent(risk.id, obs.t, TransitionKind.BECAME_INSIGNIFICANT,
                                      before, RiskSnapshot.of(updated)))
    return updated, events


def _refresh_admissibility(risk: RiskRecord) -> RiskRecord:
    row = resolve_strategy(risk.origin, risk.presence, risk.dynamics)
    return dataclasses.replace(
        risk, admissibility=classify_admissibility(risk.presence, risk.score,
                                                   row.critical_value))


def build_risk(
    risk_id: str,
    name: str,
    sphere: str,
    origin,
    presence: Presence,
    driver_value: float,
    *,
    dynamics: Dynamics = Dynamics.GROWING,
    dependencies: tuple[str, ...] = (),
) -> RiskRecord:
    """Construct a fresh risk from its initial driver estimate."""
    if presence is Presence.PROBABLE:
        driver = Driver(ObservationKind.PROBABILITY, driver_value)
        score = scoring.score_probable(driver_value, dynamics)
        band = classify_band(driver_value)
    else:
        driver = Driver(ObservationKind.SEVERITY, driver_value)
        score = scoring.score_existing(driver_value)
        band = ProbabilityBand.HIGH
    risk = RiskRecord(
        id=risk_id, name=name, sphere=sphere, origin=origin, presence=presence,
        dynamics=dynamics, band=band, score=score, driver=driver,
        dependencies=tuple(dependencies),
    )
    return _refresh_admissibility(risk)
