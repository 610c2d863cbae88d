import random
import statistics

import pytest

from riskwarden.core import (
    AdmissibilityDegree,
    Dynamics,
    Observation,
    ObservationKind,
    Origin,
    Presence,
    ProbabilityBand,
    RiskStatus,
)
from riskwarden.dynamics import (
    TransitionKind,
    apply_observation,
    build_risk,
    classify_dynamics,
    fit_trend,
    forecast_crossing,
    forecast_score,
)
from riskwarden.errors import (
    BackwardForecast,
    DegenerateTime,
    InsufficientHistory,
    KindMismatch,
    NonMonotoneTime,
)


class TestFitTrend:
    def test_two_point_line(self):
        fit = fit_trend([(0, 0.5), (1, 0.6)])
        assert fit.slope == pytest.approx(0.1, abs=1e-12)
        assert fit.intercept == pytest.approx(0.5, abs=1e-12)

    def test_constant_series(self):
        fit = fit_trend([(0, 0.7), (1, 0.7), (2, 0.7)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)
        assert fit.intercept == pytest.approx(0.7, abs=1e-12)

    def test_three_point_line(self):
        fit = fit_trend([(0, 0.5), (1, 0.6), (2, 0.7)])
        assert fit.slope == pytest.approx(0.1, abs=1e-9)
        assert fit.intercept == pytest.approx(0.5, abs=1e-9)

    def test_matches_stdlib_regression(self):
        rng = random.Random(7)
        pts = [(float(t), rng.uniform(0, 2)) for t in range(25)]
        fit = fit_trend(pts)
        expected = statistics.linear_regression([p[0] for p in pts],
                                                [p[1] for p in pts])
        assert fit.slope == pytest.approx(expected.slope, abs=1e-12)
        assert fit.intercept == pytest.approx(expected.intercept, abs=1e-12)

    def test_residual_orthogonality(self):
        rng = random.Random(42)
        for _ in range(20):
            n = rng.randint(2, 100)
            pts = [(float(t) + rng.random() * 0.1, rng.uniform(-1, 2))
                   for t in range(n)]
            fit = fit_trend(pts)
            residuals = [x - (fit.intercept + fit.slope * t) for t, x in pts]
            assert sum(residuals) == pytest.approx(0.0, abs=1e-9)
            assert sum(t * r for (t, _), r in zip(pts, residuals)) \
                == pytest.approx(0.0, abs=1e-9)

    def test_insufficient_history(self):
        with pytest.raises(InsufficientHistory):
            fit_trend([(0, 0.5)])

    def test_degenerate_time(self):
        with pytest.raises(DegenerateTime):
            fit_trend([(1, 0.5), (1, 0.6)])


class TestClassifyDynamics:
    def test_deadband(self):
        assert classify_dynamics(fit_trend([(0, 0.5), (1, 0.6)])) is Dynamics.GROWING
        assert classify_dynamics(fit_trend([(0, 1.0), (1, 0.9)])) is Dynamics.DECLINING
        assert classify_dynamics(fit_trend([(0, 0.5), (1, 0.504)])) is Dynamics.STABLE


class TestForecast:
    def test_line_evaluation(self):
        fit = fit_trend([(0, 0.5), (1, 0.6)])  # a=0.5, b=0.1
        assert forecast_score(fit, 3) == pytest.approx(0.8, abs=1e-12)

    def test_flat_trend(self):
        fit = fit_trend([(0, 0.7), (1, 0.7)])
        assert forecast_score(fit, 10) == pytest.approx(0.7, abs=1e-12)

    def test_clamped_below_zero(self):
        fit = fit_trend([(0, 0.5), (1, 0.3)])  # a=0.5, b=-0.2
        assert forecast_score(fit, 4) == 0.0

    def test_backward_forecast_rejected(self):
        fit = fit_trend([(0, 0.5), (2, 0.6)])
        with pytest.raises(BackwardForecast):
            forecast_score(fit, 1.0)

    def test_crossing_time(self):
        fit = fit_trend([(0, 0.7), (2, 0.9)])  # slope 0.1, x_last 0.9 at t=2
        t_star = forecast_crossing(fit, 0.99)
        assert t_star == pytest.approx(2.9, abs=1e-9)
        assert forecast_score(fit, t_star) == pytest.approx(0.99, abs=1e-9)

    def test_already_at_threshold(self):
        fit = fit_trend([(4, 0.89), (5, 0.99)])
        assert forecast_crossing(fit, 0.99) == 5

    def test_declining_never_crosses(self):
        fit = fit_trend([(0, 0.7), (1, 0.6)])
        assert forecast_crossing(fit, 0.99) is None


def probable_growing_risk(y=0.4):
    return build_risk("P1", "probable growing", "firm", Origin.EXTERNAL,
                      Presence.PROBABLE, y, dynamics=Dynamics.GROWING)


def existing_risk(s=0.5, origin=Origin.INTERNAL):
    return build_risk("E1", "existing", "firm", origin,
                      Presence.EXISTING, s, dynamics=Dynamics.GROWING)


def obs(t, kind, value):
    return Observation(t=t, kind=kind, value=value)


class TestApplyObservation:
    def test_band_escalation_medium_to_high(self):
        risk = probable_growing_risk(0.4)
        risk, events = apply_observation(risk, obs(0, ObservationKind.PROBABILITY, 0.4))
        assert events == []
        risk, events = apply_observation(risk, obs(1, ObservationKind.PROBABILITY, 0.7))
        assert [e.kind for e in events] == [TransitionKind.BAND_ESCALATION]
        assert events[0].before.band is ProbabilityBand.MEDIUM
        assert events[0].after.band is ProbabilityBand.HIGH
        assert risk.band is ProbabilityBand.HIGH

    def test_probable_to_existing_at_099(self):
        risk = probable_growing_risk(0.7)
        risk, events = apply_observation(risk, obs(0, ObservationKind.PROBABILITY, 0.99))
        assert [e.kind for e in events] == [TransitionKind.PROBABLE_TO_EXISTING]
        assert risk.presence is Presence.EXISTING
        assert risk.score == pytest.approx(0.99, abs=1e-12)
        assert risk.driver.kind is ObservationKind.SEVERITY
        assert risk.driver.value == 1.0

    def test_probable_to_existing_via_materialized_flag(self):
        risk = probable_growing_risk(0.5)
        risk, events = apply_observation(
            risk, obs(0, ObservationKind.PROBABILITY, 0.5), materialized=True)
        assert [e.kind for e in events] == [TransitionKind.PROBABLE_TO_EXISTING]
        assert risk.presence is Presence.EXISTING

    def test_constant_severity_series_is_stable_with_no_events(self):
        risk = existing_risk(0.2)
        all_events = []
        for t in range(3):
            risk, events = apply_observation(
                risk, obs(t, ObservationKind.SEVERITY, 0.2))
            all_events.extend(events)
        assert all_events == []
        assert risk.dynamics is Dynamics.STABLE

    def test_declared_catastrophe(self):
        risk = existing_risk(0.9)
        risk, events = apply_observation(
            risk, obs(0, ObservationKind.SEVERITY, 0.95), declare_catastrophic=True)
        assert [e.kind for e in events] == [TransitionKind.EXISTING_TO_CATASTROPHIC]
        assert risk.status is RiskStatus.CATASTROPHIC
        assert risk.score >= 1.0
        assert risk.admissibility is AdmissibilityDegree.CATASTROPHIC
        risk.validate()

    def test_deescalation_needs_two_confirmations(self):
        risk = existing_risk(0.9)
        series = [0.9, 0.5, 0.1, 0.05]
        events_by_step = []
        for t, s in enumerate(series):
            risk, events = apply_observation(risk, obs(t, ObservationKind.SEVERITY, s))
            events_by_step.append([e.kind for e in events])
        assert events_by_step[:3] == [[], [], []]
        assert events_by_step[3] == [TransitionKind.DEESCALATION_TO_PROBABLE]
        assert risk.presence is Presence.PROBABLE
        assert risk.dynamics is Dynamics.DECLINING
        assert risk.driver.kind is ObservationKind.PROBABILITY
        assert 0.01 <= risk.driver.value <= 0.99

    def test_kind_mismatch(self):
        risk = probable_growing_risk()
        with pytest.raises(KindMismatch):
            apply_observation(risk, obs(0, ObservationKind.SEVERITY, 0.5))

    def test_non_monotone_time(self):
        risk = probable_growing_risk()
        risk, _ = apply_observation(risk, obs(1, ObservationKind.PROBABILITY, 0.5))
        with pytest.raises(NonMonotoneTime):
            apply_observation(risk, obs(1, ObservationKind.PROBABILITY, 0.6))

    def test_deterministic(self):
        risk = probable_growing_risk(0.4)
        observation = obs(0, ObservationKind.PROBABILITY, 0.55)
        first = apply_observation(risk, observation)
        second = apply_observation(risk, observation)
        assert first == second

    def test_record_invariants_hold_after_updates(self):
        risk = probable_growing_risk(0.3)
        for t, y in enumerate([0.35, 0.5, 0.65, 0.6]):
            risk, _ = apply_observation(risk, obs(t, ObservationKind.PROBABILITY, y))
            risk.validate()
            times = [o.t for o in risk.history]
            assert times == sorted(times)
