"""Domain types, the eight-row strategy table, and pure classification rules.

A risk is classified along three axes: where it comes from (external or
internal), whether it has materialized (probable or existing) and which way
its influence trends (growing or declining). The 2 x 2 x 2 combination
selects one of eight behavior strategies, each carrying a probability band
set, a score range and a critical value K.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import DomainError, DriverOutOfDomain


class Origin(Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"


class Presence(Enum):
    PROBABLE = "probable"
    EXISTING = "existing"


class Dynamics(Enum):
    GROWING = "growing"
    DECLINING = "declining"
    # Engine-internal: near-zero trend slope. Resolves to GROWING for all
    # strategy/threshold lookups (conservative worst case).
    STABLE = "stable"


class ProbabilityBand(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


# Ordering used for escalation checks (LOW < MEDIUM < HIGH).
_BAND_ORDER = {ProbabilityBand.LOW: 0, ProbabilityBand.MEDIUM: 1, ProbabilityBand.HIGH: 2}


def band_rank(band: ProbabilityBand) -> int:
    return _BAND_ORDER[band]


class AdmissibilityDegree(Enum):
    INSIGNIFICANT = "insignificant"
    ADMISSIBLE = "admissible"
    CRITICAL = "critical"
    CATASTROPHIC = "catastrophic"


_DEGREE_ORDER = {
    AdmissibilityDegree.INSIGNIFICANT: 0,
    AdmissibilityDegree.ADMISSIBLE: 1,
    AdmissibilityDegree.CRITICAL: 2,
    AdmissibilityDegree.CATASTROPHIC: 3,
}


def degree_rank(degree: AdmissibilityDegree) -> int:
    return _DEGREE_ORDER[degree]


class RiskStatus(Enum):
    ACTIVE = "active"
    CATASTROPHIC = "catastrophic"
    RETIRED = "retired"


class ObservationKind(Enum):
    PROBABILITY = "probability"
    SEVERITY = "severity"


@dataclass(frozen=True)
class Observation:
    """One expert estimate: probability of occurrence or severity share.

    ``t`` is a dimensionless period index; calendar mapping lives in the
    registry/CLI layers.
    """

    t: float
    kind: ObservationKind
    value: float
    note: Optional[str] = None

    def __post_init__(self):
        if self.kind is ObservationKind.PROBABILITY:
            if not (0.01 <= self.value <= 0.99):
                raise DriverOutOfDomain(
                    f"probability observation must lie in [0.01, 0.99], got {self.value}"
                )
        else:
            if not (0.0 <= self.value <= 1.0):
                raise DriverOutOfDomain(
                    f"severity observation must lie in [0, 1], got {self.value}"
                )


@dataclass(frozen=True)
class StrategyRow:
    """One of the eight behavior strategies.

    ``zone_range`` is the probability interval the strategy operates over
    (fixed at (1.0, 1.0) for existing risks, whose occurrence probability
    is pinned at 1). ``score_range`` is (low, high); ``descending`` marks
    rows traversed from the high end downward.
    """

    origin: Origin
    presence: Presence
    dynamics: Dynamics  # GROWING or DECLINING only
    bands: frozenset[ProbabilityBand]
    zone_range: tuple[float, float]
    score_range: tuple[float, float]
    descending: bool
    critical_value: float


STRATEGY_TABLE: tuple[StrategyRow, ...] = (
    StrategyRow(Origin.EXTERNAL, Presence.PROBABLE, Dynamics.DECLINING,
                frozenset({ProbabilityBand.LOW}),
                (0.01, 0.99), (0.0, 0.49), True, 0.4851),
    StrategyRow(Origin.EXTERNAL, Presence.PROBABLE, Dynamics.GROWING,
                frozenset({ProbabilityBand.MEDIUM, ProbabilityBand.HIGH}),
                (0.01, 0.99), (0.5, 1.99), False, 1.99),
    StrategyRow(Origin.EXTERNAL, Presence.EXISTING, Dynamics.DECLINING,
                frozenset({ProbabilityBand.LOW}),
                (1.0, 1.0), (0.5, 0.99), True, 0.49),
    StrategyRow(Origin.EXTERNAL, Presence.EXISTING, Dynamics.GROWING,
                frozenset({ProbabilityBand.MEDIUM, ProbabilityBand.HIGH}),
                (1.0, 1.0), (0.5, 0.99), False, 0.99),
    StrategyRow(Origin.INTERNAL, Presence.PROBABLE, Dynamics.DECLINING,
                frozenset({ProbabilityBand.LOW, ProbabilityBand.MEDIUM}),
                (0.01, 0.99), (0.0, 0.49), True, 0.4851),
    StrategyRow(Origin.INTERNAL, Presence.PROBABLE, Dynamics.GROWING,
                frozenset({ProbabilityBand.MEDIUM, ProbabilityBand.HIGH}),
                (0.01, 0.99), (0.5, 1.99), False, 1.99),
    StrategyRow(Origin.INTERNAL, Presence.EXISTING, Dynamics.DECLINING,
                frozenset({ProbabilityBand.LOW, ProbabilityBand.MEDIUM}),
                (1.0, 1.0), (0.5, 0.99), True, 0.49),
    StrategyRow(Origin.INTERNAL, Presence.EXISTING, Dynamics.GROWING,
                frozenset({ProbabilityBand.MEDIUM, ProbabilityBand.HIGH}),
                (1.0, 1.0), (0.5, 0.99), False, 0.98),
)

_STRATEGY_INDEX = {
    (row.origin, row.presence, row.dynamics): row for row in STRATEGY_TABLE
}


def resolve_dynamics(dynamics: Dynamics) -> Dynamics:
    """Collapse the internal STABLE value onto GROWING for lookups."""
    return Dynamics.GROWING if dynamics is Dynamics.STABLE else dynamics


def resolve_strategy(origin: Origin, presence: Presence, dynamics: Dynamics) -> StrategyRow:
    """Look up the unique strategy row for an axis combination.

    Total over all eight (origin, presence, growing|declining) keys;
    STABLE dynamics is resolved to GROWING first.
    """
    return _STRATEGY_INDEX[(origin, presence, resolve_dynamics(dynamics))]


def classify_band(y: float) -> ProbabilityBand:
    """Band a probability into thirds: low / medium / high."""
    if not (0.01 <= y <= 0.99):
        raise DomainError(f"probability must lie in [0.01, 0.99], got {y}")
    if y < 1.0 / 3.0:
        return ProbabilityBand.LOW
    if y < 2.0 / 3.0:
        return ProbabilityBand.MEDIUM
    return ProbabilityBand.HIGH


def is_significant(x: float) -> bool:
    """A risk exists for the register iff its score is strictly positive."""
    return x > 0.0


def classify_admissibility(presence: Presence, x: float, k: float) -> AdmissibilityDegree:
    """Admissibility degree of a score against the row's critical value K.

    Catastrophic is reserved for existing risks at or beyond 1; probable
    risks cap at Critical once the score reaches 1.
    """
    if x <= 0.0:
        return AdmissibilityDegree.INSIGNIFICANT
    if presence is Presence.PROBABLE:
        return AdmissibilityDegree.ADMISSIBLE if x < 1.0 else AdmissibilityDegree.CRITICAL
    if x >= 1.0:
        return AdmissibilityDegree.CATASTROPHIC
    return AdmissibilityDegree.ADMISSIBLE if x < k else AdmissibilityDegree.CRITICAL


@dataclass(frozen=True)
class Driver:
    """The current quantitative driver: probability y or severity s."""

    kind: ObservationKind
    value: float


@dataclass(frozen=True)
class RiskRecord:
    """One risk in the register, with its full observation history."""

    id: str
    name: str
    sphere: str
    origin: Origin
    presence: Presence
    dynamics: Dynamics
    band: ProbabilityBand
    score: float
    driver: Driver
    status: RiskStatus = RiskStatus.ACTIVE
    dependencies: tuple[str, ...] = ()
    history: tuple[Observation, ...] = ()
    admissibility: AdmissibilityDegree = AdmissibilityDegree.ADMISSIBLE

    @property
    def strategy(self) -> StrategyRow:
        return resolve_strategy(self.origin, self.presence, self.dynamics)

    @property
    def is_active(self) -> bool:
        return self.status is not RiskStatus.RETIRED

    def validate(self) -> None:
        if self.id in self.dependencies:
            raise DomainError(f"risk {self.id!r} depends on itself")
        times = [obs.t for obs in self.history]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError(f"risk {self.id!r} history is not strictly increasing in t")
        if self.status is RiskStatus.CATASTROPHIC:
            if self.presence is not Presence.EXISTING or self.score < 1.0:
                raise DomainError(
                    f"catastrophic risk {self.id!r} must be existing with score >= 1"
                )
