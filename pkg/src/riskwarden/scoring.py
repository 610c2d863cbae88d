"""Quantitative mapping between expert drivers and the risk level x.

Probable risks are driven by an occurrence probability y in [0.01, 0.99],
existing risks by a severity share s in [0, 1]. Each probable branch is a
strictly monotone (hence invertible) linear map chosen so that every
strategy-table endpoint and critical value is reproduced exactly:

    declining:  x = 0.49 * (1 - y)            image (0.0049, 0.4851]
    growing:    x = 0.5 + (149/98) * (y - 0.01)  image [0.5, 1.99]
    existing:   x = 0.5 + 0.49 * s             image [0.5, 0.99]
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction

from .core import Dynamics, Presence, StrategyRow, resolve_dynamics
from .errors import DomainError, DriverOutOfDomain


class Zone(Enum):
    INSIGNIFICANT = "insignificant"
    PROBABLE = "probable"
    EXISTING = "existing"
    CATASTROPHIC = "catastrophic"


# Branch constants, kept as exact rationals where the decimal literal would
# hide rounding.
PROBABLE_DECLINING_GAIN = 0.49
PROBABLE_GROWING_FLOOR = 0.5
PROBABLE_GROWING_GAIN = Fraction(149, 98)
EXISTING_FLOOR = 0.5
EXISTING_GAIN = 0.49
CATASTROPHIC_THRESHOLD = 1.0
DEESCALATION_SENTINEL = 0.49

PROBABILITY_MIN = 0.01
PROBABILITY_MAX = 0.99


def _check_probability(y: float) -> None:
    if not (PROBABILITY_MIN <= y <= PROBABILITY_MAX):
        raise DriverOutOfDomain(f"probability must lie in [0.01, 0.99], got {y}")


def score_probable(y: float, dynamics: Dynamics) -> float:
    """Map probability y onto the risk level x for a probable risk."""
    _check_probability(y)
    if resolve_dynamics(dynamics) is Dynamics.DECLINING:
        return PROBABLE_DECLINING_GAIN * (1.0 - y)
    return PROBABLE_GROWING_FLOOR + float(PROBABLE_GROWING_GAIN * Fraction(y - PROBABILITY_MIN))


def inverse_probable(x: float, dynamics: Dynamics) -> float:
    """Exact inverse of score_probable on the given branch."""
    if resolve_dynamics(dynamics) is Dynamics.DECLINING:
        lo = PROBABLE_DECLINING_GAIN * (1.0 - PROBABILITY_MAX)  # 0.0049
        hi = PROBABLE_DECLINING_GAIN * (1.0 - PROBABILITY_MIN)  # 0.4851
        if not (lo <= x <= hi):
            raise DomainError(f"score {x} outside declining branch image [{lo}, {hi}]")
        return 1.0 - x / PROBABLE_DECLINING_GAIN
    if not (0.5 <= x <= 1.99):
        raise DomainError(f"score {x} outside growing branch image [0.5, 1.99]")
    return PROBABILITY_MIN + float(Fraction(x - PROBABLE_GROWING_FLOOR) / PROBABLE_GROWING_GAIN)


def score_existing(s: float) -> float:
    """Map severity share s in [0, 1] onto the existing band [0.5, 0.99]."""
    if not (0.0 <= s <= 1.0):
        raise DriverOutOfDomain(f"severity must lie in [0, 1], got {s}")
    return EXISTING_FLOOR + EXISTING_GAIN * s


def inverse_existing(x: float) -> float:
    """Severity share for an existing score; inverse of score_existing."""
    if not (EXISTING_FLOOR <= x <= EXISTING_FLOOR + EXISTING_GAIN):
        raise DomainError(f"score {x} outside existing band [0.5, 0.99]")
    return (x - EXISTING_FLOOR) / EXISTING_GAIN


def critical_value(row: StrategyRow) -> float:
    """The row's critical value K, verbatim from the strategy table."""
    return row.critical_value


def classify_zone(presence: Presence, x: float) -> Zone:
    """Zone of a score: catastrophic / existing / probable / insignificant."""
    if x >= CATASTROPHIC_THRESHOLD:
        return Zone.CATASTROPHIC
    if presence is Presence.EXISTING:
        return Zone.EXISTING
    return Zone.PROBABLE if x > 0.0 else Zone.INSIGNIFICANT
