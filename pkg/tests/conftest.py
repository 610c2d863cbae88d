import dataclasses
import random

import pytest

from riskwarden.core import Dynamics, Origin, Presence, RiskRecord
from riskwarden.dynamics import build_risk
from riskwarden.scoring import inverse_probable


def make_random_risk(rng: random.Random, risk_id: str,
                     allow_insignificant: bool = True) -> RiskRecord:
    origin = rng.choice(list(Origin))
    presence = rng.choice(list(Presence))
    dynamics = rng.choice([Dynamics.GROWING, Dynamics.DECLINING])
    if presence is Presence.PROBABLE:
        driver = rng.uniform(0.01, 0.99)
    else:
        driver = rng.uniform(0.0, 1.0)
    risk = build_risk(
        risk_id=risk_id, name=f"risk {risk_id}",
        sphere=rng.choice(["macro", "industry", "firm"]),
        origin=origin, presence=presence, driver_value=driver,
        dynamics=dynamics,
    )
    if allow_insignificant and rng.random() < 0.25:
        # Both driver mappings only produce positive scores; insignificant
        # records are constructed directly to exercise the x <= 0 rules.
        risk = dataclasses.replace(risk, score=rng.uniform(-0.5, 0.0))
    return risk


def make_random_register(rng: random.Random, max_size: int = 20,
                         allow_insignificant: bool = True) -> list[RiskRecord]:
    size = rng.randint(0, max_size)
    return [make_random_risk(rng, f"R{i:03d}", allow_insignificant)
            for i in range(size)]


def two_risk_fixture() -> list[RiskRecord]:
    """Two risks scoring {0.5, 0.8}: E_p = 0.4, R_c = 0.5, R_v = 0.8."""
    existing = build_risk("A", "logistics cost overrun", "firm",
                          Origin.INTERNAL, Presence.EXISTING, 0.0)
    y = inverse_probable(0.8, Dynamics.GROWING)
    probable = build_risk("B", "supply disruption", "macro",
                          Origin.EXTERNAL, Presence.PROBABLE, y)
    return [existing, probable]


@pytest.fixture
def rng():
    return random.Random(20260823)
