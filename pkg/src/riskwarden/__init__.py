"""riskwarden: proactive enterprise risk register engine.

Maintains a dynamic register of classified risks, scores them through a
bijective probability-to-level mapping, forecasts critical-threshold
crossings from observation trends, and aggregates the register into the
R = R_v + R_c decomposition and the integral vulnerability indicator E_p.
"""

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
    StrategyRow,
    STRATEGY_TABLE,
    classify_admissibility,
    classify_band,
    is_significant,
    resolve_strategy,
)
from .scoring import (
    Zone,
    classify_zone,
    critical_value,
    inverse_probable,
    score_existing,
    score_probable,
)
from .dynamics import (
    TransitionEvent,
    TransitionKind,
    TrendFit,
    apply_observation,
    build_risk,
    classify_dynamics,
    fit_trend,
    forecast_crossing,
    forecast_score,
)
from .assessment import (
    AssessmentReport,
    CycleConfig,
    CycleReport,
    Intervention,
    WhatIfScenario,
    assess,
    class_sums,
    integral_indicator,
    prioritize,
    run_cycle,
    what_if,
)
from .registry import (
    Horizon,
    Register,
    create_register,
    load_register,
    save_register,
)

__version__ = "0.1.0"
