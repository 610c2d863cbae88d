"""Shared report serialization and numeric formatting.

The CLI and the HTTP service must print identical figures, so both go
through ``format_sig12`` (fixed 12-significant-digit decimal strings) and
``report_to_dict``.
"""

from __future__ import annotations

import math

from .assessment import AssessmentReport, CycleReport


def format_sig12(x: float) -> str:
    """Render a float with exactly 12 significant digits, plain decimal."""
    if x == 0.0 or not math.isfinite(x):
        return f"{x:.12f}" if math.isfinite(x) else str(x)
    exponent = math.floor(math.log10(abs(x)))
    decimals = max(0, 11 - exponent)
    return f"{x:.{decimals}f}"


def report_to_dict(report: AssessmentReport) -> dict:
    return {
        "r_v": report.r_v,
        "r_c": report.r_c,
        "r": report.r_total,
        "e_p": report.e_p,
        "formatted": {
            "r_v": format_sig12(report.r_v),
            "r_c": format_sig12(report.r_c),
            "r": format_sig12(report.r_total),
            "e_p": format_sig12(report.e_p),
        },
        "entries": [
            {
                "id": e.id,
                "name": e.name,
                "sphere": e.sphere,
                "origin": e.origin.value,
                "presence": e.presence.value,
                "dynamics": e.dynamics.value,
                "band": e.band.value,
                "zone": e.zone.value,
                "admissibility": e.admissibility.value,
                "score": e.score,
                "critical_value": e.critical_value,
                "crossings": [
                    {"threshold": c.threshold, "label": c.label, "at_t": c.at_t}
                    for c in e.crossings
                ],
            }
            for e in report.entries
        ],
        "priorities": list(report.priorities),
        "alerts": [
            {"risk_id": a.risk_id, "kind": a.kind, "message": a.message}
            for a in report.alerts
        ],
        "strategic_review": list(report.strategic_review),
    }


def cycle_to_dict(report: CycleReport) -> dict:
    return {
        "complete": report.complete,
        "stages": [
            {
                "index": s.index,
                "name": s.name,
                "complete": s.complete,
                "timestamp": s.timestamp,
                "output": s.output,
            }
            for s in report.stages
        ],
    }
