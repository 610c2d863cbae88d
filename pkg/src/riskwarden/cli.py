"""Command-line operator interface.

Exit codes: 0 success, 1 domain/validation error, 2 I/O or parse error,
3 usage error. stdout carries data, stderr carries diagnostics.
"""

from __future__ import annotations

import argparse
import contextlib
import fcntl
import json
import os
import sys
from datetime import date

from . import assessment, dynamics as dyn, registry
from .assessment import CycleConfig, Intervention, WhatIfScenario
from .core import Dynamics, Observation, ObservationKind, Origin, Presence
from .errors import (
    MalformedTable,
    ParseError,
    PathExists,
    RiskwardenError,
    SchemaVersionMismatch,
)
from .reporting import cycle_to_dict, format_sig12, report_to_dict

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_USAGE = 3

_IO_ERRORS = (ParseError, SchemaVersionMismatch, PathExists, MalformedTable)

NAME_WIDTH = 40


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@contextlib.contextmanager
def _register_lock(path: str):
    # Advisory lock so two CLI processes cannot mutate one register at once.
    lock_path = path + ".lock"
    with open(lock_path, "w") as fp:
        fcntl.flock(fp, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fp, fcntl.LOCK_UN)


def _parse_t(register: registry.Register, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        return register.to_period(date.fromisoformat(raw))


def _print_report(report, fmt: str) -> None:
    payload = report_to_dict(report)
    if fmt == "structured":
        print(json.dumps(payload, indent=2))
        return
    f = payload["formatted"]
    print(f"R_v = {f['r_v']}")
    print(f"R_c = {f['r_c']}")
    print(f"R   = {f['r']}")
    print(f"E_p = {f['e_p']}")
    if payload["entries"]:
        print()
        header = (f"{'id':<12} {'name':<{NAME_WIDTH}} {'origin':<8} {'presence':<9} "
                  f"{'dyn':<9} {'band':<6} {'adm':<13} {'x':>14} {'K':>8}")
        print(header)
        print("-" * len(header))
        for e in payload["entries"]:
            name = e["name"][:NAME_WIDTH]
            print(f"{e['id']:<12} {name:<{NAME_WIDTH}} {e['origin']:<8} "
                  f"{e['presence']:<9} {e['dynamics']:<9} {e['band']:<6} "
                  f"{e['admissibility']:<13} {format_sig12(e['score']):>14} "
                  f"{e['critical_value']:>8}")
    if payload["priorities"]:
        print()
        print("priorities: " + ", ".join(payload["priorities"]))
    for alert in payload["alerts"]:
        print(f"alert [{alert['kind']}]: {alert['message']}")
    if payload["strategic_review"]:
        print("strategic review: " + ", ".join(payload["strategic_review"]))


def _build_parser() -> _Parser:
    parser = _Parser(prog="riskwarden",
                     description="Proactive enterprise risk register engine")
    parser.add_argument("--register",
                        default=os.environ.get("RISKWARDEN_REGISTER"),
                        help="register file path (default: $RISKWARDEN_REGISTER)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create an empty register")
    p.add_argument("--stage", required=True)
    p.add_argument("--periods", type=int, required=True)
    p.add_argument("--period-days", type=int, default=registry.DEFAULT_PERIOD_DAYS)
    p.add_argument("--taxonomy", default="", help="comma-separated sphere labels")
    p.add_argument("--epoch", default=None, help="ISO date anchoring period 0")

    p = sub.add_parser("add", help="register a new risk")
    p.add_argument("--id", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--sphere", default="")
    p.add_argument("--origin", choices=[o.value for o in Origin], required=True)
    p.add_argument("--presence", choices=[pr.value for pr in Presence], required=True)
    p.add_argument("--dynamics", choices=["growing", "declining"], default="growing")
    p.add_argument("--depends", default="", help="comma-separated risk ids")
    p.add_argument("--driver", type=float, required=True,
                   help="initial probability (probable) or severity (existing)")

    p = sub.add_parser("observe", help="record one observation")
    p.add_argument("--id", required=True)
    p.add_argument("--t", required=True, help="period index or ISO date")
    p.add_argument("--kind", choices=[k.value for k in ObservationKind], required=True)
    p.add_argument("--value", type=float, required=True)
    p.add_argument("--note", default=None)
    p.add_argument("--materialized", action="store_true")
    p.add_argument("--declare-catastrophic", action="store_true")

    p = sub.add_parser("import", help="bulk-import observations from CSV")
    p.add_argument("file")

    p = sub.add_parser("retire", help="retire a risk (kept for audit)")
    p.add_argument("--id", required=True)

    p = sub.add_parser("assess", help="print the register assessment")
    p.add_argument("--format", choices=["table", "structured"], default="table")

    p = sub.add_parser("whatif", help="assess a hypothetical register")
    p.add_argument("--set", dest="set_values", default="",
                   help="id=VALUE[,id=VALUE...] driver overrides")
    p.add_argument("--remove", default="", help="comma-separated risk ids to drop")
    p.add_argument("--format", choices=["table", "structured"], default="table")

    p = sub.add_parser("cycle", help="run the nine-stage assessment cycle")
    p.add_argument("--format", choices=["table", "structured"], default="structured")

    p = sub.add_parser("events", help="print the event log")
    p.add_argument("--since", type=float, default=None)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default=os.environ.get("RISKWARDEN_ADDR", "127.0.0.1:8550"))

    return parser


def _require_register(args) -> str:
    if not args.register:
        print("error: --register (or RISKWARDEN_REGISTER) is required",
              file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return args.register


def _run(args) -> int:
    if args.command == "init":
        path = _require_register(args)
        taxonomy = [s.strip() for s in args.taxonomy.split(",") if s.strip()]
        registry.create_register(
            path,
            registry.Horizon(args.stage, args.periods, args.period_days),
            taxonomy,
            period_epoch=args.epoch,
        )
        print(f"initialized register at {path}")
        return EXIT_OK

    path = _require_register(args)

    if args.command == "serve":
        from .service import serve

        serve(path, addr=args.addr,
              cors_origin=os.environ.get("RISKWARDEN_CORS_ORIGIN"))
        return EXIT_OK

    register = registry.load_register(path)

    if args.command == "add":
        deps = tuple(s.strip() for s in args.depends.split(",") if s.strip())
        risk = dyn.build_risk(
            risk_id=args.id, name=args.name, sphere=args.sphere,
            origin=Origin(args.origin), presence=Presence(args.presence),
            driver_value=args.driver, dynamics=Dynamics(args.dynamics),
            dependencies=deps,
        )
        with _register_lock(path):
            registry.add_risk(register, risk)
        print(f"added risk {args.id} (x = {format_sig12(risk.score)})")
        return EXIT_OK

    if args.command == "observe":
        obs = Observation(
            t=_parse_t(register, args.t),
            kind=ObservationKind(args.kind),
            value=args.value,
            note=args.note,
        )
        with _register_lock(path):
            events = registry.record_observation(
                register, args.id, obs,
                materialized=args.materialized,
                declare_catastrophic=args.declare_catastrophic,
            )
        risk = register.risks[args.id]
        print(f"recorded observation for {args.id} (x = {format_sig12(risk.score)})")
        for event in events:
            print(f"transition: {event.kind.value}")
        return EXIT_OK

    if args.command == "import":
        with open(args.file, "r", encoding="utf-8") as fp:
            table = fp.read()
        with _register_lock(path):
            accepted, rejects = registry.import_observations(register, table)
        print(f"accepted {accepted} rows, rejected {len(rejects)}")
        for reject in rejects:
            print(f"row {reject.row}: {reject.reason}", file=sys.stderr)
        return EXIT_OK if not rejects else EXIT_DOMAIN

    if args.command == "retire":
        with _register_lock(path):
            registry.retire_risk(register, args.id)
        print(f"retired risk {args.id}")
        return EXIT_OK

    if args.command == "assess":
        report = assessment.assess(register.risks.values(),
                                   horizon_periods=register.horizon.periods)
        _print_report(report, args.format)
        return EXIT_OK

    if args.command == "whatif":
        interventions = []
        for pair in (s for s in args.set_values.split(",") if s.strip()):
            risk_id, _, value = pair.partition("=")
            if not value:
                print(f"error: malformed --set entry {pair!r}", file=sys.stderr)
                return EXIT_USAGE
            interventions.append(Intervention(risk_id.strip(),
                                              new_driver=float(value)))
        for risk_id in (s.strip() for s in args.remove.split(",") if s.strip()):
            interventions.append(Intervention(risk_id, remove=True))
        report = assessment.what_if(
            register.risks.values(),
            WhatIfScenario(tuple(interventions)),
            horizon_periods=register.horizon.periods,
        )
        _print_report(report, args.format)
        return EXIT_OK

    if args.command == "cycle":
        config = CycleConfig(
            stage_label=register.horizon.stage,
            periods=register.horizon.periods,
            taxonomy=tuple(register.taxonomy),
        )
        report = assessment.run_cycle(register.risks.values(), config)
        payload = cycle_to_dict(report)
        if args.format == "structured":
            print(json.dumps(payload, indent=2))
        else:
            for stage in payload["stages"]:
                mark = "done" if stage["complete"] else "incomplete"
                print(f"stage {stage['index']}: {stage['name']} [{mark}]")
        return EXIT_OK

    if args.command == "events":
        for entry in registry.read_events(register, args.since):
            print(json.dumps(entry))
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except _IO_ERRORS as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except RiskwardenError as exc:
        print(f"error [{exc.code}] {type(exc).__name__}: {exc.message}",
              file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
