"""Command-line front end.

One declarative json design document drives every command; scalar flags
can override the sim block.  Exit codes: 0 success, 2 input error
(unreadable file, malformed json, schema violation), 3 domain error
(unreachable targets, degenerate configurations, exhausted budgets).
"""

import argparse
import json
import sys

from . import __version__
from .artifacts import (
    FORMATS,
    deaths_payload,
    guideline_payload,
    oc_payload,
    render_deaths,
    render_guideline,
    render_oc,
    render_simulate,
    simulate_payload,
)
from .document import DocumentError, resolve_document
from .trial import SimulationBudgetError, UnreachableTargetError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osmon",
        description=(
            "Design and evaluate survival safety-monitoring guidelines: "
            "positivity thresholds at death milestones, operating "
            "characteristics, event timelines, and simulation checks."
        ),
    )
    parser.add_argument("--version", action="version", version=f"osmon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_io(p):
        p.add_argument("document", help="path to a json design document")
        p.add_argument("--format", choices=FORMATS, default="md")
        p.add_argument("--out", help="write the artifact here instead of stdout")
        return p

    with_io(sub.add_parser("design", help="render the monitoring guideline table"))
    with_io(sub.add_parser("oc", help="render the operating characteristics"))
    deaths = with_io(sub.add_parser("deaths", help="render the expected-event timeline"))
    deaths.add_argument("--horizon-months", type=float, default=120.0)
    deaths.add_argument("--step-months", type=float, default=6.0)
    sim = with_io(sub.add_parser("simulate", help="run the simulation check"))
    sim.add_argument("--reps", type=int, help="override sim.reps")
    sim.add_argument("--seed", type=int, help="override sim.seed")
    serve = sub.add_parser("serve", help="run the http service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_raw(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError("unreadable", f"cannot read document: {exc}")
    except json.JSONDecodeError as exc:
        raise DocumentError("invalid_json", f"document is not valid json: {exc}")


def _apply_sim_overrides(raw, reps, seed):
    if reps is None and seed is None:
        return raw
    if not isinstance(raw, dict):
        return raw
    target = raw
    if "document" in raw and "tool" in raw and isinstance(raw["document"], dict):
        target = raw["document"]
    sim = target.get("sim")
    if not isinstance(sim, dict):
        sim = {}
        target["sim"] = sim
    if reps is not None:
        sim["reps"] = reps
    if seed is not None:
        sim["seed"] = seed
    return raw


def _emit(content: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(content)
    else:
        sys.stdout.write(content)


def _run(args) -> int:
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    raw = _load_raw(args.document)
    if args.command == "simulate":
        raw = _apply_sim_overrides(raw, args.reps, args.seed)
    resolved = resolve_document(raw)

    if args.command == "design":
        _emit(render_guideline(guideline_payload(resolved), args.format), args.out)
    elif args.command == "oc":
        _emit(render_oc(oc_payload(resolved), args.format), args.out)
    elif args.command == "deaths":
        payload = deaths_payload(resolved, args.horizon_months, args.step_months)
        _emit(render_deaths(payload, args.format), args.out)
        if any(not m["reachable"] for m in payload["milestones"]):
            return EXIT_DOMAIN
    else:
        _emit(render_simulate(simulate_payload(resolved), args.format), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed its diagnostic; normalize the failure code
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return _run(args)
    except DocumentError as exc:
        where = f" (at {exc.field_path})" if exc.field_path else ""
        print(f"error [{exc.code}]: {exc.message}{where}", file=sys.stderr)
        return EXIT_INPUT
    except (UnreachableTargetError, SimulationBudgetError, ValueError) as exc:
        print(f"error [domain]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:  # never surface a traceback to the shell
        print(f"error [internal]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
