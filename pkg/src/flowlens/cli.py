"""Command-line entry points.

Subcommands: profile (run pulses, write the report file), render (write
the SVG), pulses (print a timing summary per pulse), serve (HTTP server),
and gen-flights (write the synthetic dataset). FLOWLENS_PORT overrides
--port for serve.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .datagen import DEFAULT_SEED, write_flights_csv
from .errors import FlowlensError, SpecSyntaxError, format_path
from .pipeline import Session
from .profiler import serialize_report

REPORT_SUFFIX = ".flowlens.json"


def describe_error(exc: FlowlensError) -> str:
    parts = [exc.message]
    if getattr(exc, "path", None) is not None:
        parts.append(f"at {format_path(exc.path)}")
    if isinstance(exc, SpecSyntaxError):
        parts.append(f"(line {exc.line}, col {exc.col})")
    elif getattr(exc, "span", None) is not None:
        span = exc.span
        parts.append(f"(line {span.start_line}, col {span.start_col})")
    return " ".join(parts)


def _add_pipeline_args(sub: argparse.ArgumentParser, events: bool = True) -> None:
    sub.add_argument("spec", help="chart spec file (JSON)")
    sub.add_argument("--data-dir", default=None,
                     help="directory for url datasets (default: spec's directory)")
    sub.add_argument("--gen-flights", type=int, metavar="N", default=None,
                     help="write N synthetic rows to flights.csv in the data dir first")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED,
                     help="seed for --gen-flights")
    if events:
        sub.add_argument("--events", default=None,
                         help="JSON file with [{\"signal\": name, \"value\": v}, ...]")


def _load_session(args) -> Session:
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        raise FlowlensError(f"spec file not found: {spec_path}")
    data_dir = Path(args.data_dir) if args.data_dir else spec_path.parent
    if args.gen_flights is not None:
        write_flights_csv(data_dir / "flights.csv", args.gen_flights, args.seed)
    session = Session.from_text(spec_path.read_text(encoding="utf-8"), data_dir)
    session.run_initial()
    return session


def _run_events(session: Session, args) -> None:
    if getattr(args, "events", None):
        events = json.loads(Path(args.events).read_text(encoding="utf-8"))
        session.run_events(events)


def _default_report_path(spec: str) -> Path:
    stem = spec[:-len(".json")] if spec.endswith(".json") else spec
    return Path(stem + REPORT_SUFFIX)


def cmd_profile(args) -> int:
    session = _load_session(args)
    _run_events(session, args)
    out = Path(args.out) if args.out else _default_report_path(str(args.spec))
    out.write_text(serialize_report(session.report()), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_render(args) -> int:
    session = _load_session(args)
    out = Path(args.out) if args.out else Path(args.spec).with_suffix(".svg")
    out.write_text(session.scene_svg(), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_pulses(args) -> int:
    session = _load_session(args)
    _run_events(session, args)
    for pulse in session.runtime.pulses:
        trigger = pulse.trigger if isinstance(pulse.trigger, str) \
            else f"{pulse.trigger.name}={pulse.trigger.value!r}"
        ms = pulse.wall_total / 1e6
        print(f"pulse {pulse.pulse_id}  {trigger}  {ms:.3f} ms  "
              f"{len(pulse.evaluated)} nodes")
    return 0


def cmd_serve(args) -> int:
    from .server import make_server

    port = int(os.environ.get("FLOWLENS_PORT", args.port))
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        raise FlowlensError(f"spec file not found: {spec_path}")
    data_dir = Path(args.data_dir) if args.data_dir else spec_path.parent
    if args.gen_flights is not None:
        write_flights_csv(data_dir / "flights.csv", args.gen_flights, args.seed)
    ui_dir = Path(args.ui) if args.ui else None
    server = make_server(spec_path.read_text(encoding="utf-8"), data_dir,
                         port=port, ui_dir=ui_dir)
    host, actual_port = server.server_address[:2]
    print(f"serving on http://{host}:{actual_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_gen_flights(args) -> int:
    out = write_flights_csv(args.out, args.n, args.seed)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowlens",
        description="Profile, render, and serve declarative chart specs.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("profile", help="run pulses and write the report file")
    _add_pipeline_args(p)
    p.add_argument("--out", default=None,
                   help=f"report path (default: <spec>{REPORT_SUFFIX})")
    p.set_defaults(func=cmd_profile)

    p = subs.add_parser("render", help="write the chart as SVG")
    _add_pipeline_args(p, events=False)
    p.add_argument("--out", default=None, help="SVG path (default: <spec>.svg)")
    p.set_defaults(func=cmd_render)

    p = subs.add_parser("pulses", help="print per-pulse timing summaries")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_pulses)

    p = subs.add_parser("serve", help="serve the profile over HTTP")
    _add_pipeline_args(p, events=False)
    p.add_argument("--port", type=int, default=8642,
                   help="port (FLOWLENS_PORT overrides)")
    p.add_argument("--ui", default=None,
                   help="directory of built web UI files to serve at /")
    p.set_defaults(func=cmd_serve)

    p = subs.add_parser("gen-flights", help="write a synthetic flights.csv")
    p.add_argument("n", type=int, help="row count")
    p.add_argument("--out", default="flights.csv")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_gen_flights)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FlowlensError as exc:
        print(f"error: {describe_error(exc)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
