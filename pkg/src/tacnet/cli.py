"""Command-line workflow: validate, graph, paths, run, report, serve.

Exit codes: 0 success, 1 domain error (bad model, unknown name), 2 I/O or
usage error.  Subcommands never mutate their input files; output goes only
to explicit --out targets.
"""
from __future__ import annotations

import argparse
import socket
import sys
from dataclasses import replace

from . import persistence, scenario
from .errors import NotFoundError, TacnetError
from .graph import all_paths, build_connection_graph, shortest_path, to_dot
from .model import Model


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tacnet", description="Model, simulate and analyse hierarchical tactical networks."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load a model file and re-check every rule")
    p.add_argument("model_file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("graph", help="export the connection graph as Graphviz text")
    p.add_argument("model_file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("paths", help="print the shortest (or all) paths between two objects")
    p.add_argument("model_file")
    p.add_argument("--from", dest="src", required=True, metavar="NAME-PATH",
                   help="source object as a /-joined name path")
    p.add_argument("--to", dest="dst", required=True, metavar="NAME-PATH")
    p.add_argument("--all", action="store_true", help="list every simple path")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("run", help="execute an embedded scenario and write its log")
    p.add_argument("model_file")
    p.add_argument("--scenario", required=True, help="name of an embedded scenario")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--duration", type=float, help="override the scenario duration (seconds)")
    p.add_argument("--out", required=True, help="log file to write")
    p.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="extract a delivery-time series from a log")
    p.add_argument("log_file")
    p.add_argument("--label", required=True, help="task label to extract")
    p.add_argument("--format", choices=("csv", "jsonl"), help="log format (default: by extension)")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve the model over HTTP for the editor UI")
    p.add_argument("model_file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="directory with the built editor UI, mounted at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except TacnetError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


def _load(path: str) -> tuple[Model, dict[str, scenario.ScenarioSpec]]:
    with open(path, "rb") as handle:
        return persistence.load(handle.read())


def _resolve(model: Model, name_path: str):
    obj = model.find_object([part for part in name_path.split("/") if part])
    if obj is None or obj is model.root:
        raise NotFoundError(f"no object at name path {name_path!r}")
    return obj


def cmd_validate(args) -> int:
    model, scenarios = _load(args.model_file)
    print(
        f"ok: {len(model.objects)} objects, {len(model.connections)} connections, "
        f"{len(scenarios)} scenarios"
    )
    return 0


def cmd_graph(args) -> int:
    model, _ = _load(args.model_file)
    text = to_dot(build_connection_graph(model))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_paths(args) -> int:
    model, _ = _load(args.model_file)
    src = _resolve(model, args.src)
    dst = _resolve(model, args.dst)
    graph = build_connection_graph(model)
    if args.all:
        paths = all_paths(graph, src.id, dst.id)
        if not paths:
            print("no path")
            return 0
        for path in paths:
            print(" > ".join(graph.name(v) for v in path.vertices))
        return 0
    path = shortest_path(graph, src.id, dst.id)
    if path is None:
        print("no path")
        return 0
    print(" > ".join(graph.name(v) for v in path.vertices))
    return 0


def cmd_run(args) -> int:
    model, scenarios = _load(args.model_file)
    if args.scenario not in scenarios:
        raise NotFoundError(
            f"no scenario {args.scenario!r} in {args.model_file} "
            f"(available: {', '.join(scenarios) or 'none'})"
        )
    spec = scenarios[args.scenario]
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.duration is not None:
        spec = replace(spec, duration=args.duration)
    log = scenario.run(scenario.bind(model, spec))
    persistence.export_log(log, args.format, args.out)
    _print_summary(scenario.summarize(log))
    return 0


def _print_summary(summary: scenario.RunSummary) -> None:
    print(f"scenario {summary.scenario!r} seed {summary.seed} duration {summary.duration}")
    print(f"records {summary.total_records}, messages sent {summary.messages_sent}")
    print(f"{'label':<24} {'sent':>6} {'delivered':>9} {'min':>8} {'mean':>8} {'max':>8}")
    for label in sorted(summary.labels):
        stats = summary.labels[label]
        cells = [
            "-" if v is None else f"{v:.3f}"
            for v in (stats.min_delivery, stats.mean_delivery, stats.max_delivery)
        ]
        print(
            f"{label:<24} {stats.sent:>6} {stats.delivered:>9} "
            f"{cells[0]:>8} {cells[1]:>8} {cells[2]:>8}"
        )


def cmd_report(args) -> int:
    fmt = args.format
    if fmt is None:
        fmt = "csv" if args.log_file.endswith(".csv") else "jsonl"
    records = (
        persistence.read_log_csv(args.log_file)
        if fmt == "csv"
        else persistence.read_log_jsonl(args.log_file)
    )
    log = scenario.SimLog(scenario="", seed=0, duration=0.0, records=records)
    series = scenario.delivery_times(log, args.label)
    if not series:
        print(f"warning: no delivered messages with label {args.label!r}", file=sys.stderr)
    lines = ["send_time,delivery_seconds"]
    lines += [f"{send!r},{delta!r}" for send, delta in series]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    model, _ = _load(args.model_file)
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.bind((args.host, args.port))
        probe.close()
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    app = create_app(model, ui_dir=args.ui)
    if args.ui:
        print(f"editor UI at http://{args.host}:{args.port}/ui/")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
