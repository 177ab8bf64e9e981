"""Command-line interface: serving, analysis, simulation, and export.

Subcommands:
  serve              run the HTTP service
  analyze rank       annotation perplexity rankings
  analyze heatmap    keyword-vs-perplexity-bucket distribution
  analyze timeline   replay an event log into a mean/std series
  simulate           synthetic-annotator strategy experiment
  export             write a dataset ZIP for a release date

Analysis inputs are either a dataset archive (--dataset x.zip) or a
store snapshot (--store x.json); outputs are CSV (default) or JSON to
stdout or --out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import analysis, corpus_lm, simulate as sim
from .config import AppConfig
from .store import MotionStore

EVENTS_CSV_COLUMNS = ["seq", "timestamp", "entry_id", "strategy", "text"]
TIMELINE_CSV_COLUMNS = ["event_count", "mean_mppl", "std_mppl"]
RANK_CSV_COLUMNS = ["rank", "perplexity", "annotation"]
HEATMAP_CSV_COLUMNS = [
    "keyword",
    "occurrences",
    "bucket_index",
    "range_low",
    "range_high",
    "fraction",
]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annotool")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the annotation HTTP service")
    serve.add_argument("--config", help="JSON config file")
    serve.add_argument("--store", help="store snapshot to load")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(func=cmd_serve)

    analyze = sub.add_parser("analyze", help="offline corpus analysis")
    analyze_sub = analyze.add_subparsers(dest="analysis", required=True)

    rank = analyze_sub.add_parser("rank", help="perplexity rankings")
    _add_corpus_args(rank)
    rank.add_argument("--n", type=int, default=10)
    rank.add_argument("--direction", choices=["lowest", "highest"], default="lowest")
    rank.set_defaults(func=cmd_rank)

    heatmap = analyze_sub.add_parser("heatmap", help="keyword perplexity heatmap")
    _add_corpus_args(heatmap)
    heatmap.add_argument("--keywords", required=True, help="comma-separated keywords")
    heatmap.add_argument("--buckets", type=int, default=8)
    heatmap.add_argument(
        "--edges", help="comma-separated bucket edges (default: log-spaced)"
    )
    heatmap.set_defaults(func=cmd_heatmap)

    timeline = analyze_sub.add_parser("timeline", help="replay an event log")
    timeline.add_argument("--events", required=True, help="events CSV from simulate")
    timeline.add_argument("--cadence", type=int, default=200)
    timeline.add_argument("--order", type=int, default=corpus_lm.DEFAULT_ORDER)
    timeline.add_argument("--lambda", dest="lam", type=float, default=corpus_lm.DEFAULT_LAMBDA)
    _add_output_args(timeline)
    timeline.set_defaults(func=cmd_timeline)

    simulate = sub.add_parser("simulate", help="synthetic-annotator experiment")
    simulate.add_argument("--config", help="JSON simulation config")
    simulate.add_argument(
        "--reference", action="store_true", help="use the frozen reference setup"
    )
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--events-out", help="write the event log CSV here")
    simulate.add_argument("--timeline-out", help="write the timeline CSV here")
    simulate.set_defaults(func=cmd_simulate)

    export = sub.add_parser("export", help="write a dataset archive")
    export.add_argument("--store", required=True)
    export.add_argument("--release-date", required=True)
    export.add_argument("--out", required=True)
    export.set_defaults(func=cmd_export)

    return parser


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--dataset", help="dataset ZIP archive")
    source.add_argument("--store", help="store snapshot JSON")
    parser.add_argument("--order", type=int, default=corpus_lm.DEFAULT_ORDER)
    parser.add_argument("--lambda", dest="lam", type=float, default=corpus_lm.DEFAULT_LAMBDA)
    _add_output_args(parser)


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--out", help="output path (default: stdout)")


def _load_store(args) -> MotionStore:
    if args.dataset:
        store, warnings = MotionStore.import_dataset(Path(args.dataset).read_bytes())
        for warning in warnings:
            print(warning, file=sys.stderr)
        return store
    return MotionStore.load(args.store)


def _emit(args, rows: list[dict], columns: list[str]) -> None:
    if args.format == "json":
        payload = json.dumps(rows, indent=2) + "\n"
    else:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
        payload = buffer.getvalue()
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    from .service import AnnotationPlatform

    config = AppConfig.from_file(args.config) if args.config else AppConfig()
    store = MotionStore.load(args.store) if args.store else MotionStore()
    platform = AnnotationPlatform(store, config)
    scheduler = platform.start_scheduler()
    app = create_app(platform)
    try:
        uvicorn.run(
            app,
            host=args.host or config.host,
            port=args.port or config.port,
            log_level="info",
        )
    finally:
        scheduler.stop()
    return 0


def _trained_model(store: MotionStore, order: int, lam: float):
    texts = [r.text for r in store.all_annotations()]
    corpus = [corpus_lm.normalize(t) for t in texts]
    return corpus_lm.train(corpus, order=order, lam=lam), texts


def cmd_rank(args) -> int:
    store = _load_store(args)
    model, texts = _trained_model(store, args.order, args.lam)
    ranked = analysis.rank_annotations(model, texts, n=args.n, direction=args.direction)
    rows = [
        {"rank": i + 1, "perplexity": f"{r.perplexity:.6g}", "annotation": r.text}
        for i, r in enumerate(ranked)
    ]
    _emit(args, rows, RANK_CSV_COLUMNS)
    return 0


def cmd_heatmap(args) -> int:
    store = _load_store(args)
    model, texts = _trained_model(store, args.order, args.lam)
    scored = [
        (corpus_lm.perplexity(model, corpus_lm.normalize(t)), t) for t in texts
    ]
    keywords = [k.strip() for k in args.keywords.split(",") if k.strip()]
    if args.edges:
        edges = tuple(float(e) for e in args.edges.split(","))
        spec = analysis.HeatmapSpec(keywords=tuple(keywords), bucket_edges=edges)
    else:
        values = [p for p, _ in scored]
        low = min(values) * 0.999
        high = max(values) * 1.001
        spec = analysis.HeatmapSpec.log_spaced(keywords, low, high, args.buckets)
    heatmap = analysis.keyword_heatmap(scored, spec)
    for keyword in heatmap.missing_keywords:
        print(f"keyword {keyword!r} never occurs", file=sys.stderr)
    rows = []
    for i, keyword in enumerate(spec.keywords):
        for b in range(spec.bucket_count):
            rows.append(
                {
                    "keyword": keyword,
                    "occurrences": heatmap.occurrences[i],
                    "bucket_index": b,
                    "range_low": f"{spec.bucket_edges[b]:.6g}",
                    "range_high": f"{spec.bucket_edges[b + 1]:.6g}",
                    "fraction": f"{heatmap.matrix[i, b]:.6g}",
                }
            )
    _emit(args, rows, HEATMAP_CSV_COLUMNS)
    return 0


def read_events_csv(path: str | Path) -> list[analysis.AnnotationEvent]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            analysis.AnnotationEvent(
                seq=int(row["seq"]),
                timestamp=float(row["timestamp"]),
                entry_id=int(row["entry_id"]),
                text=row["text"],
                strategy=row["strategy"],
            )
            for row in reader
        ]


def write_events_csv(path: str | Path, events) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=EVENTS_CSV_COLUMNS)
        writer.writeheader()
        for e in events:
            writer.writerow(
                {
                    "seq": e.seq,
                    "timestamp": e.timestamp,
                    "entry_id": e.entry_id,
                    "strategy": e.strategy,
                    "text": e.text,
                }
            )


def _timeline_rows(points) -> list[dict]:
    return [
        {
            "event_count": p.event_count,
            "mean_mppl": f"{p.mean_mppl:.6g}",
            "std_mppl": f"{p.std_mppl:.6g}",
        }
        for p in points
    ]


def cmd_timeline(args) -> int:
    events = read_events_csv(args.events)
    points = analysis.perplexity_timeline(events, args.cadence, order=args.order, lam=args.lam)
    _emit(args, _timeline_rows(points), TIMELINE_CSV_COLUMNS)
    return 0


def cmd_simulate(args) -> int:
    if args.config:
        config = _simulation_config_from_file(args.config, args.seed)
    elif args.reference:
        config = sim.reference_config(seed=args.seed)
    else:
        print("pass --reference or --config", file=sys.stderr)
        return 2
    result = sim.simulate(config)
    if args.events_out:
        write_events_csv(args.events_out, result.events)
    if args.timeline_out:
        with open(args.timeline_out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=TIMELINE_CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(_timeline_rows(result.timeline))
    summary = {
        "seed": config.seed,
        "events": config.total_events,
        "motions": config.motion_count,
        "switch_event": config.switch_event,
        "final_mean_mppl": result.timeline[-1].mean_mppl if result.timeline else None,
        "final_std_mppl": result.timeline[-1].std_mppl if result.timeline else None,
    }
    if config.switch_event is not None and result.timeline:
        try:
            at_switch = result.timeline_point_at(config.switch_event)
            summary["std_at_switch"] = at_switch.std_mppl
            if at_switch.std_mppl:
                summary["std_reduction"] = (
                    1.0 - result.timeline[-1].std_mppl / at_switch.std_mppl
                )
        except KeyError:
            pass
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _simulation_config_from_file(path: str, seed: int) -> sim.SimulationConfig:
    data = json.loads(Path(path).read_text())
    categories = tuple(
        sim.MotionCategory(
            name=c["name"],
            motion_count=int(c["motion_count"]),
            templates=tuple(c["templates"]),
        )
        for c in data["categories"]
    )
    return sim.SimulationConfig(
        categories=categories,
        total_events=int(data["total_events"]),
        recompute_every=int(data["recompute_every"]),
        switch_event=data.get("switch_event"),
        error_rate=float(data.get("error_rate", 0.0)),
        seed=int(data.get("seed", seed)),
        slots={k: tuple(v) for k, v in data.get("slots", {}).items()},
        error_templates=tuple(data.get("error_templates", ())),
    )


def cmd_export(args) -> int:
    store = MotionStore.load(args.store)
    data = store.export_dataset(args.release_date)
    Path(args.out).write_bytes(data)
    print(f"wrote {len(data)} bytes to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
