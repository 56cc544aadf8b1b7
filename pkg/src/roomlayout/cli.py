"""Command-line surface: generate, optimize, metrics, render, replay.

generate runs the whole pipeline (language phase, staged solve, metrics,
floorplan) and writes the artifact set into the output directory:

    graph.json       constraint graph before optimization
    layout.json      graph plus placements
    report.json      solve reports, diagnostics, taxonomy counts, timings
    metrics.json     pathway / overlap / out-of-bounds scores
    floorplan.svg    rendered plan
    transcript.jsonl language-phase record for offline replay

Timings live only in report.json, so layout.json and floorplan.svg are
byte-identical across reruns with the same config and fixtures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .config import (
    ABLATION_NAMES,
    ConfigError,
    RunConfig,
    build_config,
    parse_config_file,
)
from .llmio import (
    BriefRequest,
    HttpProvider,
    Provider,
    RecordingProvider,
    ReplayProvider,
    StageFailure,
    TranscriptStore,
    elicit_graph,
)
from .metrics import compute_metrics
from .renderer import RenderOptions, render_svg
from .scene import LayoutGraph, Placement, layout_from_dict, layout_to_dict, graph_to_dict, graph_from_dict, validate_graph
from .solver import PipelineResult, run_pipeline

SCHEMA_REPORT = "roomlayout/report-v1"
SCHEMA_METRICS = "roomlayout/metrics-v1"

TAXONOMY = (
    "Language",
    "Cleaning",
    "Translation",
    "Contradictory Constraint",
    "Optimization",
)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _taxonomy_counts(diagnostics: Sequence[dict]) -> dict[str, int]:
    counts = {name: 0 for name in TAXONOMY}
    for d in diagnostics:
        cat = d.get("category")
        if cat in counts:
            counts[cat] += 1
    return counts


def _placement_list(graph: LayoutGraph, placements: dict[int, Placement]) -> list:
    return [placements.get(i) for i in range(len(graph.objects))]


def make_provider(config: RunConfig) -> tuple[Provider, TranscriptStore]:
    """Replay provider when fixtures are configured, live HTTP otherwise;
    either way the run records its own transcript."""
    store = TranscriptStore()
    if config.fixtures is not None:
        base: Provider = ReplayProvider(TranscriptStore.load(config.fixtures))
    else:
        base = HttpProvider(model=config.model, base_url=config.base_url)
    return RecordingProvider(base, store), store


def _write_report(
    out: Path,
    config: RunConfig,
    diagnostics: list,
    result: Optional[PipelineResult],
    timings: dict[str, float],
    room_style: Optional[str] = None,
    failed_stage: Optional[str] = None,
) -> None:
    payload = {
        "schema": SCHEMA_REPORT,
        "config": config.describe(),
        "diagnostics": diagnostics,
        "error_counts": _taxonomy_counts(diagnostics),
        "timings_s": {k: round(v, 3) for k, v in timings.items()},
        "stages": [r.to_dict() for r in result.reports] if result else [],
        "single_stage": config.no_hierarchy,
        "room_style": room_style,
    }
    if failed_stage is not None:
        payload["failed_stage"] = failed_stage
    _write_json(out / "report.json", payload)


def cmd_generate(config: RunConfig) -> int:
    config.validate(needs_language_phase=True)
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    provider, store = make_provider(config)
    brief = BriefRequest(prompt=config.prompt, seed=config.seed)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    try:
        elicited = elicit_graph(provider, brief, clean=not config.no_cleaning)
    except StageFailure as err:
        timings["language"] = time.perf_counter() - t0
        store.save(out / "transcript.jsonl")
        diagnostics = [
            {"category": "Language", "stage": err.stage, "error": str(err)}
        ]
        _write_report(out, config, diagnostics, None, timings, failed_stage=err.stage)
        print(f"error: {err}", file=sys.stderr)
        return 1
    timings["language"] = time.perf_counter() - t0

    store.save(out / "transcript.jsonl")
    graph = elicited.graph
    diagnostics = list(elicited.diagnostics)
    for issue in validate_graph(graph):
        diagnostics.append({"category": "Language", "stage": "graph", "error": issue})
    _write_json(out / "graph.json", graph_to_dict(graph))

    t0 = time.perf_counter()
    result = run_pipeline(graph, config.solve_options())
    timings["solve"] = time.perf_counter() - t0
    diagnostics += result.diagnostics
    _write_json(out / "layout.json", layout_to_dict(graph, _placement_list(graph, result.placements)))

    t0 = time.perf_counter()
    report = compute_metrics(graph, result.placements)
    timings["metrics"] = time.perf_counter() - t0
    _write_json(out / "metrics.json", {"schema": SCHEMA_METRICS, **report.to_dict()})

    t0 = time.perf_counter()
    svg = render_svg(
        graph,
        result.placements,
        metrics=report,
        options=RenderOptions(scale=config.scale, layers=config.layers, palette=config.palette),
    )
    (out / "floorplan.svg").write_text(svg)
    timings["render"] = time.perf_counter() - t0

    _write_report(out, config, diagnostics, result, timings, room_style=elicited.room_style)
    print(report.table())
    return 0


def cmd_optimize(config: RunConfig, graph_path: Path) -> int:
    config.validate(needs_language_phase=False)
    graph = graph_from_dict(json.loads(graph_path.read_text()))
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    result = run_pipeline(graph, config.solve_options())
    timings["solve"] = time.perf_counter() - t0
    _write_json(out / "layout.json", layout_to_dict(graph, _placement_list(graph, result.placements)))
    _write_report(out, config, list(result.diagnostics), result, timings)
    print(f"solved {len(result.placements)} objects -> {out / 'layout.json'}")
    return 0


def cmd_metrics(layout_path: Path, out_path: Optional[Path]) -> int:
    graph, placements = layout_from_dict(json.loads(layout_path.read_text()))
    placed = {i: p for i, p in enumerate(placements) if p is not None}
    report = compute_metrics(graph, placed)
    if out_path is not None:
        _write_json(out_path, {"schema": SCHEMA_METRICS, **report.to_dict()})
    print(report.table())
    return 0


def cmd_render(config: RunConfig, layout_path: Path, out_path: Optional[Path]) -> int:
    config.validate(needs_language_phase=False)
    graph, placements = layout_from_dict(json.loads(layout_path.read_text()))
    placed = {i: p for i, p in enumerate(placements) if p is not None}
    svg = render_svg(
        graph,
        placed,
        options=RenderOptions(scale=config.scale, layers=config.layers, palette=config.palette),
    )
    target = out_path if out_path is not None else layout_path.with_name("floorplan.svg")
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(svg)
    print(f"wrote {target}")
    return 0


def cmd_replay(config: RunConfig, transcript_path: Path) -> int:
    return cmd_generate(dataclasses.replace(config, fixtures=transcript_path))


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roomlayout",
        description="Constraint-based interior layout generation.",
    )
    parser.add_argument("--config", type=Path, help="key = value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--prompt", help="room brief text")
        p.add_argument("--seed", type=int, help="master random seed")
        p.add_argument("--fixtures", type=Path, help="language transcript to replay")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--restarts", type=int, help="solver restarts per stage")
        p.add_argument(
            "--ablate",
            action="append",
            choices=ABLATION_NAMES,
            default=None,
            help="enable an ablation (repeatable)",
        )
        p.add_argument("--layers", help="comma-separated render layers")

    gen = sub.add_parser("generate", help="full pipeline from a brief")
    common(gen)

    opt = sub.add_parser("optimize", help="re-solve an existing graph.json")
    common(opt)
    opt.add_argument("graph", type=Path)

    met = sub.add_parser("metrics", help="score an existing layout.json")
    met.add_argument("layout", type=Path)
    met.add_argument("--out", type=Path, help="write metrics.json here")

    ren = sub.add_parser("render", help="draw an existing layout.json")
    common(ren)
    ren.add_argument("layout", type=Path)
    ren.add_argument("--svg", type=Path, help="output SVG path")

    rep = sub.add_parser("replay", help="re-run the pipeline from a transcript")
    common(rep)
    rep.add_argument("transcript", type=Path)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = parse_config_file(args.config) if args.config else None
    overrides: dict = {}
    for key in ("prompt", "seed", "fixtures", "out", "restarts"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if getattr(args, "layers", None):
        overrides["layers"] = frozenset(
            part.strip() for part in args.layers.split(",") if part.strip()
        )
    drops = set()
    for name in getattr(args, "ablate", None) or ():
        if name == "no_hierarchy":
            overrides["no_hierarchy"] = True
        elif name == "no_cleaning":
            overrides["no_cleaning"] = True
        else:
            drops.add(name.removeprefix("drop_"))
    if drops:
        overrides["drop_costs"] = frozenset(drops)
    return build_config(file_values, overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "metrics":
            return cmd_metrics(args.layout, args.out)
        config = _config_from_args(args)
        if args.command == "generate":
            return cmd_generate(config)
        if args.command == "optimize":
            return cmd_optimize(config, args.graph)
        if args.command == "render":
            return cmd_render(config, args.layout, args.svg)
        if args.command == "replay":
            return cmd_replay(config, args.transcript)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
