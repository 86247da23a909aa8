"""Command line entry point: ``wayfinder run|suite|gen-hospital|render|validate``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .harness import (
    DEFAULT_EPISODES,
    SUITE_CONFIGS,
    generate_hospital,
    hospital_suite,
    run_ablation_suite,
    run_episode,
)
from .mapping import FREE, OCCUPIED, OccupancyGrid
from .memory import MemoryBank
from .policy import PolicyConfig, ReplayTransport
from .policy.llm import ENDPOINT_ENV
from .policy.planners import PLANNERS
from .render import encode_image, render_map
from .world import ScenarioError, load_scenario_file


def _ground_truth_grid(scenario) -> OccupancyGrid:
    h, w = scenario.grid.shape
    g = OccupancyGrid(scenario.resolution, scenario.origin, (h, w))
    g.cells = np.where(scenario.walls, OCCUPIED, FREE).astype(np.int8)
    return g


def _policy(args) -> PolicyConfig:
    endpoint = args.endpoint or os.environ.get(ENDPOINT_ENV)
    return PolicyConfig(
        args.policy,
        include_signs_people=not args.no_signs_people,
        include_map_image=not args.no_map_image,
        include_json=not args.no_json,
        llm_endpoint=endpoint if args.policy == "llm" else None,
        model=args.model,
    )


def cmd_run(args) -> int:
    scenario = load_scenario_file(args.scenario)
    if args.policy == "llm" and args.replay:
        # a replay file stands in for the endpoint
        args.endpoint = args.endpoint or "replay://"
    cfg = _policy(args)
    transport = ReplayTransport.from_file(args.replay) if args.replay else None
    result = run_episode(
        scenario, cfg, args.seed, transport=transport, out_dir=args.out, save_images=args.out is not None and not args.no_images
    )
    print(json.dumps({k: v for k, v in result.summary().items() if k != "config"}, sort_keys=True))
    return 0 if result.success else 1


def cmd_suite(args) -> int:
    if args.scenarios:
        files = sorted(Path(args.scenarios).glob("*.scn"))
        if not files:
            print(f"no .scn files in {args.scenarios}", file=sys.stderr)
            return 2
        loaded = [load_scenario_file(f) for f in files]
        scenarios = [loaded[i % len(loaded)] for i in range(args.episodes)]
    else:
        scenarios = hospital_suite(args.episodes, args.first_seed)
    seeds = [args.first_seed + i for i in range(args.episodes)]
    configs = SUITE_CONFIGS
    if args.config:
        unknown = [c for c in args.config if c not in SUITE_CONFIGS]
        if unknown:
            print(f"unknown configurations {unknown}; choose from {list(SUITE_CONFIGS)}", file=sys.stderr)
            return 2
        configs = {c: SUITE_CONFIGS[c] for c in args.config}
    report_path = Path(args.report)
    out = Path(args.out) if args.out else report_path.parent
    report = run_ablation_suite(scenarios, seeds, configs, out_dir=out)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(report.markdown, encoding="utf-8")
    print(report.markdown, end="")
    return 0


def cmd_gen_hospital(args) -> int:
    text = generate_hospital(args.seed)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0


def cmd_render(args) -> int:
    scenario = load_scenario_file(args.scenario)
    bank = MemoryBank.from_json(Path(args.bank).read_text(encoding="utf-8"))
    image = render_map(_ground_truth_grid(scenario), bank, scenario.start_pose)
    fmt = "ppm" if str(args.output).lower().endswith(".ppm") else "png"
    Path(args.output).write_bytes(encode_image(image, fmt))
    return 0


def cmd_validate(args) -> int:
    try:
        s = load_scenario_file(args.scenario)
    except (ScenarioError, OSError) as e:
        print(f"invalid: {e}", file=sys.stderr)
        return 1
    h, w = s.grid.shape
    print(
        f"ok: {s.name} {w}x{h} cells, {len(s.doors)} doors, {len(s.signs)} signs, "
        f"{len(s.npcs)} people, goal {s.goal.text}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wayfinder", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one episode")
    r.add_argument("scenario")
    r.add_argument("--policy", choices=PLANNERS, default="oracle")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--no-signs-people", action="store_true")
    r.add_argument("--no-map-image", action="store_true")
    r.add_argument("--no-json", action="store_true")
    r.add_argument("--out", help="directory for the event log, result and map images")
    r.add_argument("--no-images", action="store_true", help="skip the per-step map images")
    r.add_argument("--endpoint", help=f"chat-completion URL for --policy llm (default ${ENDPOINT_ENV})")
    r.add_argument("--model", default="gpt-4o")
    r.add_argument("--replay", help="JSONL of recorded model responses for --policy llm")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", help="run the ablation suite")
    s.add_argument("--scenarios", help="directory of .scn files (default: generated hospitals)")
    s.add_argument("--episodes", type=int, default=DEFAULT_EPISODES)
    s.add_argument("--first-seed", type=int, default=0)
    s.add_argument("--report", default="report.md")
    s.add_argument("--out", help="directory for results.csv and logs (default: next to the report)")
    s.add_argument("--config", action="append", help="restrict to the named configuration (repeatable)")
    s.set_defaults(func=cmd_suite)

    g = sub.add_parser("gen-hospital", help="write a generated hospital scenario")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen_hospital)

    m = sub.add_parser("render", help="draw a landmark bank over a scenario's walls")
    m.add_argument("scenario")
    m.add_argument("bank")
    m.add_argument("-o", "--output", default="map.png")
    m.set_defaults(func=cmd_render)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as e:
        print(f"wayfinder: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
