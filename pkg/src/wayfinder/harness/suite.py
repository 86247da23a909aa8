"""Ablation suite over a set of scenarios: per-episode CSV and a Markdown table."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from ..policy import PolicyConfig
from ..primitives import SensingConfig
from ..world.types import Scenario
from .episode import EpisodeResult, event_log_jsonl, run_episode
from .hospital import build_hospital
from .metrics import FAIL_DISTANCE, FAIL_DURATION, Metrics, metrics_table

SUITE_CONFIGS: dict[str, PolicyConfig] = {
    "Ours": PolicyConfig("oracle"),
    "No Signs/People": PolicyConfig("oracle", include_signs_people=False),
    "No Map Image": PolicyConfig("oracle", include_map_image=False),
    "No VLM (closest)": PolicyConfig("closest"),
    "No VLM (random)": PolicyConfig("random"),
    "No JSON": PolicyConfig("oracle", include_json=False),
}
DEFAULT_EPISODES = 14
CSV_FIELDS = (
    "config",
    "episode",
    "scenario",
    "seed",
    "goal",
    "success",
    "duration",
    "distance",
    "steps",
    "end_reason",
    "failure_causes",
)


@dataclass
class SuiteReport:
    table: dict[str, Metrics]
    results: dict[str, list[EpisodeResult]]
    csv_text: str
    markdown: str


def hospital_suite(episodes: int = DEFAULT_EPISODES, first_seed: int = 0) -> list[Scenario]:
    return [build_hospital(first_seed + i) for i in range(episodes)]


def results_csv(results: dict[str, list[EpisodeResult]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for name, rs in results.items():
        for i, r in enumerate(rs):
            w.writerow(
                [
                    name,
                    i,
                    r.scenario,
                    r.seed,
                    r.goal,
                    int(r.success),
                    f"{r.duration:.3f}",
                    f"{r.distance:.3f}",
                    r.steps,
                    r.end_reason,
                    ";".join(r.failure_causes),
                ]
            )
    return buf.getvalue()


def markdown_table(table: dict[str, Metrics], results: dict[str, list[EpisodeResult]] | None = None) -> str:
    lines = [
        "| Method | Success Rate (%) | Avg Duration (s) | Avg Distance (m) | Episodes |",
        "|---|---:|---:|---:|---:|",
    ]
    for name, m in table.items():
        lines.append(f"| {name} | {m.success_rate:.2f} | {m.avg_duration:.2f} | {m.avg_distance:.2f} | {m.episodes} |")
    if results:
        lines += ["", "Top failure causes (count of episodes listing each among its top 3):", ""]
        for name, rs in results.items():
            counts: dict[str, int] = {}
            for r in rs:
                for c in r.failure_causes:
                    counts[c] = counts.get(c, 0) + 1
            if counts:
                parts = ", ".join(f"{c} {n}" for c, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
                lines.append(f"- {name}: {parts}")
    lines += [
        "",
        f"Failed episodes count as {FAIL_DURATION:.0f} s and {FAIL_DISTANCE:.0f} m. Durations are simulated "
        "clock time with a fixed charge per model call, so they compare configurations, not wall-clock latency.",
    ]
    return "\n".join(lines) + "\n"


def run_ablation_suite(
    scenarios: list[Scenario],
    seeds: list[int],
    configs: dict[str, PolicyConfig] | None = None,
    sensing: SensingConfig | None = None,
    out_dir=None,
) -> SuiteReport:
    """Run every configuration on every (scenario, seed) pair.

    With ``out_dir``, writes ``results.csv``, ``report.md`` and one event
    log per episode under ``logs/``.
    """
    if len(scenarios) != len(seeds):
        raise ValueError("need one seed per scenario")
    configs = configs or SUITE_CONFIGS
    out = Path(out_dir) if out_dir is not None else None
    results: dict[str, list[EpisodeResult]] = {}
    for name, cfg in configs.items():
        rs = []
        for i, (sc, seed) in enumerate(zip(scenarios, seeds)):
            r = run_episode(sc, cfg, seed, sensing=sensing)
            rs.append(r)
            if out is not None:
                logs = out / "logs"
                logs.mkdir(parents=True, exist_ok=True)
                slug = name.lower().replace(" ", "_").replace("/", "_").replace("(", "").replace(")", "")
                (logs / f"{slug}_{i:02d}.jsonl").write_text(event_log_jsonl(r.event_log), encoding="utf-8")
        results[name] = rs
    table = metrics_table(results)
    report = SuiteReport(table, results, results_csv(results), markdown_table(table, results))
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(report.csv_text, encoding="utf-8")
        (out / "report.md").write_text(report.markdown, encoding="utf-8")
    return report
