"""The sense, abstract, choose, execute loop for one navigation episode."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from ..frontier import extract_frontiers
from ..policy import (
    Exhausted,
    HttpTransport,
    LLMClient,
    PolicyConfig,
    PolicyFailure,
    build_prompt,
    choose_closest,
    choose_oracle,
    choose_random,
    llm_choose,
    planner_view,
)
from ..primitives import EpisodeAbort, EpisodeContext, SensingConfig, execute
from ..render import encode_image, render_map
from ..world.types import Scenario
from .failures import classify_failure

# offline planners without a model still pay a small decision cost, so the
# clock advances on every iteration
DECISION_COST = 0.5
MAX_STEPS = 1000


@dataclass
class EpisodeResult:
    success: bool
    duration: float
    distance: float
    steps: int
    event_log: list[dict]
    failure_causes: list[str]
    seed: int
    config: dict
    scenario: str = ""
    goal: str = ""
    end_reason: str = ""

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("event_log")
        return d


def _norm(v):
    if isinstance(v, float):
        if not math.isfinite(v):
            return None
        r = round(v, 6)
        return 0.0 if r == 0 else r
    if isinstance(v, dict):
        return {k: _norm(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_norm(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return _norm(float(v))
    return v


def event_log_jsonl(events: list[dict]) -> str:
    """One JSON object per line, floats rounded to 1e-6 so the text is stable."""
    return "".join(json.dumps(_norm(e), sort_keys=False) + "\n" for e in events)


def run_episode(
    scenario: Scenario,
    policy_config: PolicyConfig,
    seed: int,
    sensing: SensingConfig | None = None,
    transport=None,
    out_dir=None,
    save_images: bool = False,
    max_steps: int = MAX_STEPS,
) -> EpisodeResult:
    """Run one episode; every failure mode ends up in the result, not as an exception.

    ``transport`` overrides the HTTP transport of the llm planner (for
    instance a replay transport).  With ``out_dir`` the event log, the
    result and optionally per-step map images are written there.
    """
    cfg = policy_config
    sensing = replace(sensing or SensingConfig(), include_signs_people=cfg.include_signs_people)
    ctx = EpisodeContext(scenario, np.random.default_rng(seed), sensing)
    planner_rng = np.random.default_rng([seed, 1])
    client = None
    if cfg.planner == "llm":
        tr = transport or HttpTransport(cfg.llm_endpoint, cfg.model, cfg.timeout)
        client = LLMClient(tr, cfg.max_retries)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    costs = scenario.clock_costs
    ctx.log("start", scenario=scenario.name, goal=ctx.goal_text, seed=seed, planner=cfg.planner)
    end = None
    success = False
    steps = 0
    try:
        ctx.scan_360()
    except EpisodeAbort as e:
        end = e.reason

    while end is None:
        if ctx.clock > scenario.time_limit:
            end = "timeout"
            break
        if steps >= max_steps:
            end = "step_limit"
            break
        frontiers = extract_frontiers(ctx.grid, ctx.mask)
        ctx.bank.refresh_frontiers(frontiers)
        view = planner_view(ctx.bank, cfg)
        image = None
        if (cfg.planner == "llm" and cfg.include_map_image) or save_images:
            img = render_map(ctx.grid, ctx.bank, ctx.believed_pose)
            image = encode_image(img, "png")
            if save_images and out is not None:
                (out / f"step_{steps:04d}.png").write_bytes(image)
        try:
            if cfg.planner in ("llm", "oracle"):
                ctx.charge(costs.vlm_call, "vlm_choose")
            else:
                ctx.charge(DECISION_COST, "decision")
            if cfg.planner == "oracle":
                choice = choose_oracle(
                    view, scenario, ctx.goal, pose=ctx.believed_pose, use_ground_truth=cfg.include_json
                )
            elif cfg.planner == "closest":
                choice = choose_closest(view, ctx.believed_pose)
            elif cfg.planner == "random":
                choice = choose_random(view, planner_rng)
            else:
                goal_text = ctx.goal_text if ctx.goal_text is not None else "None"
                bundle = build_prompt(ctx.bank, image, goal_text, cfg)
                choice = llm_choose(client, bundle, view)
        except Exhausted:
            end = "exhausted"
            break
        except PolicyFailure as e:
            ctx.log("policy_failure", errors=e.errors)
            end = "policy_failure"
            break
        steps += 1
        lm = ctx.bank[choice.landmark_index]
        ctx.log("choice", step=steps, index=lm.index, category=lm.category, rationale=choice.rationale)
        if lm.visited:
            ctx.log("visited_choice", index=lm.index)
            continue
        try:
            outcome = execute(ctx, lm)
        except EpisodeAbort as e:
            end = e.reason
            break
        if outcome.kind == "goal_found":
            door = next((d for d in scenario.doors if d.id == lm.truth), None)
            true_label = door.label_text if door is not None else None
            if true_label != ctx.goal:
                ctx.log("false_goal", index=lm.index, read=outcome.detail, truth=true_label)
                end = "false_goal"
            elif ctx.clock <= scenario.time_limit:
                success = True
                end = "goal_found"
            else:
                end = "timeout"
            break

    ctx.log("end", reason=end, success=success, clock=ctx.clock, distance=ctx.distance)
    causes = [] if success else classify_failure(ctx.events, ctx.goal)
    result = EpisodeResult(
        success=success,
        duration=ctx.clock,
        distance=ctx.distance,
        steps=steps,
        event_log=ctx.events,
        failure_causes=causes,
        seed=seed,
        config=asdict(cfg),
        scenario=scenario.name,
        goal=scenario.goal.text,
        end_reason=end,
    )
    if out is not None:
        (out / "event_log.jsonl").write_text(event_log_jsonl(ctx.events), encoding="utf-8")
        (out / "result.json").write_text(json.dumps(_norm(result.summary()), indent=2) + "\n", encoding="utf-8")
        final = render_map(ctx.grid, ctx.bank, ctx.believed_pose, trajectory=ctx.trajectory)
        (out / "final_map.png").write_bytes(encode_image(final, "png"))
        (out / "bank.json").write_text(ctx.bank.to_json() + "\n", encoding="utf-8")
    return result

