"""Rule-based tagging of failed episodes with their likely causes."""
from __future__ import annotations

from collections import Counter

CAUSES = (
    "Incorrect Detection",
    "Detection Missed",
    "Reasoning Failure",
    "Incorrect Human Info",
    "SLAM Failure",
    "Planner/Controller Failure",
)
DEFAULT_CAUSE = "Reasoning Failure"


def _tag(event: dict, goal: str | None) -> str | None:
    kind = event.get("kind")
    if kind in ("false_sign_read", "false_goal", "nobody_here"):
        return "Incorrect Detection"
    if kind == "label_read":
        value = event.get("response", "").split(";")[0].strip()
        if value not in ("-1", "-2") and value != event.get("truth"):
            return "Incorrect Detection"
        return None
    if kind == "label_not_detected":
        if event.get("visible") and (goal is None or event.get("truth") == goal):
            return "Detection Missed"
        return None
    if kind in ("visited_choice", "policy_failure", "parse_error"):
        return "Reasoning Failure"
    if kind == "note" and event.get("truth_ok") is False:
        return "Incorrect Human Info"
    if kind == "slam_drift":
        return "SLAM Failure"
    if kind == "unreachable":
        return "Planner/Controller Failure"
    if kind == "moved" and event.get("collided"):
        return "Planner/Controller Failure"
    if kind == "end" and event.get("reason") == "collision":
        return "Planner/Controller Failure"
    return None


def classify_failure(event_log: list[dict], goal: str | None = None, top: int = 3) -> list[str]:
    """Up to ``top`` causes ranked by how many logged events point at each.

    Ties keep the taxonomy order.  A log with no tagged event is put down to
    reasoning, the residual cause.
    """
    counts = Counter()
    for ev in event_log:
        tag = _tag(ev, goal)
        if tag is not None:
            counts[tag] += 1
    if not counts:
        return [DEFAULT_CAUSE]
    ranked = sorted(counts, key=lambda c: (-counts[c], CAUSES.index(c)))
    return ranked[:top]
