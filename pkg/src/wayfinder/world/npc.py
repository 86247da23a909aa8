"""Scripted NPC replies for the three interaction types."""
from __future__ import annotations

import math
import re

from .types import NpcSpec, Pose, Scenario, wrap_angle

REFUSAL = "Sorry, I don't know the answer to that question."

# relative-direction phrases, also parsed back by the note writer
PHRASES = {
    "forward": "straight ahead",
    "left": "on your left",
    "right": "on your right",
    "backwards": "behind you",
}


def relative_quadrant(robot: Pose, x: float, y: float) -> str:
    """Bin the bearing to (x, y) relative to the robot heading into four
    quadrants with boundaries at +-45 and +-135 degrees."""
    rel = wrap_angle(math.atan2(y - robot.y, x - robot.x) - robot.yaw)
    a = abs(rel)
    if a <= math.pi / 4:
        return "forward"
    if a >= 3 * math.pi / 4:
        return "backwards"
    return "left" if rel > 0 else "right"


def _coarse_distance(d: float) -> int:
    return max(5, int(5 * round(d / 5.0)))


def _room_number(goal: str | None) -> str | None:
    if goal is None:
        return None
    m = re.search(r"\b(\d{3,5})\b", goal)
    return m.group(1) if m else None


def npc_respond(
    npc: NpcSpec, interaction_type: int, goal: str | None, robot_pose: Pose, scenario: Scenario
) -> str:
    """Reply of ``npc`` to a question of the given type.

    1: "How can I help you?" -> a delivery request for the scenario goal.
    2: "Do you know where <goal> is?" -> relative directions or refusal.
    3: "Do you know which room # <goal> is in?" -> a room number or refusal.
    """
    if interaction_type not in (1, 2, 3):
        raise ValueError(f"interaction type must be 1, 2 or 3, got {interaction_type!r}")
    if interaction_type == 1:
        return f"Hi! Could you please take this to {scenario.goal.text}?"
    if interaction_type == 3:
        if npc.knows_directory and goal in scenario.directory:
            return f"{goal} is in Room {scenario.directory[goal]}."
        return REFUSAL

    room = _room_number(goal)
    if room is None and goal in scenario.directory and npc.knows_directory:
        room = scenario.directory[goal]
    door = scenario.door_for_room(room) if room is not None else None
    if door is None:
        return REFUSAL
    where = PHRASES[relative_quadrant(robot_pose, door.x, door.y)]
    if room in npc.known_rooms:
        dist = _coarse_distance(robot_pose.distance_to(door.x, door.y))
        return f"Room {room} is {where}, about {dist} meters away."
    if room in npc.approx_rooms:
        return f"I think Room {room} is somewhere {where}."
    return REFUSAL
