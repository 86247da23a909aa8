"""Prompt assembly, response parsing and the offline landmark planners."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ..memory import MemoryBank
from ..primitives import cardinal_vector
from ..world.types import Pose, Scenario
from . import prompts

PLANNERS = ("llm", "oracle", "closest", "random")


@dataclass(frozen=True)
class PolicyConfig:
    planner: str = "oracle"
    include_signs_people: bool = True
    include_map_image: bool = True
    include_json: bool = True
    llm_endpoint: str | None = None
    model: str = "gpt-4o"
    timeout: float = 30.0
    max_retries: int = 2

    def __post_init__(self):
        if self.planner not in PLANNERS:
            raise ValueError(f"planner must be one of {PLANNERS}, got {self.planner!r}")
        if self.planner == "llm" and not self.llm_endpoint:
            raise ValueError("the llm planner needs an endpoint")
        if self.planner not in ("closest", "random") and not (self.include_map_image or self.include_json):
            raise ValueError("at least one of the map image and the JSON must be included")
        if self.max_retries < 0 or self.timeout <= 0:
            raise ValueError("max_retries must be >= 0 and timeout positive")


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    instruction_text: str
    map_image: bytes | None
    landmark_json: str | None
    bank: MemoryBank | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Choice:
    landmark_index: int
    rationale: str = ""


class Exhausted(Exception):
    """No unvisited landmark is left to choose."""


class ParseError(ValueError):
    pass


class NoIndex(ParseError):
    pass


class UnknownIndex(ParseError):
    pass


class VisitedIndex(ParseError):
    pass


def planner_view(bank: MemoryBank, config: PolicyConfig) -> MemoryBank:
    """The bank as the configured planner is allowed to see it."""
    view = bank if config.include_signs_people else bank.without_categories("sign", "person")
    if not config.include_json:
        view = view.without_memory()
    return view


def build_prompt(bank: MemoryBank, map_image: bytes | None, goal: str, config: PolicyConfig) -> PromptBundle:
    if not config.include_signs_people:
        bank = bank.without_categories("sign", "person")
    doc = bank.to_json() if config.include_json else None
    text = prompts.fill(prompts.CHOOSE_LANDMARK, target=goal, vlm_keypt_dict=doc if doc is not None else "")
    image = map_image if config.include_map_image else None
    return PromptBundle(prompts.SYSTEM, text, image, doc, bank)


_BRACKET = re.compile(r"\[\s*(-?\d+)\s*\]")


def parse_choice(response: str, bank: MemoryBank) -> Choice:
    """The last bracketed integer is the answer; the text before it the rationale."""
    matches = list(_BRACKET.finditer(response))
    if not matches:
        raise NoIndex(f"no bracketed landmark index in response {response[:80]!r}")
    m = matches[-1]
    idx = int(m.group(1))
    if idx not in bank:
        raise UnknownIndex(f"landmark {idx} does not exist")
    if bank[idx].visited:
        raise VisitedIndex(f"landmark {idx} was already visited")
    return Choice(idx, response[: m.start()].strip())


def format_choice(index: int, rationale: str = "") -> str:
    return f"{rationale}; Chosen landmark: [{index}]" if rationale else f"Chosen landmark: [{index}]"


def _unvisited(bank: MemoryBank):
    cands = bank.unvisited()
    if not cands:
        raise Exhausted("no unvisited landmarks")
    return cands


def _nearest(cands, x: float, y: float):
    return min(cands, key=lambda lm: (math.hypot(lm.position[0] - x, lm.position[1] - y), lm.index))


def choose_closest(bank: MemoryBank, pose: Pose) -> Choice:
    lm = _nearest(_unvisited(bank), pose.x, pose.y)
    return Choice(lm.index, "closest unvisited landmark")


def choose_random(bank: MemoryBank, rng_seed) -> Choice:
    """Uniform over unvisited landmarks; ``rng_seed`` is a seed or a Generator."""
    cands = sorted(_unvisited(bank), key=lambda lm: lm.index)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    lm = cands[int(rng.integers(len(cands)))]
    return Choice(lm.index, "random unvisited landmark")


# -- oracle ------------------------------------------------------------------

_RANGE = re.compile(r"(\d+)\s*-\s*(\d+)")
_NUMBER = re.compile(r"\d+")
_NOTE_DIR = re.compile(
    r"Room (\d+) is (?:somewhere )?to the (North-East|North-West|South-East|South-West|North|South|East|West)"
)
CONE = math.radians(60)


def text_covers(text: str, room: str) -> bool:
    """Does a sign entry such as "Consultation 3008-3017" or "3012" cover ``room``?"""
    if not room.isdigit():
        return False
    n = int(room)
    for a, b in _RANGE.findall(text):
        if int(a) <= n <= int(b):
            return True
    stripped = _RANGE.sub(" ", text)
    return any(int(t) == n for t in _NUMBER.findall(stripped))


def direction_hints(bank: MemoryBank, goal: str | None) -> list[tuple[tuple[float, float], str]]:
    """(source position, compass bin) pairs pointing toward the goal room."""
    if goal is None:
        return []
    hints = []
    for lm in sorted(bank.landmarks.values(), key=lambda lm: lm.index):
        if lm.category == "sign" and lm.directions is not None:
            for b in lm.directions.nonempty():
                if any(text_covers(t, goal) for t in lm.directions[b]):
                    hints.append((lm.position, b))
        elif lm.category == "person" and lm.info:
            for room, b in _NOTE_DIR.findall(lm.info):
                if room == goal:
                    hints.append((lm.position, b))
    return hints


def choose_oracle(
    bank: MemoryBank,
    scenario: Scenario,
    goal: str | None,
    recorded_info=None,
    pose: Pose | None = None,
    use_ground_truth: bool = True,
) -> Choice:
    """Rule-based stand-in for an ideal reasoner.

    In order: the goal door if it is already a landmark; the landmark
    farthest along a compass bin that a sign or note says leads to the goal;
    the nearest unvisited sign or person; the nearest frontier; the nearest
    anything.  ``recorded_info`` is extra hint text (person notes kept
    outside the bank); ``use_ground_truth=False`` disables the first rule.
    """
    cands = _unvisited(bank)
    px, py = (pose.x, pose.y) if pose is not None else scenario.start_pose.xy
    if use_ground_truth and goal is not None:
        goal_door = scenario.door_for_room(goal)
        if goal_door is not None:
            doors = [lm for lm in cands if lm.category == "door" and lm.truth == goal_door.id]
            if doors:
                lm = _nearest(doors, px, py)
                return Choice(lm.index, f"door {lm.index} is the goal door")

    hints = direction_hints(bank, goal)
    for room, b in _NOTE_DIR.findall(recorded_info or ""):
        if room == goal:
            hints.append(((px, py), b))
    social = [lm for lm in cands if lm.category in ("sign", "person")]
    if hints:
        src, b = min(hints, key=lambda h: (math.hypot(h[0][0] - px, h[0][1] - py), h[1]))
        # a sign or person nearer than the hint source knows its own area better
        if social:
            near = _nearest(social, px, py)
            if math.hypot(near.position[0] - px, near.position[1] - py) < math.hypot(src[0] - px, src[1] - py):
                return Choice(near.index, f"{near.category} {near.index} is closer than the hint source")
        vx, vy = cardinal_vector(b)
        best = None
        for cats in (("frontier",), ("door",)):
            for lm in cands:
                if lm.category not in cats:
                    continue
                dx, dy = lm.position[0] - src[0], lm.position[1] - src[1]
                d = math.hypot(dx, dy)
                if d < 1e-9:
                    continue
                proj = dx * vx + dy * vy
                if proj < d * math.cos(CONE):
                    continue
                key = (-proj, lm.index) if cats == ("frontier",) else (math.hypot(lm.position[0] - px, lm.position[1] - py), lm.index)
                if best is None or key < best[0]:
                    best = (key, lm)
            if best is not None:
                return Choice(best[1].index, f"landmark {best[1].index} lies {b} of the hint source")

    if social:
        lm = _nearest(social, px, py)
        return Choice(lm.index, f"nearest unvisited {lm.category}")
    frontiers = [lm for lm in cands if lm.category == "frontier"]
    if frontiers:
        lm = _nearest(frontiers, px, py)
        return Choice(lm.index, "nearest frontier")
    lm = _nearest(cands, px, py)
    return Choice(lm.index, f"nearest unvisited {lm.category}")
