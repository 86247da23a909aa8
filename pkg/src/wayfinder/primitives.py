"""Behavior primitives run on the chosen landmark, and the episode state they share.

Perception questions the robot would put to a vision-language model (door
numbers, sign contents, which question to ask, note writing) are answered
by simulated responders that see the ground truth.  They answer in the same
text formats the real prompts request, and the answers go through the same
parsers a live model's output would.
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .mapping import OccupancyGrid, dilate_obstacles, integrate_scan
from .memory import COMPASS, CardinalDirections, Landmark, MemoryBank, filter_detection
from .nav import (
    DEFAULT_INFLATION,
    STANDOFF,
    FollowResult,
    PlanningError,
    Unreachable,
    follow_path,
    plan_path,
    points_clear,
    reachable_from,
    standoff_pose,
)
from .world.npc import PHRASES, REFUSAL, npc_respond
from .world.sensors import Camera, DetectorModel, line_of_sight, raycast_scan, simulate_detections
from .world.types import DoorSpec, Pose, Scenario, wrap_angle

READ_DISTANCE = 0.5
READ_MAX_DISTANCE = 0.75
READ_MAX_ANGLE = math.radians(30)
PAN_ANGLES = tuple(math.radians(a) for a in (-60, -30, 0, 30, 60))
SCAN_STOPS = 8
FRAMES_PER_STOP = 3
INTERACTION_RADIUS = 2.5
SLAM_BOUND = 0.3
MAX_REPLANS = 5

_OFFSETS = {"forward": 0.0, "left": math.pi / 2, "backwards": math.pi, "right": -math.pi / 2}
# compass bin centres, counter-clockwise from East
_BIN_ANGLE = {
    "East": 0,
    "North-East": 45,
    "North": 90,
    "North-West": 135,
    "West": 180,
    "South-West": 225,
    "South": 270,
    "South-East": 315,
}


def bin_relative_to_cardinal(relative: str, heading_yaw: float) -> str:
    """Compass bin of a relative direction seen by an observer heading ``heading_yaw``.

    Exact half-way angles go to the bin listed first in North, North-East,
    East, ... order.
    """
    if relative not in _OFFSETS:
        raise ValueError(f"unknown relative direction {relative!r}")
    deg = math.degrees(heading_yaw + _OFFSETS[relative]) % 360.0
    best = None
    for name in COMPASS:
        d = abs((deg - _BIN_ANGLE[name] + 180.0) % 360.0 - 180.0)
        d = round(d, 9)
        if best is None or d < best[0]:
            best = (d, name)
    return best[1]


def cardinal_vector(bin_name: str) -> tuple[float, float]:
    a = math.radians(_BIN_ANGLE[bin_name])
    return (math.cos(a), math.sin(a))


def facing_name(yaw: float) -> str:
    return bin_relative_to_cardinal("forward", yaw)


# -- simulated perception responders --------------------------------------


@dataclass(frozen=True)
class ReadResult:
    value: str  # room number, "-1" (nothing visible) or "-2" (unreadable)
    confidence: float

    @property
    def ok(self) -> bool:
        return self.value not in ("-1", "-2")


def format_read_response(r: ReadResult) -> str:
    return f"{r.value}; {r.confidence:.2f}"


def parse_read_response(text: str) -> ReadResult:
    parts = [p.strip() for p in text.strip().split(";")]
    if len(parts) != 2:
        raise ValueError(f"malformed door-read response {text!r}")
    value = parts[0]
    if not re.fullmatch(r"-?\d+", value):
        raise ValueError(f"malformed door number {value!r}")
    return ReadResult(value, min(1.0, max(0.0, float(parts[1]))))


def parse_sign_response(text: str) -> dict[str, list[str]]:
    data = ast.literal_eval(text.strip())
    if not isinstance(data, dict):
        raise ValueError("sign response is not a dict")
    out = {}
    for k, v in data.items():
        if k not in _OFFSETS:
            raise ValueError(f"unknown sign direction {k!r}")
        out[k] = [str(t) for t in (v if isinstance(v, (list, tuple)) else [v])]
    return out


def parse_interaction_type(text: str) -> int:
    m = re.search(r"[123]", text)
    if not m:
        raise ValueError(f"no interaction type in {text!r}")
    return int(m.group(0))


def choose_interaction_type(goal: str | None, occupant_goal: bool) -> int:
    """The rule the interaction prompt spells out."""
    if goal is None:
        return 1
    return 3 if occupant_goal else 2


_PHRASE_TO_REL = {v: k for k, v in PHRASES.items()}


def write_note(reply: str, robot_yaw: float, goal: str | None) -> str:
    """Turn a person's reply into a note with compass directions."""
    if reply == REFUSAL:
        return f"Note: This person did not know where {goal} is. No information gained."
    text = reply
    for phrase, rel in _PHRASE_TO_REL.items():
        if phrase in text:
            text = text.replace(phrase, f"to the {bin_relative_to_cardinal(rel, robot_yaw)}")
    text = text.replace("I think ", "")
    return f"Note: {text}"


# -- episode state ----------------------------------------------------------


class EpisodeAbort(Exception):
    """Unrecoverable failure (collision) that ends the episode."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass
class SensingConfig:
    include_signs_people: bool = True
    ocr_error_rate: float = 0.0
    clutter_rate: float = 0.0
    pose_noise: float = 0.0
    ray_count: int = 720
    lidar_range: float = 8.0
    inflation: float = DEFAULT_INFLATION


@dataclass
class EpisodeContext:
    scenario: Scenario
    rng: np.random.Generator
    sensing: SensingConfig = field(default_factory=SensingConfig)
    camera: Camera = field(default_factory=Camera)

    def __post_init__(self):
        s = self.scenario
        self.pose = s.start_pose
        self.grid = OccupancyGrid.around(s.resolution, s.start_pose.x, s.start_pose.y, 1.0, lattice=s.origin)
        self.bank = MemoryBank()
        self.clock = 0.0
        self.distance = 0.0
        self.frame = 0
        self.events: list[dict] = []
        self.drift = (0.0, 0.0)
        self.goal: str | None = s.goal.room if s.goal.room is not None else s.goal.occupant
        self.occupant_goal = s.goal.occupant is not None
        self.detector = DetectorModel(clutter_rate=self.sensing.clutter_rate)
        self._mask = None
        self.trajectory: list[tuple[float, float]] = [s.start_pose.xy]

    # -- bookkeeping
    def log(self, kind: str, **fields) -> dict:
        entry = {"t": self.clock, "kind": kind, **fields}
        self.events.append(entry)
        return entry

    def charge(self, seconds: float, reason: str) -> None:
        if seconds < 0:
            raise ValueError("clock charges must be nonnegative")
        self.clock += seconds
        self.log("charge", seconds=seconds, reason=reason)

    @property
    def goal_text(self) -> str | None:
        if self.goal is None:
            return None
        return self.goal if self.occupant_goal else f"Room {self.goal}"

    @property
    def believed_pose(self) -> Pose:
        return Pose(self.pose.x + self.drift[0], self.pose.y + self.drift[1], self.pose.yaw)

    @property
    def mask(self) -> np.ndarray:
        if self._mask is None:
            self._mask = dilate_obstacles(self.grid, self.sensing.inflation)
        return self._mask

    # -- sensing
    def scan(self) -> None:
        sc = raycast_scan(self.scenario, self.pose, self.sensing.ray_count, self.sensing.lidar_range)
        integrate_scan(self.grid, self.believed_pose, sc)
        self._mask = None

    def detect(self, queries=None, pan: float = 0.0) -> list:
        """One camera frame: synthesize, filter and ingest detections."""
        if queries is None:
            queries = ("door", "person", "directions sign") if self.sensing.include_signs_people else ("door",)
        cam = Camera(self.camera.fov, self.camera.range, self.camera.label_range, pan)
        accepted = []
        for q in queries:
            for ev in simulate_detections(self.scenario, self.pose, cam, q, self.rng, self.frame, self.detector):
                if filter_detection(ev):
                    if self.drift != (0.0, 0.0):
                        ev = _shift(ev, self.drift)
                    accepted.append(ev)
        if any(q != "room label" for q in queries):
            promoted = self.bank.ingest_frame([e for e in accepted if e.category != "room label"], self.frame)
            for idx in promoted:
                lm = self.bank[idx]
                self.log("promoted", index=idx, category=lm.category, truth=lm.truth, position=list(lm.position))
        self.frame += 1
        return accepted

    def sense(self) -> None:
        self.scan()
        self.detect()

    def scan_360(self) -> None:
        """Turn through eight stops, scanning and running detection at each."""
        yaw0 = self.pose.yaw
        for k in range(SCAN_STOPS):
            self.pose = Pose(self.pose.x, self.pose.y, yaw0 + k * 2 * math.pi / SCAN_STOPS)
            self.scan()
            for _ in range(FRAMES_PER_STOP):
                self.detect()
        self.pose = Pose(self.pose.x, self.pose.y, yaw0)
        self.charge(self.scenario.clock_costs.scan_360, "scan_360")

    # -- motion
    def move_to(self, goal_xy, final_yaw: float | None = None) -> FollowResult:
        """Plan on the current map and drive there, sensing about every meter.

        When a fresh scan blocks the rest of the path the robot stops and
        replans from where it is, up to ``MAX_REPLANS`` times.
        """
        total = FollowResult(self.pose, 0.0, 0.0, False)
        for _ in range(MAX_REPLANS + 1):
            path = plan_path(self.grid, self.mask, self.believed_pose, goal_xy, snap_start=0.3)
            dx, dy = self.drift
            if dx or dy:
                path = type(path)(tuple((x - dx, y - dy) for x, y in path.waypoints), path.length, path.cells)
            progress = [0]

            def on_step(p: Pose, path=path, progress=progress) -> bool:
                self.pose = p
                self.trajectory.append(p.xy)
                self.sense()
                bx, by = self.believed_pose.xy
                pts = path.waypoints
                near = min(
                    range(progress[0], len(pts)),
                    key=lambda i: (abs(pts[i][0] + dx - bx) + abs(pts[i][1] + dy - by), i),
                )
                progress[0] = near
                rest = [(x + dx, y + dy) for x, y in pts[near + 1 :]]
                return not points_clear(self.grid, rest, self.sensing.inflation)

            res = follow_path(self.pose, path, self.scenario.clock_costs, self.scenario, final_yaw, on_step=on_step)
            self.pose = res.pose
            self.trajectory.append(res.pose.xy)
            self.distance += res.distance
            self.charge(res.elapsed, "motion")
            self.log("moved", to=list(res.pose.xy), distance=res.distance, collided=res.collided, replan=res.stopped)
            total = FollowResult(
                res.pose, total.distance + res.distance, total.elapsed + res.elapsed, res.collided,
                total.rotation + res.rotation, res.stopped,
            )
            if res.collided:
                raise EpisodeAbort("collision")
            self._apply_drift(res.distance)
            if not res.stopped:
                break
        else:
            raise Unreachable(f"path to ({goal_xy[0]:.2f}, {goal_xy[1]:.2f}) kept getting blocked")
        return total

    def face(self, x: float, y: float) -> None:
        yaw = math.atan2(y - self.pose.y, x - self.pose.x)
        turn = abs(wrap_angle(yaw - self.pose.yaw))
        self.pose = Pose(self.pose.x, self.pose.y, yaw)
        if turn > 0:
            self.charge(turn / self.scenario.clock_costs.angular_speed, "rotate")

    def _apply_drift(self, distance: float) -> None:
        sigma = self.sensing.pose_noise
        if sigma <= 0 or distance <= 0:
            return
        ex, ey = self.rng.normal(0.0, sigma * math.sqrt(distance), size=2)
        self.drift = (self.drift[0] + float(ex), self.drift[1] + float(ey))
        err = math.hypot(*self.drift)
        if err > SLAM_BOUND:
            self.log("slam_drift", error=err)

    def standoff(self, lm: Landmark, distance: float) -> Pose:
        bp = self.believed_pose
        reach = reachable_from(self.grid, self.mask, bp.x, bp.y)
        if not reach.any():
            # the robot's own cell got inflated; use the nearest reachable component
            reach = None
        return standoff_pose(self.grid, self.mask, lm.position, lm.approach_yaw, distance, reach)


def _shift(ev, d):
    from dataclasses import replace

    return replace(ev, position=(ev.position[0] + d[0], ev.position[1] + d[1]))


# -- primitives -------------------------------------------------------------


@dataclass
class PrimitiveOutcome:
    kind: str  # explored | label_read | goal_found | sign_read | info_recorded | no_information | failed
    detail: object = None
    distance: float = 0.0
    elapsed: float = 0.0
    events: list = field(default_factory=list)


def _run(ctx: EpisodeContext, lm: Landmark, body) -> PrimitiveOutcome:
    t0, d0, n0 = ctx.clock, ctx.distance, len(ctx.events)
    ctx.log("primitive", index=lm.index, category=lm.category)
    try:
        kind, detail = body()
    except PlanningError as e:
        ctx.bank.mark_visited(lm.index)
        ctx.log("unreachable", index=lm.index, category=lm.category, reason=type(e).__name__)
        kind, detail = "failed", "unreachable"
    if not ctx.bank[lm.index].visited:
        ctx.bank.mark_visited(lm.index)
    out = PrimitiveOutcome(kind, detail, ctx.distance - d0, ctx.clock - t0, ctx.events[n0:])
    ctx.log("outcome", index=lm.index, outcome=kind, detail=_plain(detail))
    return out


def _plain(detail):
    if isinstance(detail, CardinalDirections):
        return detail.to_dict()
    return detail


def execute_frontier(ctx: EpisodeContext, lm: Landmark) -> PrimitiveOutcome:
    if lm.category != "frontier":
        raise ValueError("execute_frontier needs a frontier landmark")

    def body():
        ctx.move_to(lm.position)
        ctx.scan_360()
        ctx.bank.mark_visited(lm.index)
        return "explored", None

    return _run(ctx, lm, body)


def _door_truth(ctx: EpisodeContext, x: float, y: float, radius: float = 1.0) -> DoorSpec | None:
    best = None
    for d in ctx.scenario.doors:
        dd = math.hypot(d.x - x, d.y - y)
        if dd <= radius and (best is None or dd < best[0]):
            best = (dd, d)
    return best[1] if best else None


def _label_truth(ctx: EpisodeContext, x: float, y: float, radius: float = 0.5) -> DoorSpec | None:
    best = None
    for d in ctx.scenario.doors:
        if d.label_text is None:
            continue
        lx, ly = d.label_position
        dd = math.hypot(lx - x, ly - y)
        if dd <= radius and (best is None or dd < best[0]):
            best = (dd, d)
    return best[1] if best else None


def read_label(ctx: EpisodeContext, door: DoorSpec | None, ocr_error_rate: float | None = None) -> ReadResult:
    """Read the room label of ``door`` from the current pose.

    Out of position (farther than 0.75 m, or more than 30 degrees off the
    label normal) or no label gives -1.  With probability ``ocr_error_rate``
    the read fails: half the time as -2, otherwise as a one-digit corruption
    with low confidence.
    """
    rate = ctx.sensing.ocr_error_rate if ocr_error_rate is None else ocr_error_rate
    if door is None or door.label_text is None:
        return _respond_read(ReadResult("-1", 0.9))
    lx, ly = door.label_position
    dist = ctx.pose.distance_to(lx, ly)
    facing = abs(wrap_angle(ctx.pose.yaw - (door.yaw + math.pi)))
    if dist > READ_MAX_DISTANCE or facing > READ_MAX_ANGLE + 1e-9:
        return _respond_read(ReadResult("-1", 0.8))
    if rate > 0 and ctx.rng.random() < rate:
        if ctx.rng.random() < 0.5:
            return _respond_read(ReadResult("-2", 0.5))
        digits = list(door.label_text)
        k = int(ctx.rng.integers(len(digits)))
        old = digits[k]
        choices = [c for c in "0123456789" if c != old]
        digits[k] = choices[int(ctx.rng.integers(len(choices)))]
        return _respond_read(ReadResult("".join(digits), round(float(ctx.rng.uniform(0.3, 0.6)), 2)))
    return _respond_read(ReadResult(door.label_text, round(float(ctx.rng.uniform(0.9, 1.0)), 2)))


def _respond_read(r: ReadResult) -> ReadResult:
    # round-trip through the textual protocol, as a live model's answer would be
    return parse_read_response(format_read_response(r))


def execute_door(ctx: EpisodeContext, lm: Landmark) -> PrimitiveOutcome:
    if lm.category != "door":
        raise ValueError("execute_door needs a door landmark")

    def body():
        stand = ctx.standoff(lm, STANDOFF["door"])
        ctx.move_to(stand.xy, stand.yaw)
        truth = _door_truth(ctx, *lm.position)
        labels = []
        for pan in PAN_ANGLES:
            labels += ctx.detect(("room label",), pan=pan)
        ctx.charge(len(PAN_ANGLES) * 0.5, "pan")
        if not labels:
            visible = truth is not None and truth.label_text is not None
            ctx.log("label_not_detected", index=lm.index, truth=truth.label_text if truth else None, visible=visible)
            return "no_information", None
        ex, ey = lm.position
        ev = min(labels, key=lambda e: (math.hypot(e.position[0] - ex, e.position[1] - ey), e.position))
        nx, ny = math.cos(ev.approach_yaw), math.sin(ev.approach_yaw)
        spot = (ev.position[0] + READ_DISTANCE * nx, ev.position[1] + READ_DISTANCE * ny)
        ctx.move_to(spot, wrap_angle(ev.approach_yaw + math.pi))
        bx, by = ev.position[0] - ctx.drift[0], ev.position[1] - ctx.drift[1]
        label_door = _label_truth(ctx, bx, by) if ev.entity_id is not None else None
        result = None
        for attempt in range(2):
            ctx.charge(ctx.scenario.clock_costs.vlm_call, "vlm_read_door")
            result = read_label(ctx, label_door)
            ctx.log(
                "label_read",
                index=lm.index,
                attempt=attempt,
                response=format_read_response(result),
                truth=label_door.label_text if label_door else None,
            )
            if result.ok:
                break
        if not result.ok:
            return "no_information", None
        ctx.bank.attach_label(lm.index, result.value)
        if not ctx.occupant_goal and result.value == ctx.goal:
            return "goal_found", result.value
        return "label_read", result.value

    return _run(ctx, lm, body)


def _sign_truth(ctx: EpisodeContext, x: float, y: float, radius: float = 1.0):
    best = None
    for s in ctx.scenario.signs:
        dd = math.hypot(s.x - x, s.y - y)
        if dd <= radius and (best is None or dd < best[0]):
            best = (dd, s)
    return best[1] if best else None


def execute_sign(ctx: EpisodeContext, lm: Landmark) -> PrimitiveOutcome:
    if lm.category != "sign":
        raise ValueError("execute_sign needs a sign landmark")

    def body():
        stand = ctx.standoff(lm, STANDOFF["sign"])
        ctx.move_to(stand.xy, stand.yaw)
        ctx.face(*lm.position)
        ctx.charge(ctx.scenario.clock_costs.vlm_call, "vlm_read_sign")
        x, y = lm.position[0] - ctx.drift[0], lm.position[1] - ctx.drift[1]
        sign = _sign_truth(ctx, x, y)
        if sign is not None and not line_of_sight(ctx.scenario, ctx.pose.x, ctx.pose.y, sign.x, sign.y, 0.02):
            sign = None
        if sign is None:
            # whatever was detected here is not a sign (a poster, usually)
            response = "{'left': [], 'right': [], 'forward': [], 'backwards': []}"
            ctx.log("false_sign_read", index=lm.index, truth=lm.truth, response=response)
        else:
            entries = {k: [] for k in ("left", "right", "forward", "backwards")}
            for rel, text in sign.entries:
                rate = ctx.sensing.ocr_error_rate
                if rate > 0 and ctx.rng.random() < rate:
                    continue
                entries[rel].append(text)
            response = repr(entries)
            ctx.log("sign_read", index=lm.index, truth=sign.id, response=response)
        parsed = parse_sign_response(response)
        heading = (sign.facing_yaw if sign is not None else lm.approach_yaw) + math.pi
        dirs = CardinalDirections()
        for rel in ("left", "right", "forward", "backwards"):
            for text in parsed.get(rel, []):
                dirs.add(bin_relative_to_cardinal(rel, heading), text)
        ctx.bank.attach_directions(lm.index, dirs)
        ctx.bank.mark_visited(lm.index)
        if not dirs.nonempty():
            return "no_information", dirs
        return "sign_read", dirs

    return _run(ctx, lm, body)


def execute_person(ctx: EpisodeContext, lm: Landmark) -> PrimitiveOutcome:
    if lm.category != "person":
        raise ValueError("execute_person needs a person landmark")

    def body():
        stand = ctx.standoff(lm, STANDOFF["person"])
        ctx.move_to(stand.xy, stand.yaw)
        x, y = lm.position[0] - ctx.drift[0], lm.position[1] - ctx.drift[1]
        npc = None
        for n in ctx.scenario.npcs:
            d = ctx.pose.distance_to(n.x, n.y)
            if d <= INTERACTION_RADIUS and math.hypot(n.x - x, n.y - y) <= 1.0:
                if npc is None or d < ctx.pose.distance_to(npc.x, npc.y):
                    npc = n
        if npc is None:
            ctx.log("nobody_here", index=lm.index, truth=lm.truth)
            ctx.bank.attach_info(lm.index, "Note: Nobody was here. No information gained.")
            ctx.bank.mark_visited(lm.index)
            return "no_information", None
        ctx.face(npc.x, npc.y)
        ctx.charge(ctx.scenario.clock_costs.vlm_call, "vlm_interaction_type")
        itype = parse_interaction_type(str(choose_interaction_type(ctx.goal, ctx.occupant_goal)))
        question = {
            1: "How can I help you?",
            2: f"Do you know where {ctx.goal_text} is?",
            3: f"Do you know which room # {ctx.goal_text} is in?",
        }[itype]
        reply = npc_respond(npc, itype, ctx.goal_text, ctx.pose, ctx.scenario)
        ctx.charge(ctx.scenario.clock_costs.npc_exchange, "npc_exchange")
        ctx.log("utterance", speaker="robot", text=question)
        ctx.log("utterance", speaker=f"person{npc.id}", text=reply)
        if itype == 1:
            m = re.search(r"take this to (.+)\?$", reply)
            note = f"Note: {reply}"
            if m:
                target = m.group(1)
                rm = re.fullmatch(r"Room (\d+)", target)
                ctx.goal, ctx.occupant_goal = (rm.group(1), False) if rm else (target, True)
        elif itype == 3:
            m = re.search(r"is in Room (\d+)", reply)
            if m:
                ctx.goal, ctx.occupant_goal = m.group(1), False
                ctx.log("goal_updated", goal=ctx.goal)
            note = write_note(reply, ctx.pose.yaw, ctx.goal_text)
        else:
            note = write_note(reply, ctx.pose.yaw, ctx.goal_text)
        ctx.charge(ctx.scenario.clock_costs.vlm_call, "vlm_record_note")
        ctx.bank.attach_info(lm.index, note)
        ctx.bank.mark_visited(lm.index)
        ctx.log("note", index=lm.index, npc=npc.id, note=note, truth_ok=_note_consistent(ctx, npc, reply))
        if reply == REFUSAL:
            return "no_information", note
        return "info_recorded", note

    return _run(ctx, lm, body)


def _note_consistent(ctx: EpisodeContext, npc, reply: str) -> bool:
    """Does the reply point roughly (within 90 degrees) toward the true room?"""
    m = re.search(r"Room (\d+) is (?:somewhere )?(straight ahead|on your left|on your right|behind you)", reply)
    if not m:
        return True
    door = ctx.scenario.door_for_room(m.group(1))
    if door is None:
        return False
    rel = _PHRASE_TO_REL[m.group(2)]
    said = ctx.pose.yaw + _OFFSETS[rel]
    true = math.atan2(door.y - ctx.pose.y, door.x - ctx.pose.x)
    return abs(wrap_angle(true - said)) <= math.pi / 2 + 1e-9


PRIMITIVES = {
    "frontier": execute_frontier,
    "door": execute_door,
    "sign": execute_sign,
    "person": execute_person,
}


def execute(ctx: EpisodeContext, lm: Landmark) -> PrimitiveOutcome:
    return PRIMITIVES[lm.category](ctx, lm)
