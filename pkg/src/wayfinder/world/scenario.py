"""Scenario text format: reader, writer and validation.

Grammar (``#`` starts a comment line outside the map block)::

    name: <text>
    resolution: <meters per cell>
    origin: <x> <y>                      # optional, default 0 0
    start: <x> <y> <yaw>
    goal: room <number> | goal: occupant <name>
    time_limit: <seconds>
    linear_speed|angular_speed|scan_360|vlm_call|npc_exchange: <value>
    MAP
    <rows, northmost first; '#' wall, '.' free, 'D' door cell>
    ENDMAP
    DOOR
    <id> <x> <y> <yaw> [label="3012"] [visible=<lo>,<hi>]
    END
    SIGN
    <id> <x> <y> <yaw> left="..." forward="..." ...   (keys repeat)
    END
    NPC
    <id> <x> <y> <yaw> kind=nurse [name="..."] [known="3001,3002"]
        [approx="..."] [directory=yes|no]
    END
    DIRECTORY
    name="Dr. Ada Park" room="3012"
    END
    POSTER
    <id> <x> <y> <yaw>
    END
"""
from __future__ import annotations

import math
import shlex

import numpy as np

from .types import (
    DOOR,
    FREE,
    NPC_KINDS,
    RELATIVE_DIRECTIONS,
    WALL,
    ClockCosts,
    DoorSpec,
    GoalSpec,
    NpcSpec,
    Pose,
    PosterSpec,
    Scenario,
    SignSpec,
)

_LEGEND = {"#": WALL, ".": FREE, "D": DOOR}
_CHARS = {v: k for k, v in _LEGEND.items()}
_BLOCKS = ("DOOR", "SIGN", "NPC", "DIRECTORY", "POSTER")
_CLOCK_KEYS = ("linear_speed", "angular_speed", "scan_360", "vlm_call", "npc_exchange")


class ScenarioError(ValueError):
    """Malformed or invalid scenario document."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _float(tok: str, line: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ScenarioError(f"expected a number for {what}, got {tok!r}", line) from None
    if not math.isfinite(v):
        raise ScenarioError(f"{what} must be finite", line)
    return v


def _split(text: str, line: int) -> list[str]:
    try:
        return shlex.split(text, comments=False, posix=True)
    except ValueError as e:
        raise ScenarioError(f"cannot tokenize record: {e}", line) from None


def _keyvals(tokens: list[str], line: int) -> list[tuple[str, str]]:
    out = []
    for tok in tokens:
        if "=" not in tok:
            raise ScenarioError(f"expected key=value, got {tok!r}", line)
        k, v = tok.split("=", 1)
        out.append((k, v))
    return out


def _entity_head(tokens: list[str], line: int, block: str) -> tuple[int, float, float, float, list[str]]:
    if len(tokens) < 4:
        raise ScenarioError(f"{block} record needs id x y yaw", line)
    try:
        ident = int(tokens[0])
    except ValueError:
        raise ScenarioError(f"{block} id must be an integer, got {tokens[0]!r}", line) from None
    x = _float(tokens[1], line, "x")
    y = _float(tokens[2], line, "y")
    yaw = _float(tokens[3], line, "yaw")
    return ident, x, y, yaw, tokens[4:]


def _room_list(v: str) -> frozenset[str]:
    return frozenset(s.strip() for s in v.split(",") if s.strip())


def load_scenario(document: str) -> Scenario:
    """Parse and validate a scenario document."""
    header: dict[str, tuple[str, int]] = {}
    rows: list[str] = []
    map_line = None
    doors: list[DoorSpec] = []
    signs: list[SignSpec] = []
    npcs: list[NpcSpec] = []
    posters: list[PosterSpec] = []
    directory: dict[str, str] = {}
    mode = "header"

    for lineno, raw in enumerate(document.splitlines(), start=1):
        text = raw.rstrip("\r\n")
        stripped = text.strip()
        if mode == "map":
            if stripped == "ENDMAP":
                mode = "header"
                continue
            rows.append(stripped)
            continue
        if not stripped or stripped.startswith("#"):
            continue
        if mode == "header":
            if stripped == "MAP":
                if map_line is not None:
                    raise ScenarioError("duplicate MAP block", lineno)
                map_line = lineno
                mode = "map"
                continue
            if stripped in _BLOCKS:
                mode = stripped
                continue
            if ":" not in stripped:
                raise ScenarioError(f"expected 'key: value', got {stripped!r}", lineno)
            key, value = stripped.split(":", 1)
            header[key.strip()] = (value.strip(), lineno)
            continue
        # inside an entity block
        if stripped == "END":
            mode = "header"
            continue
        tokens = _split(stripped, lineno)
        try:
            if mode == "DOOR":
                ident, x, y, yaw, rest = _entity_head(tokens, lineno, "DOOR")
                label, visible = None, None
                for k, v in _keyvals(rest, lineno):
                    if k == "label":
                        label = v
                    elif k == "visible":
                        lo, hi = v.split(",")
                        visible = (_float(lo, lineno, "visible"), _float(hi, lineno, "visible"))
                    else:
                        raise ScenarioError(f"unknown DOOR attribute {k!r}", lineno)
                doors.append(DoorSpec(ident, x, y, yaw, label, visible))
            elif mode == "SIGN":
                ident, x, y, yaw, rest = _entity_head(tokens, lineno, "SIGN")
                entries = []
                for k, v in _keyvals(rest, lineno):
                    if k not in RELATIVE_DIRECTIONS:
                        raise ScenarioError(f"SIGN entry direction must be one of {RELATIVE_DIRECTIONS}", lineno, "entries")
                    entries.append((k, v))
                signs.append(SignSpec(ident, x, y, yaw, tuple(entries)))
            elif mode == "NPC":
                ident, x, y, _yaw, rest = _entity_head(tokens, lineno, "NPC")
                attrs = dict(_keyvals(rest, lineno))
                unknown = set(attrs) - {"kind", "name", "known", "approx", "directory"}
                if unknown:
                    raise ScenarioError(f"unknown NPC attribute(s) {sorted(unknown)}", lineno)
                kind = attrs.get("kind", "generic")
                if kind not in NPC_KINDS:
                    raise ScenarioError(f"NPC kind must be one of {NPC_KINDS}", lineno, "kind")
                npcs.append(
                    NpcSpec(
                        ident,
                        x,
                        y,
                        kind=kind,
                        known_rooms=_room_list(attrs.get("known", "")),
                        knows_directory=attrs.get("directory", "no").lower() in ("yes", "true", "1"),
                        approx_rooms=_room_list(attrs.get("approx", "")),
                        name=attrs.get("name", ""),
                    )
                )
            elif mode == "DIRECTORY":
                attrs = dict(_keyvals(tokens, lineno))
                if "name" not in attrs or "room" not in attrs:
                    raise ScenarioError("DIRECTORY record needs name= and room=", lineno)
                directory[attrs["name"]] = attrs["room"]
            elif mode == "POSTER":
                ident, x, y, yaw, rest = _entity_head(tokens, lineno, "POSTER")
                posters.append(PosterSpec(ident, x, y, yaw))
        except ScenarioError:
            raise
        except ValueError as e:
            raise ScenarioError(str(e), lineno) from None

    if mode == "map":
        raise ScenarioError("MAP block not terminated by ENDMAP", map_line)
    if mode != "header":
        raise ScenarioError(f"{mode} block not terminated by END")
    if map_line is None:
        raise ScenarioError("missing MAP block")

    def need(key: str) -> tuple[str, int]:
        if key not in header:
            raise ScenarioError(f"missing header field {key!r}", field=key)
        return header[key]

    name = need("name")[0]
    res_text, res_line = need("resolution")
    resolution = _float(res_text, res_line, "resolution")
    if resolution <= 0:
        raise ScenarioError("resolution must be positive", res_line, "resolution")

    origin = (0.0, 0.0)
    if "origin" in header:
        ot, ol = header["origin"]
        parts = ot.split()
        if len(parts) != 2:
            raise ScenarioError("origin needs x y", ol, "origin")
        origin = (_float(parts[0], ol, "origin"), _float(parts[1], ol, "origin"))

    st, sl = need("start")
    parts = st.split()
    if len(parts) != 3:
        raise ScenarioError("start needs x y yaw", sl, "start")
    start = Pose(*(_float(p, sl, "start") for p in parts))

    gt, gl = need("goal")
    gparts = gt.split(None, 1)
    if len(gparts) != 2 or gparts[0] not in ("room", "occupant"):
        raise ScenarioError("goal must be 'room <number>' or 'occupant <name>'", gl, "goal")
    gval = gparts[1].strip().strip('"')
    goal = GoalSpec(room=gval) if gparts[0] == "room" else GoalSpec(occupant=gval)

    tl_text, tl_line = header.get("time_limit", ("900", None))
    time_limit = _float(tl_text, tl_line, "time_limit")

    costs = {}
    for key in _CLOCK_KEYS:
        if key in header:
            v, ln = header[key]
            costs[key] = _float(v, ln, key)
    try:
        clock = ClockCosts(**costs)
    except ValueError as e:
        raise ScenarioError(str(e), field="clock_costs") from None

    if not rows:
        raise ScenarioError("empty MAP block", map_line)
    width = len(rows[0])
    grid = np.zeros((len(rows), width), dtype=np.int8)
    for r, row in enumerate(rows):
        ln = map_line + 1 + r
        if len(row) != width:
            raise ScenarioError(f"map row has {len(row)} cells, expected {width}", ln)
        for c, ch in enumerate(row):
            if ch not in _LEGEND:
                raise ScenarioError(f"unknown map symbol {ch!r}", ln)
        # first text row is the northmost grid row
        grid[len(rows) - 1 - r] = [_LEGEND[ch] for ch in row]

    scenario = Scenario(
        name=name,
        resolution=resolution,
        grid=grid,
        doors=doors,
        signs=signs,
        npcs=npcs,
        directory=directory,
        start_pose=start,
        goal=goal,
        time_limit=time_limit,
        clock_costs=clock,
        posters=posters,
        origin=origin,
    )
    validate_scenario(scenario)
    return scenario


def validate_scenario(s: Scenario) -> None:
    """Check the cross-field invariants; raise ScenarioError naming the field."""
    if s.time_limit <= 0:
        raise ScenarioError("time_limit must be positive", field="time_limit")
    ix, iy = s.cell_of(s.start_pose.x, s.start_pose.y)
    if not s.in_bounds(ix, iy) or s.grid[iy, ix] == WALL:
        raise ScenarioError("start_pose must lie in a free cell", field="start_pose")

    seen_ids = set()
    for d in s.doors:
        if d.id in seen_ids:
            raise ScenarioError(f"duplicate door id {d.id}", field="doors")
        seen_ids.add(d.id)
        cx, cy = s.cell_of(d.x, d.y)
        if not s.in_bounds(cx, cy):
            raise ScenarioError(f"door {d.id} lies outside the map", field="doors")
        ok = s.grid[cy, cx] == DOOR or any(
            s.is_wall(cx + dx, cy + dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if dx or dy
        )
        if not ok:
            raise ScenarioError(f"door {d.id} is not on a door cell or next to a wall", field="doors")

    rooms = s.room_numbers()
    for occupant, room in s.directory.items():
        if room not in rooms:
            raise ScenarioError(f"directory room {room!r} for {occupant!r} has no door", field="directory")
    for n in s.npcs:
        bad = (n.known_rooms | n.approx_rooms) - rooms
        if bad:
            raise ScenarioError(f"npc {n.id} knows unknown rooms {sorted(bad)}", field="known_rooms")
    for ent in list(s.signs) + list(s.npcs) + list(s.posters):
        if not s.in_bounds(*s.cell_of(ent.x, ent.y)):
            raise ScenarioError(f"{type(ent).__name__} {ent.id} lies outside the map", field=type(ent).__name__)
    if s.goal.room is not None and s.goal.room not in rooms:
        raise ScenarioError(f"goal room {s.goal.room!r} has no door", field="goal")
    if s.goal.occupant is not None and s.goal.occupant not in s.directory:
        raise ScenarioError(f"goal occupant {s.goal.occupant!r} not in directory", field="goal")


def _fmt(v: float) -> str:
    # shortest text that parses back to the same float
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def _q(text: str) -> str:
    return shlex.quote(text) if text else '""'


def dump_scenario(s: Scenario) -> str:
    """Serialize a Scenario back to the text format."""
    out = [
        "# wayfinder scenario",
        f"name: {s.name}",
        f"resolution: {_fmt(s.resolution)}",
    ]
    if s.origin != (0.0, 0.0):
        out.append(f"origin: {_fmt(s.origin[0])} {_fmt(s.origin[1])}")
    p = s.start_pose
    out.append(f"start: {_fmt(p.x)} {_fmt(p.y)} {_fmt(p.yaw)}")
    out.append(f"goal: room {s.goal.room}" if s.goal.room is not None else f"goal: occupant {s.goal.occupant}")
    out.append(f"time_limit: {_fmt(s.time_limit)}")
    for key in _CLOCK_KEYS:
        out.append(f"{key}: {_fmt(getattr(s.clock_costs, key))}")
    out.append("MAP")
    for row in s.grid[::-1]:
        out.append("".join(_CHARS[int(v)] for v in row))
    out.append("ENDMAP")
    if s.doors:
        out.append("DOOR")
        for d in s.doors:
            rec = f"{d.id} {_fmt(d.x)} {_fmt(d.y)} {_fmt(d.yaw)}"
            if d.label_text is not None:
                rec += f" label={_q(d.label_text)}"
            lo, hi = d.label_visible_from
            rec += f" visible={_fmt(lo)},{_fmt(hi)}"
            out.append(rec)
        out.append("END")
    if s.signs:
        out.append("SIGN")
        for sg in s.signs:
            rec = f"{sg.id} {_fmt(sg.x)} {_fmt(sg.y)} {_fmt(sg.facing_yaw)}"
            for rel, text in sg.entries:
                rec += f" {rel}={_q(text)}"
            out.append(rec)
        out.append("END")
    if s.npcs:
        out.append("NPC")
        for n in s.npcs:
            rec = f"{n.id} {_fmt(n.x)} {_fmt(n.y)} 0 kind={n.kind}"
            if n.name:
                rec += f" name={_q(n.name)}"
            if n.known_rooms:
                rec += f" known={','.join(sorted(n.known_rooms))}"
            if n.approx_rooms:
                rec += f" approx={','.join(sorted(n.approx_rooms))}"
            rec += f" directory={'yes' if n.knows_directory else 'no'}"
            out.append(rec)
        out.append("END")
    if s.directory:
        out.append("DIRECTORY")
        for occupant, room in s.directory.items():
            out.append(f"name={_q(occupant)} room={_q(room)}")
        out.append("END")
    if s.posters:
        out.append("POSTER")
        for ps in s.posters:
            out.append(f"{ps.id} {_fmt(ps.x)} {_fmt(ps.y)} {_fmt(ps.yaw)}")
        out.append("END")
    return "\n".join(out) + "\n"


def load_scenario_file(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return load_scenario(fh.read())
