"""Landmark memory bank: detection filtering and aggregation, frontier refresh,
attachments, and the JSON document handed to the high-level planner."""
from __future__ import annotations

import copy
import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable

from .world.types import DetectionEvent

LANDMARK_CATEGORIES = ("door", "person", "sign", "frontier")
COMPASS = ("North", "North-East", "East", "South-East", "South", "South-West", "West", "North-West")

NAMES = {
    "door": "a door",
    "person": "a person",
    "sign": "a directions sign",
    "frontier": "a frontier",
}
_NAME_TO_CATEGORY = {v: k for k, v in NAMES.items()}

# detector category -> landmark category (room labels never become landmarks)
DETECTION_CATEGORY = {"door": "door", "person": "person", "directions sign": "sign"}

MATCH_RADIUS = 1.0
PROMOTION_HITS = 3
PROMOTION_WINDOW = 20
FRONTIER_SUPPRESSION_RADIUS = 0.5


@dataclass(frozen=True)
class DetectionFilter:
    """Minimum confidence plus open size windows (None = unchecked)."""

    min_confidence: float
    width: tuple[float, float] | None = None
    height: tuple[float, float] | None = None


DETECTION_FILTERS = {
    "door": DetectionFilter(0.3, (0.5, 2.5), (0.5, 3.0)),
    "room label": DetectionFilter(0.04, (0.0, 0.4), (0.0, 0.15)),
    "directions sign": DetectionFilter(0.03, (0.35, 0.5), (0.2, 0.5)),
    "person": DetectionFilter(0.3),
}


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None

    def __bool__(self):
        return self.accepted


def filter_detection(event: DetectionEvent) -> Verdict:
    spec = DETECTION_FILTERS.get(event.category)
    if spec is None:
        return Verdict(False, "category")
    if not event.confidence >= spec.min_confidence:
        return Verdict(False, "confidence")
    if spec.width is not None and not spec.width[0] < event.box_width < spec.width[1]:
        return Verdict(False, "size")
    if spec.height is not None and not spec.height[0] < event.box_height < spec.height[1]:
        return Verdict(False, "size")
    return Verdict(True)


class CardinalDirections:
    """Eight compass bins in fixed order, each a list of texts."""

    def __init__(self, bins: dict[str, Iterable[str]] | None = None):
        self._bins = {k: [] for k in COMPASS}
        for k, texts in (bins or {}).items():
            if k not in self._bins:
                raise KeyError(f"unknown compass bin {k!r}")
            self._bins[k] = list(texts)

    def add(self, bin_name: str, text: str) -> None:
        self._bins[bin_name].append(text)

    def __getitem__(self, bin_name: str) -> list[str]:
        return self._bins[bin_name]

    def to_dict(self) -> dict[str, list[str]]:
        return {k: list(v) for k, v in self._bins.items()}

    def nonempty(self) -> list[str]:
        return [k for k in COMPASS if self._bins[k]]

    def __eq__(self, other):
        return isinstance(other, CardinalDirections) and self._bins == other._bins

    def __repr__(self):
        return f"CardinalDirections({self._bins!r})"


@dataclass
class Landmark:
    index: int
    category: str
    position: tuple[float, float]
    approach_yaw: float = 0.0
    visited: bool = False
    label_text: str | None = None
    directions: CardinalDirections | None = None
    info: str | None = None
    detection_history: deque = field(default_factory=lambda: deque(maxlen=PROMOTION_WINDOW))
    # simulation ground truth: how often each source entity fed this landmark
    sources: Counter = field(default_factory=Counter)
    visit_order: int | None = None

    @property
    def name(self) -> str:
        base = NAMES[self.category]
        if not self.visited:
            return base
        if self.category == "door" and self.label_text is not None:
            return f"Visited_{base}_{self.label_text}"
        return f"Visited_{base}"

    @property
    def truth(self) -> int | None:
        """Most frequent ground-truth source id, None when mostly clutter."""
        if not self.sources:
            return None
        (ent, _), = self.sources.most_common(1)
        return ent


@dataclass
class _Track:
    category: str
    sum_x: float
    sum_y: float
    count: int
    approach_yaw: float
    frames: deque
    sources: Counter
    landmark: int | None = None  # index once promoted

    @property
    def position(self):
        return (self.sum_x / self.count, self.sum_y / self.count)


class LandmarkError(Exception):
    pass


class UnknownLandmarkError(LandmarkError, KeyError):
    pass


class CategoryMismatchError(LandmarkError, ValueError):
    pass


class MemoryBank:
    """Indexed landmarks plus the unpromoted detection tracks behind them."""

    def __init__(self):
        self.landmarks: dict[int, Landmark] = {}
        self.next_index = 0
        self.frontier_indices: set[int] = set()
        self.reached_frontiers: list[tuple[float, float]] = []
        self._tracks: list[_Track] = []
        self._visits = 0

    # -- views -----------------------------------------------------------
    def __len__(self):
        return len(self.landmarks)

    def __contains__(self, index):
        return index in self.landmarks

    def __getitem__(self, index) -> Landmark:
        try:
            return self.landmarks[index]
        except KeyError:
            raise UnknownLandmarkError(index) from None

    def unvisited(self) -> list[Landmark]:
        return [lm for lm in self.landmarks.values() if not lm.visited]

    def of_category(self, *cats: str) -> list[Landmark]:
        return [lm for lm in self.landmarks.values() if lm.category in cats]

    def snapshot(self) -> "MemoryBank":
        return copy.deepcopy(self)

    def without_categories(self, *cats: str) -> "MemoryBank":
        b = self.snapshot()
        for idx in [i for i, lm in b.landmarks.items() if lm.category in cats]:
            del b.landmarks[idx]
        b.frontier_indices &= set(b.landmarks)
        return b

    def without_memory(self) -> "MemoryBank":
        """What a planner sees with no JSON: indices, categories and positions only."""
        b = self.snapshot()
        for lm in b.landmarks.values():
            lm.visited = False
            lm.label_text = None
            lm.directions = None
            lm.info = None
        return b

    # -- detections ------------------------------------------------------
    def ingest_frame(self, events: Iterable[DetectionEvent], frame_index: int) -> list[int]:
        """Greedily match one frame of filtered detections to tracked objects.

        Pairs within ``MATCH_RADIUS`` are assigned one-to-one, nearest first;
        unmatched detections start new tracks.  A track is promoted to a
        landmark once it has ``PROMOTION_HITS`` hits within the trailing
        ``PROMOTION_WINDOW`` frames.  Returns the newly promoted indices.
        """
        by_cat: dict[str, list[DetectionEvent]] = {}
        for ev in events:
            cat = DETECTION_CATEGORY.get(ev.category)
            if cat is not None:
                by_cat.setdefault(cat, []).append(ev)
        promoted = []
        for cat in ("door", "person", "sign"):
            dets = by_cat.get(cat)
            if not dets:
                continue
            tracks = [t for t in self._tracks if t.category == cat]
            pairs = []
            for i, ev in enumerate(dets):
                for j, tr in enumerate(tracks):
                    tx, ty = tr.position
                    d = math.hypot(ev.position[0] - tx, ev.position[1] - ty)
                    if d <= MATCH_RADIUS:
                        pairs.append((d, i, j))
            pairs.sort()
            det_used, trk_used = set(), set()
            assignment: list[tuple[DetectionEvent, _Track]] = []
            for d, i, j in pairs:
                if i in det_used or j in trk_used:
                    continue
                det_used.add(i)
                trk_used.add(j)
                assignment.append((dets[i], tracks[j]))
            for i, ev in enumerate(dets):
                if i not in det_used:
                    tr = _Track(cat, 0.0, 0.0, 0, ev.approach_yaw, deque(maxlen=PROMOTION_WINDOW), Counter())
                    self._tracks.append(tr)
                    assignment.append((ev, tr))
            for ev, tr in assignment:
                tr.sum_x += ev.position[0]
                tr.sum_y += ev.position[1]
                tr.count += 1
                tr.frames.append(frame_index)
                tr.sources[ev.entity_id] += 1
            for tr in self._tracks:
                if tr.category != cat:
                    continue
                if tr.landmark is not None:
                    lm = self.landmarks.get(tr.landmark)
                    if lm is not None:
                        lm.position = tr.position
                        lm.detection_history = deque(tr.frames, maxlen=PROMOTION_WINDOW)
                        lm.sources = Counter(tr.sources)
                    continue
                recent = sum(1 for f in tr.frames if frame_index - f < PROMOTION_WINDOW)
                if recent >= PROMOTION_HITS:
                    idx = self._new_index()
                    tr.landmark = idx
                    self.landmarks[idx] = Landmark(
                        idx,
                        cat,
                        tr.position,
                        tr.approach_yaw,
                        detection_history=deque(tr.frames, maxlen=PROMOTION_WINDOW),
                        sources=Counter(tr.sources),
                    )
                    promoted.append(idx)
        return promoted

    def ingest_detection(self, event: DetectionEvent, frame_index: int) -> list[int]:
        return self.ingest_frame([event], frame_index)

    def _new_index(self) -> int:
        idx = self.next_index
        self.next_index += 1
        return idx

    # -- frontiers -------------------------------------------------------
    def refresh_frontiers(self, frontiers, suppression_radius: float = FRONTIER_SUPPRESSION_RADIUS) -> list[int]:
        """Replace every frontier landmark with fresh indices for ``frontiers``.

        Frontiers within ``suppression_radius`` of a previously reached
        frontier point are left out.
        """
        for idx in sorted(self.frontier_indices):
            self.landmarks.pop(idx, None)
        self.frontier_indices = set()
        added = []
        for fr in frontiers:
            x, y = fr.midpoint
            if any(math.hypot(x - px, y - py) <= suppression_radius for px, py in self.reached_frontiers):
                continue
            idx = self._new_index()
            self.landmarks[idx] = Landmark(idx, "frontier", (x, y))
            self.frontier_indices.add(idx)
            added.append(idx)
        return added

    def suppress_point(self, x: float, y: float) -> None:
        self.reached_frontiers.append((x, y))

    # -- attachments -----------------------------------------------------
    def _expect(self, index: int, category: str) -> Landmark:
        lm = self[index]
        if lm.category != category:
            raise CategoryMismatchError(f"landmark {index} is a {lm.category}, not a {category}")
        return lm

    def mark_visited(self, index: int) -> Landmark:
        lm = self[index]
        if not lm.visited:
            lm.visited = True
            self._visits += 1
            lm.visit_order = self._visits
        if lm.category == "frontier":
            self.suppress_point(*lm.position)
        return lm

    def attach_label(self, index: int, text: str) -> Landmark:
        lm = self._expect(index, "door")
        lm.label_text = text
        return self.mark_visited(index)

    def attach_directions(self, index: int, directions: CardinalDirections) -> Landmark:
        lm = self._expect(index, "sign")
        lm.directions = directions
        return lm

    def attach_info(self, index: int, text: str) -> Landmark:
        lm = self._expect(index, "person")
        lm.info = text
        return lm

    # -- serialization ---------------------------------------------------
    def to_document(self) -> dict:
        doc = {}
        for idx in sorted(self.landmarks):
            lm = self.landmarks[idx]
            entry = {"name": lm.name, "position": [_round(lm.position[0]), _round(lm.position[1])]}
            if lm.directions is not None:
                entry["directions"] = lm.directions.to_dict()
            if lm.info is not None:
                entry["info"] = lm.info
            doc[str(idx)] = entry
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_document())

    @classmethod
    def from_json(cls, text: str) -> "MemoryBank":
        doc = json.loads(text)
        bank = cls()
        for key, entry in doc.items():
            idx = int(key)
            name = entry["name"]
            visited = name.startswith("Visited_")
            rest = name[len("Visited_"):] if visited else name
            label = None
            if rest.startswith(NAMES["door"] + "_"):
                label = rest[len(NAMES["door"]) + 1:]
                rest = NAMES["door"]
            if rest not in _NAME_TO_CATEGORY:
                raise ValueError(f"landmark {key}: unknown name {name!r}")
            cat = _NAME_TO_CATEGORY[rest]
            x, y = entry["position"]
            lm = Landmark(idx, cat, (float(x), float(y)), visited=visited, label_text=label)
            if "directions" in entry:
                lm.directions = CardinalDirections(entry["directions"])
            if "info" in entry:
                lm.info = entry["info"]
            bank.landmarks[idx] = lm
            if cat == "frontier":
                bank.frontier_indices.add(idx)
        bank.next_index = max(bank.landmarks, default=-1) + 1
        return bank


def _round(v: float) -> float:
    return round(v, 1) + 0.0


def to_json(bank: MemoryBank) -> str:
    return bank.to_json()
