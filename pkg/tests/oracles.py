"""Independent reference implementations used by the unit and acceptance tests."""
import heapq
import math

import numpy as np

from wayfinder.mapping import FREE, OCCUPIED, UNKNOWN, OccupancyGrid

SQRT2 = math.sqrt(2.0)


# -- frontiers on rectangle maps ------------------------------------------------


def rectangle_map(rng, n=32, res=0.1):
    """Unknown n x n grid with 1-3 explored rectangles (>= 2 x 2, one unknown cell
    apart at least) and a random obstacle mask.  Returns (grid, mask, rects)."""
    g = OccupancyGrid(res, (0.0, 0.0), (n, n))
    taken = np.zeros((n, n), dtype=bool)
    rects = []
    for _ in range(int(rng.integers(1, 4))):
        for _attempt in range(20):
            w, h = int(rng.integers(2, 20)), int(rng.integers(2, 20))
            x0, y0 = int(rng.integers(0, n - w + 1)), int(rng.integers(0, n - h + 1))
            lo_x, lo_y = max(x0 - 1, 0), max(y0 - 1, 0)
            if taken[lo_y : y0 + h + 1, lo_x : x0 + w + 1].any():
                continue
            taken[y0 : y0 + h, x0 : x0 + w] = True
            block = rng.choice([FREE, OCCUPIED], size=(h, w), p=[0.9, 0.1])
            g.cells[y0 : y0 + h, x0 : x0 + w] = block
            rects.append((x0, y0, w, h))
            break
    mask = rng.random((n, n)) < float(rng.choice([0.0, 0.05, 0.15, 0.3]))
    return g, mask, rects


def ring_ccw(x0, y0, w, h):
    """Boundary cells of a rectangle, counter-clockwise from its top-left cell."""
    x1, y1 = x0 + w - 1, y0 + h - 1
    ring = [(x0, y) for y in range(y1, y0 - 1, -1)]
    ring += [(x, y0) for x in range(x0 + 1, x1 + 1)]
    ring += [(x1, y) for y in range(y0 + 1, y1 + 1)]
    ring += [(x, y1) for x in range(x1 - 1, x0, -1)]
    return ring


def frontier_oracle(rects, mask, min_cells=5):
    """Sorted (midpoint cell, run length in cells) over all rectangle rings."""
    out = []
    for x0, y0, w, h in rects:
        ring = ring_ccw(x0, y0, w, h)
        br = [bool(mask[y, x]) for x, y in ring]
        if not any(br):
            runs = [ring]
        else:
            k = br.index(True)
            order = ring[k + 1 :] + ring[: k + 1]
            flags = br[k + 1 :] + br[: k + 1]
            runs, cur = [], []
            for c, b in zip(order, flags):
                if b:
                    if cur:
                        runs.append(cur)
                    cur = []
                else:
                    cur.append(c)
            if cur:
                runs.append(cur)
        for run in runs:
            steps = len(run) - 1
            if steps >= min_cells:
                out.append((run[steps // 2], steps))
    return sorted(out)


# -- shortest paths -----------------------------------------------------------------


def dijkstra_steps(passable: np.ndarray, start, goal):
    """Fewest-cost (straight, diagonal) step counts from start to goal cell, or None.

    8-connected, diagonals only between two passable orthogonal neighbours.
    """
    h, w = passable.shape
    best = {start: (0, 0)}
    heap = [(0.0, 0, 0, start)]
    while heap:
        c, a, b, u = heapq.heappop(heap)
        if best.get(u) != (a, b):
            continue
        if u == goal:
            return a, b
        x, y = u
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == dy == 0:
                    continue
                nx, ny = x + dx, y + dy
                if not (0 <= nx < w and 0 <= ny < h) or not passable[ny, nx]:
                    continue
                if dx and dy and not (passable[y, nx] and passable[ny, x]):
                    continue
                na, nb = (a, b + 1) if dx and dy else (a + 1, b)
                old = best.get((nx, ny))
                if old is None or na + nb * SQRT2 < old[0] + old[1] * SQRT2 - 1e-9:
                    best[(nx, ny)] = (na, nb)
                    heapq.heappush(heap, (na + nb * SQRT2, na, nb, (nx, ny)))
    return None


def path_steps(cells):
    a = b = 0
    for (x0, y0), (x1, y1) in zip(cells, cells[1:]):
        d = abs(x1 - x0) + abs(y1 - y0)
        assert max(abs(x1 - x0), abs(y1 - y0)) == 1, "path jumps"
        if d == 1:
            a += 1
        else:
            b += 1
    return a, b


def random_maze(rng, n=40, res=0.1):
    """Known map with rectangular walls; unknown only outside the border."""
    g = OccupancyGrid(res, (0.0, 0.0), (n, n))
    g.cells[:] = FREE
    for _ in range(int(rng.integers(4, 14))):
        x0, y0 = int(rng.integers(0, n)), int(rng.integers(0, n))
        if rng.random() < 0.5:
            g.cells[y0, x0 : x0 + int(rng.integers(3, 20))] = OCCUPIED
        else:
            g.cells[y0 : y0 + int(rng.integers(3, 20)), x0] = OCCUPIED
    if rng.random() < 0.3:
        g.cells[rng.random((n, n)) < 0.03] = UNKNOWN
    return g


# -- landmark promotion -------------------------------------------------------------


def promotion_oracle(frames, radius=1.0, hits=3, window=20):
    """Replay ``frames`` ([(frame_index, [(category, x, y), ...]), ...]) and return the
    promotions as [(frame_index, category, track_number)] in promotion order plus the
    final mean position of every track."""
    tracks = []  # dict(cat, xs, ys, frames, promoted)
    promotions = []
    for f, dets in frames:
        for cat in ("door", "person", "sign"):
            mine = [(x, y) for c, x, y in dets if c == cat]
            if not mine:
                continue
            cand = [t for t in tracks if t["cat"] == cat]
            pairs = []
            for i, (x, y) in enumerate(mine):
                for j, t in enumerate(cand):
                    mx, my = sum(t["xs"]) / len(t["xs"]), sum(t["ys"]) / len(t["ys"])
                    d = math.hypot(x - mx, y - my)
                    if d <= radius:
                        pairs.append((d, i, j))
            used_i, used_j, assign = set(), set(), []
            for d, i, j in sorted(pairs):
                if i not in used_i and j not in used_j:
                    used_i.add(i)
                    used_j.add(j)
                    assign.append((i, cand[j]))
            for i in range(len(mine)):
                if i not in used_i:
                    t = {"cat": cat, "xs": [], "ys": [], "frames": [], "promoted": False, "n": len(tracks)}
                    tracks.append(t)
                    assign.append((i, t))
            for i, t in assign:
                t["xs"].append(mine[i][0])
                t["ys"].append(mine[i][1])
                t["frames"].append(f)
            for t in tracks:
                if t["cat"] != cat or t["promoted"]:
                    continue
                # any trailing window ending now with enough hits
                if sum(1 for g in t["frames"] if f - window < g <= f) >= hits:
                    t["promoted"] = True
                    promotions.append((f, cat, t["n"]))
    means = [(t["cat"], sum(t["xs"]) / len(t["xs"]), sum(t["ys"]) / len(t["ys"])) for t in tracks]
    return promotions, means


def random_stream(rng, n_frames=60):
    """A few objects seen intermittently with position noise, plus strays."""
    objects = [
        (str(rng.choice(["door", "person", "sign"])), float(rng.uniform(0, 8)), float(rng.uniform(0, 8)))
        for _ in range(int(rng.integers(1, 6)))
    ]
    frames = []
    f = 0
    for _ in range(n_frames):
        f += int(rng.integers(1, 4))
        dets = []
        for cat, x, y in objects:
            if rng.random() < 0.35:
                dets.append((cat, x + float(rng.normal(0, 0.3)), y + float(rng.normal(0, 0.3))))
        if rng.random() < 0.2:
            dets.append((str(rng.choice(["door", "person", "sign"])), float(rng.uniform(0, 8)), float(rng.uniform(0, 8))))
        frames.append((f, dets))
    return frames


# -- compass binning ----------------------------------------------------------------

# heading -> {relative: compass bin}, written out by hand
BINNING_TABLE = {
    "East": {"forward": "East", "left": "North", "backwards": "West", "right": "South"},
    "North-East": {"forward": "North-East", "left": "North-West", "backwards": "South-West", "right": "South-East"},
    "North": {"forward": "North", "left": "West", "backwards": "South", "right": "East"},
    "North-West": {"forward": "North-West", "left": "South-West", "backwards": "South-East", "right": "North-East"},
    "West": {"forward": "West", "left": "South", "backwards": "East", "right": "North"},
    "South-West": {"forward": "South-West", "left": "South-East", "backwards": "North-East", "right": "North-West"},
    "South": {"forward": "South", "left": "East", "backwards": "North", "right": "West"},
    "South-East": {"forward": "South-East", "left": "North-East", "backwards": "North-West", "right": "South-West"},
}
HEADING_DEG = {
    "East": 0,
    "North-East": 45,
    "North": 90,
    "North-West": 135,
    "West": 180,
    "South-West": 225,
    "South": 270,
    "South-East": 315,
}
