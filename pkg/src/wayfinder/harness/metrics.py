"""Success rate, duration and distance with fixed penalties for failures."""
from __future__ import annotations

from dataclasses import dataclass

FAIL_DURATION = 900.0
FAIL_DISTANCE = 100.0


@dataclass(frozen=True)
class Metrics:
    success_rate: float  # percent, 2 decimals
    avg_duration: float
    avg_distance: float
    episodes: int


def aggregate(results) -> Metrics:
    """Average over episodes; each failure counts as 900 s and 100 m.

    ``results`` holds objects with ``success``, ``duration`` and
    ``distance`` attributes.
    """
    results = list(results)
    if not results:
        raise ValueError("aggregate needs at least one result")
    n = len(results)
    wins = sum(1 for r in results if r.success)
    dur = sum(r.duration if r.success else FAIL_DURATION for r in results)
    dist = sum(r.distance if r.success else FAIL_DISTANCE for r in results)
    return Metrics(round(100.0 * wins / n, 2), round(dur / n, 2), round(dist / n, 2), n)


def metrics_table(grouped: dict) -> dict[str, Metrics]:
    """``{config name: results}`` to ``{config name: Metrics}``, order kept."""
    return {name: aggregate(rs) for name, rs in grouped.items()}
