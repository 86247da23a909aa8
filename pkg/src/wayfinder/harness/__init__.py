"""Episode runner, metrics, failure tagging, hospital scenarios and the ablation suite."""
from .episode import DECISION_COST, MAX_STEPS, EpisodeResult, event_log_jsonl, run_episode
from .failures import CAUSES, classify_failure
from .hospital import ZONES, Layout, build_hospital, generate_hospital, load_replica, replica_layout, zone_of
from .metrics import FAIL_DISTANCE, FAIL_DURATION, Metrics, aggregate, metrics_table
from .suite import (
    DEFAULT_EPISODES,
    SUITE_CONFIGS,
    SuiteReport,
    hospital_suite,
    markdown_table,
    results_csv,
    run_ablation_suite,
)

__all__ = [
    "CAUSES",
    "DECISION_COST",
    "DEFAULT_EPISODES",
    "FAIL_DISTANCE",
    "FAIL_DURATION",
    "MAX_STEPS",
    "SUITE_CONFIGS",
    "ZONES",
    "EpisodeResult",
    "Layout",
    "Metrics",
    "SuiteReport",
    "aggregate",
    "build_hospital",
    "classify_failure",
    "event_log_jsonl",
    "generate_hospital",
    "hospital_suite",
    "load_replica",
    "markdown_table",
    "metrics_table",
    "replica_layout",
    "results_csv",
    "run_ablation_suite",
    "run_episode",
    "zone_of",
]
