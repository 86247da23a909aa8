"""Ground-truth building: scenario format, sensing, kinematics and NPCs."""
from .motion import DEFAULT_FOOTPRINT, footprint_clear, segment_clear, step_motion
from .npc import PHRASES, REFUSAL, npc_respond, relative_quadrant
from .scenario import ScenarioError, dump_scenario, load_scenario, load_scenario_file, validate_scenario
from .sensors import Camera, DetectorModel, Scan, SensorError, line_of_sight, raycast_scan, simulate_detections
from .types import (
    CATEGORIES,
    DOOR,
    FREE,
    RELATIVE_DIRECTIONS,
    WALL,
    ClockCosts,
    DetectionEvent,
    DoorSpec,
    GoalSpec,
    NpcSpec,
    Pose,
    PosterSpec,
    Scenario,
    SignSpec,
    wrap_angle,
)

__all__ = [
    "CATEGORIES",
    "DEFAULT_FOOTPRINT",
    "DOOR",
    "FREE",
    "PHRASES",
    "REFUSAL",
    "RELATIVE_DIRECTIONS",
    "WALL",
    "Camera",
    "ClockCosts",
    "DetectionEvent",
    "DetectorModel",
    "DoorSpec",
    "GoalSpec",
    "NpcSpec",
    "Pose",
    "PosterSpec",
    "Scan",
    "Scenario",
    "ScenarioError",
    "SensorError",
    "SignSpec",
    "dump_scenario",
    "footprint_clear",
    "line_of_sight",
    "load_scenario",
    "load_scenario_file",
    "npc_respond",
    "raycast_scan",
    "relative_quadrant",
    "segment_clear",
    "simulate_detections",
    "step_motion",
    "validate_scenario",
    "wrap_angle",
]
