"""Landmark-memory navigation in simulated buildings.

A robot maps an unknown floor with a 2D lidar, keeps a small indexed memory of
doors, signs, people and frontiers, and lets a planner (a rule-based oracle,
two naive baselines, or a vision-language model over HTTP) pick which
landmark to visit next.  Scripted behaviours then read door labels, read
direction signs, ask people for directions, or explore.
"""
__version__ = "0.1.0"
