"""Hazard-event identification workbench.

Expands malfunctions over a skill graph with guide words, enumerates
discretized scenes, crosses both with operating modes into candidate
hazardous events, filters them by explicit rules, and serves the result
for expert review.
"""

__version__ = "0.1.0"
