"""Stability, tumbling and loading zones of tetrahedra with a movable centre of mass."""

__version__ = "0.1.0"
