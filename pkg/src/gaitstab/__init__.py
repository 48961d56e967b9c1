"""Stabilization of periodic gaits for multi-domain hybrid legged models."""

from . import bezier, controller, errors, gait, hybrid_graph, mechanics, poincare, simulate

__all__ = [
    "bezier", "controller", "errors", "gait", "hybrid_graph", "mechanics",
    "poincare", "simulate",
]

__version__ = "0.1.0"
