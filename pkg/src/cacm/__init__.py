"""Correlation-aware cache-aided coded multicast: placement, augmented
conflict graphs, greedy group coloring, delivery and analytic bounds."""

__version__ = "0.1.0"
