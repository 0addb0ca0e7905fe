"""Hex spheres: cone-metric spheres, their Voronoi graphs and cell geometry."""

__version__ = "0.1.0"
