"""Quantitative transversal and Hadwiger-type tools for planar convex sets."""

__version__ = "0.1.0"
