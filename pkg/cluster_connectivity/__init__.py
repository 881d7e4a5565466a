"""Connectivity post-processing and description-length toolkit for graph clusterings."""

__version__ = "1.0.0"
