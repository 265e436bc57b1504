"""Exact verification of linear and quadratic evaluations of the so/sp Yangian."""

__version__ = "0.1.0"
