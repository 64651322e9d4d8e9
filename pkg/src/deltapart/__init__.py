"""Discretized Schrodinger operators with delta / delta-prime interactions
on the boundaries of polygonal partitions of a truncated plane.

Subpackages follow the pipeline: geometry -> mesh -> forms -> eigen, with
closedform holding every analytic constant, experiments the named
verification runs, and cli the command-line front end.
"""

from . import geometry, mesh, forms, eigen, closedform, experiments, cli

__all__ = [
    "geometry",
    "mesh",
    "forms",
    "eigen",
    "closedform",
    "experiments",
    "cli",
]

__version__ = "0.1.0"
