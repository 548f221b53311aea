"""Backward Euler partially penalized immersed finite elements for moving-interface heat problems."""

from .benchmarks import make_problem
from .errors import GeometryViolation, PPIFEError, SolverError
from .mesh import build_uniform_mesh
from .stepper import TimeGrid, run

__all__ = ["GeometryViolation", "PPIFEError", "SolverError", "TimeGrid", "build_uniform_mesh", "make_problem", "run"]
__version__ = "0.1.0"
