"""Multi-planks, their anti-Voronoi stratification, and covering-inequality checks."""
from .geom import Ball, Fan, GeometryError, PolytopeBody, min_enclosing_ball, chebyshev_ball
from .kernels import BACKEND
from .multiplank import GeneratingSet, MultiPlank, center, contains, contains_via_cells
from .tolerance import DEFAULT_TOL, Membership, Tolerance

__version__ = "0.1.0"
