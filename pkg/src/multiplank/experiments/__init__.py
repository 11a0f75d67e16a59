"""Verification experiments built on the core geometry."""
from ..geom import Fan
from .bang import BANG_CAP, BangSet, EscapeReport, bang_set, farthest_escape_check
from .covering import (
    CoverageError,
    CoverageReport,
    CoveringInstance,
    PantsReport,
    chord_partition,
    sample_body,
    split_polygon,
    verify_covering,
    verify_pants_inequality,
)
from .pizza import (
    PizzaResult,
    fan_half_angle,
    fan_neighborhood_multiplank,
    pizza_best_piece,
    pizza_bound,
    random_fans,
)
from .sharpness import (
    SharpnessReport,
    covers_unit_disk,
    min_covering_radius,
    polygon_pair,
    sharpness_two_multiplanks,
)
