"""Exact and Monte Carlo calculus for origin-symmetric convex bodies, with
numerical checks of shadow (hyperplane projection) inequalities for
projection bodies."""

from .bodies import (
    Ball,
    Body,
    FacetBody,
    FacetMeasure,
    Zonotope,
    canonicalize_measure,
    make_box,
    make_cross_polytope,
    rotate,
    scale,
    support,
    surface_measure,
)
from .calculus import (
    VolumeResult,
    cauchy_surface_area,
    minkowski_first_gap,
    mixed_volume_v1,
    steiner_2d,
    surface_area,
    unit_ball_volume,
    volume,
    volume_from_measure,
    zonotope_sum,
)
from .inequalities import (
    CheckReport,
    ball_equality_gap,
    cn,
    hyperplane_check,
    separation_check,
    surface_hyperplane_check,
    volume_difference_check,
)
from .shadows import (
    SphereSearchConfig,
    min_over_sphere,
    orthobasis,
    project_zonotope,
    projection_body,
    projection_surface_area,
    projection_volume,
)

__version__ = "0.1.0"
