"""Exact Gromov-Hausdorff distances, geodesics and ball-convexity checks for
finite metric spaces and interval unions on the line."""

__version__ = "0.1.0"

from .metric import (  # noqa: E402
    FiniteMetricSpace,
    MetricError,
    diam,
    e_value,
    gh_to_point,
    is_general_position,
    point_space,
    random_general_position,
    s_value,
    validate,
)
from .solver import (  # noqa: E402
    Correspondence,
    GHResult,
    Relation,
    distortion,
    gh_exact,
    gh_exact_bruteforce,
)
from .geodesic import GeodesicCurve, evaluate, make_geodesic  # noqa: E402
from .intervals import IntervalUnion, c_s, hausdorff_distance  # noqa: E402
