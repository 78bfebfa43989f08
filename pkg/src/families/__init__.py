# Utility families package

from .utility import (
    CARA,
    CORNER_TAGS,
    CRRA,
    FAMILIES,
    ConvexQuadratic,
    Hyperbolic,
    InadaLimit,
    Linear,
    Quadratic,
    ShiftedPower,
    UtilityFamily,
    make_family,
    parse_family,
    parse_params,
)
from .regions import (
    CRRA_REASON,
    MrsResult,
    ParameterRegion,
    all_family_report,
    corner_ratio,
    mrs_condition,
    solve_region,
)
