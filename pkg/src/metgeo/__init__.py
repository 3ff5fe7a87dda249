"""Distances and geodesics for tensor fields under the L2 fiber metric.

The library computes closed-form distances and minimal paths between
(possibly degenerate) symmetric positive-definite tensor fields over a
weighted sample grid, together with independent numerical verification of
the structural properties (minimality, comparison-triangle thinness,
determinant bounds).
"""

from .fiber import (
    CaseTag,
    FiberPoint,
    GeodesicCase,
    NotInExpImage,
    OutOfDomain,
    SampledPath,
    chord_length,
    classify,
    exp_map,
    fiber_distance,
    fiber_geodesic,
    finite_difference_speeds,
    inv_exp,
    log_coords,
    path_length,
    sample_geodesic,
)
from .field import (
    FieldClassification,
    MetricField,
    SampleGrid,
    classify_fields,
    field_distance,
    field_geodesic,
    field_path_length,
    fields_equivalent,
    per_sample_distances,
    sample_field_geodesic,
)
from .spd import (
    EigenSystem,
    InvalidInput,
    NotPositiveDefinite,
    SpdTensor,
    SymTensor,
    fiber_inner,
    fiber_norm,
    spd_log,
    spd_sqrt,
    sym_eigen,
    sym_exp,
    trace_pair,
    traceless_split,
    whiten,
)
from .verify import (
    BoundsReport,
    Cat0Report,
    OracleConfig,
    OracleReport,
    SpeedReport,
    bounds_sweep,
    brute_force_distance,
    cat0_check,
    cat0_sweep,
    field_cat0_check,
    field_cat0_slacks,
    oracle_sweep,
    speed_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsReport",
    "CaseTag",
    "Cat0Report",
    "EigenSystem",
    "FieldClassification",
    "FiberPoint",
    "GeodesicCase",
    "InvalidInput",
    "MetricField",
    "NotInExpImage",
    "NotPositiveDefinite",
    "OracleConfig",
    "OracleReport",
    "OutOfDomain",
    "SampleGrid",
    "SampledPath",
    "SpdTensor",
    "SpeedReport",
    "SymTensor",
    "bounds_sweep",
    "brute_force_distance",
    "cat0_check",
    "cat0_sweep",
    "chord_length",
    "classify",
    "classify_fields",
    "exp_map",
    "fiber_distance",
    "fiber_geodesic",
    "fiber_inner",
    "fiber_norm",
    "field_cat0_check",
    "field_cat0_slacks",
    "field_distance",
    "field_geodesic",
    "field_path_length",
    "fields_equivalent",
    "finite_difference_speeds",
    "inv_exp",
    "log_coords",
    "oracle_sweep",
    "path_length",
    "per_sample_distances",
    "sample_field_geodesic",
    "sample_geodesic",
    "spd_log",
    "spd_sqrt",
    "speed_sweep",
    "sym_eigen",
    "sym_exp",
    "trace_pair",
    "traceless_split",
    "whiten",
]
