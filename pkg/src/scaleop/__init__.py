"""Exact harmonic analysis of the scaling-average operator over odd
finite fields: field arithmetic, character sums, grid transforms, sharp
boundedness regions, and a certification suite with CLI and HTTP front
ends."""

from .field import FieldElement, FieldSpec, get_field
from .chars import CharTable, char_table, orthogonality_sum, osc_sum
from .grid import (
    GridFunction,
    Point,
    RadialFunction,
    Variety,
    distance_set,
    expand_radial,
    h_variety,
    is_radial,
    line_punctured,
    lp_norm,
    Lr_norm_on_variety,
    norm_value,
    radial_lp_norm,
    sphere,
    sphere_sizes,
    subspace,
)
from .transform import (
    SOperatorKernel,
    fourier,
    inverse_fourier,
    restricted_L2_norm_of_hat,
    s_apply,
    s_apply_radial,
    s_norm_ratio,
)
from .analysis import (
    ExponentPair,
    RegionSpec,
    certified_upper_bound,
    fit_growth,
    homogeneous_class_ratio,
    lower_bound_delta,
    lower_bound_exponential,
    lower_bound_sphere_radial,
    lower_bound_subspace,
    radial_p1_norm_exact,
    region_contains,
    scan,
)

__version__ = "0.1.0"
