"""Tensor calculus of statistical structures (Codazzi pairs) with numerical verification."""

from .errors import (
    CodazziError,
    ConstructionError,
    DimensionMismatchError,
    PreconditionError,
    SchemaError,
)
from .tensors import (
    CubicForm,
    CurvTensor,
    MetricPoint,
    Tensor,
    asymmetry_norm,
    frame_components,
    inner,
    lower_last,
    norm,
    orthonormal_frame,
    r0_curvature,
    raise_last,
    ricci_from_curvature,
    scalar_from_ricci,
    symmetrize,
    trace_g,
)
from .points import (
    EqualityCertificate,
    StatPoint,
    best_fit_curvature_coefficient,
    bracket_kk,
    check_ineq_eighth,
    check_ineq_n2over3,
    check_ineq_quarter,
    constant_curvature_residual,
    lagrangian_gauss_residual,
    lpq,
    random_stat_point,
    ric_k,
    ric_k_from_bracket,
    rho_k,
    scalar_gap_bounds,
    sectional_k,
    trace_free_part,
)
from .charts import ChartStructure, ConnectionAt, christoffel, hessian_from_potential
from .generators import FAMILIES, GeneratorSpec, generate
from .spheres import SphereQuadrature, integrate_sphere, monte_carlo, product_gauss
from .structures_io import canonical_json, emit, ingest
from .suites import ResidualReport, SuiteConfig, run_suite

__version__ = "0.1.0"
