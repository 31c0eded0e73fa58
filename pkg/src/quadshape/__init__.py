"""Riemannian shape calculus for the quadrature-surface free boundary problem.

The package discretizes smooth closed planar curves spectrally, solves the
overdetermined Poisson state with a first-kind single-layer boundary method,
and exposes the shape functional, its boundary gradient in a curvature-
weighted metric, several routes to the shape Hessian, stability diagnostics,
and a Riemannian gradient descent flow.
"""

# imported first on purpose: pins BLAS threading before numpy loads so that
# reports stay byte-reproducible (see quadshape.cli)
from . import cli  # noqa: F401  (import order side effect)

from .geometry import (
    Curve,
    GeometryError,
    MetricParams,
    NormalField,
    flow_curve,
    metric_inner,
    metric_norm,
    resample_by_arclength,
    spectral_derivative,
)
from .potential import Disk, SourceTerm
from .bem import BoundaryOperators, LayerDensity, SolverError
from .riemannian import (
    covariant_derivative,
    riemannian_gradient,
    torsion,
)
from .shape import (
    ShapeState,
    direct_hessian_form,
    evaluate_J,
    fd_second_derivative,
    hadamard_derivative,
    hessian_report,
    solve_state,
    stability_controls,
    steklov_form,
)
from .flow import FlowConfig, FlowResult, descend
from .config import ConfigError, RunConfig, load_config, parse_config_text

__all__ = [
    "Curve",
    "GeometryError",
    "MetricParams",
    "NormalField",
    "flow_curve",
    "metric_inner",
    "metric_norm",
    "resample_by_arclength",
    "spectral_derivative",
    "Disk",
    "SourceTerm",
    "BoundaryOperators",
    "LayerDensity",
    "SolverError",
    "covariant_derivative",
    "riemannian_gradient",
    "torsion",
    "ShapeState",
    "solve_state",
    "evaluate_J",
    "hadamard_derivative",
    "steklov_form",
    "direct_hessian_form",
    "fd_second_derivative",
    "hessian_report",
    "stability_controls",
    "FlowConfig",
    "FlowResult",
    "descend",
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config_text",
]

__version__ = "0.1.0"
