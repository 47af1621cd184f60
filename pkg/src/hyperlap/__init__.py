"""Differential operators, p-Laplacians and diffusion flows on oriented hypergraphs."""

from .core import (
    Hyperarc,
    OrientedHypergraph,
    build_hypergraph,
    check_symmetric_hyperarc_weights,
    check_weight_condition,
    inner_product_hyperarc,
    inner_product_vertex,
)
from .dynamics import (
    BoundaryCondition,
    FlowConfig,
    FlowResult,
    dirichlet_solve,
    estimate_step_size,
    neumann_flow,
    renormalized_flow,
    threshold,
    weighted_mean,
)
from .operators import (
    IncidenceSystem,
    OperatorParams,
    Variant,
    adjoint,
    assemble,
    divergence,
    energy,
    gradient,
    p_laplacian,
    p_laplacian_direct,
    rayleigh_quotient,
)

__version__ = "0.1.0"
