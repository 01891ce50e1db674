"""Renormalization-group tools for two-body contact interactions with complex (lossy) couplings."""
from .core import (
    Coupling,
    FlowDivergence,
    PoleNotFound,
    SingularFlow,
    SystemConfig,
    TMatrixPole,
    from_dimensionless,
    to_dimensionless,
)
from .observables import (
    Region,
    coupling_from_scattering_length,
    localization_length,
    on_critical_semicircle,
    scattering_length_from_coupling,
)
from .poles import (
    admissibility,
    count_emergent_resonances,
    count_emergent_resonances_oracle,
    pole_closed_form,
    pole_solve_numeric,
    pole_trajectory,
)
from .rgflow import analytic_flow, beta, fixed_points, integrate_flow
from .scattering import cross_sections, pair_propagator, rg_invariance_residual, t_matrix
from .special import bessel_k0

__version__ = "0.1.0"

__all__ = [
    "Coupling",
    "FlowDivergence",
    "PoleNotFound",
    "SingularFlow",
    "SystemConfig",
    "TMatrixPole",
    "Region",
    "admissibility",
    "analytic_flow",
    "beta",
    "bessel_k0",
    "count_emergent_resonances",
    "count_emergent_resonances_oracle",
    "coupling_from_scattering_length",
    "cross_sections",
    "fixed_points",
    "from_dimensionless",
    "integrate_flow",
    "localization_length",
    "on_critical_semicircle",
    "pair_propagator",
    "pole_closed_form",
    "pole_solve_numeric",
    "pole_trajectory",
    "rg_invariance_residual",
    "scattering_length_from_coupling",
    "t_matrix",
    "to_dimensionless",
]
