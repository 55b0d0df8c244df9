"""Finite-volume drift-diffusion solver with a reduced boundary basis.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._fvrb import (  # noqa: F401
    BoundaryFluxes,
    CatalyticIndex,
    ChannelGrid,
    GlobalSolution,
    ReactionModel,
    ReducedBasis,
    ReducedSolution,
    Region,
    ScenarioConfig,
    SolveReport,
    Span,
    TransportOperator,
    VelocityField,
    assemble,
    bernoulli,
    boundary_flux,
    build_grid,
    catalytic_index,
    compress,
    export_boundary_profile,
    global_solve,
    hagen_poiseuille,
    load_basis,
    load_config,
    mass_action_co_oxidation,
    offline,
    online,
    online_jacobian,
    online_residual,
    reaction_model,
    reconstruct,
    run_scenario,
    save_basis,
    scale_rate,
    sweep_k,
    sweep_levels,
    tag_boundary,
    tag_edges,
    zero_velocity,
)

__version__ = "0.1.0"
