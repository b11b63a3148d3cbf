"""Propagator decomposition across dividing surfaces, with verification tooling."""

from .core import (
    GridModel,
    Model,
    PhysicalParams,
    PotentialSpec,
    SpectralDecomposition,
    build_hamiltonian,
    composition_residual,
    gaussian_packet,
    propagator,
    spectral_decompose,
)
from .projectors import (
    Projector,
    RegionSpec,
    heisenberg_projector,
    momentum_projector,
    position_projector,
)
from .restricted import (
    DirichletEvolution,
    RestrictedPropagator,
    SubspaceEvolution,
    ZenoConfig,
    dirichlet_restricted,
    zeno_convergence_study,
    zeno_product,
)
from .pdx import (
    CrossingClassTerms,
    QuadratureSpec,
    SlicingSpec,
    crossing_matrix_element,
    generalized_pdx_residual,
    pdx_assemble_opposite,
    pdx_assemble_same_side,
    resolution_of_identity,
    surface_flux,
)
from .crossing import (
    CrossingAmplitude,
    CrossingWindow,
    SumRuleReport,
    candidate_probability,
    first_crossing_amplitude,
    never_cross_probability,
    sum_rule_diagnostic,
)
from .momentum import (
    DualModel,
    dual_map,
    duality_fidelity,
    momentum_pdx_residual,
    momentum_restricted_propagator,
)

__version__ = "0.1.0"
