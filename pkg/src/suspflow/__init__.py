"""Thermodynamic formalism for suspension flows over subshifts of finite type.

The package provides symbolic dynamics primitives, transfer-operator
pressure and Gibbs measures, suspension flows with roof functions, a
reduction pipeline turning flow observable families into base-level
additive data, level-set dimension spectra, and an embedding laboratory
for unit-time orbit averages on torus flows.
"""

from .errors import NonPrimitiveError, NumericFailure, ResourceLimit, SuspflowError
from .sft import (
    PeriodicPoint,
    PeriodicStream,
    Sft,
    WordStream,
    cylinder_metric,
)
from .potentials import (
    AdditiveFamily,
    AlmostAdditiveFamily,
    AsymptoticFamily,
    LocallyConstantFunction,
    MatrixCocycle,
    almost_additivity_constant,
    birkhoff_sum,
    block_average,
    equivalence_defect,
    orbit_average,
    sampled_equivalence_defect,
)
from .pressure import (
    MarkovMeasure,
    bernoulli_measure,
    family_pressure,
    gibbs_measure,
    markov_measure,
    periodic_orbit_measure,
    pressure,
    topological_entropy,
)
from .suspension import (
    BumpProfile,
    CylinderFlowFunction,
    FlowInvariantMeasure,
    FlowPoint,
    LiftedFunction,
    RoofFunction,
    SampledFunction,
    SuspensionFlow,
    abramov_entropy,
    flow_map,
    flow_pressure,
    induce_measure,
    lift,
    orbit_integral,
    roof_integral,
    roof_integral_function,
    smoothstep_profile,
)
from .equivalence import (
    EquivalenceReport,
    FlowFamily,
    cocycle_flow_family,
    crossing_diagnostic,
    default_samples,
    equivalence_pipeline,
    flow_defect,
    induced_sequence,
    integral_flow_family,
    linear_flow_family,
)
from .spectrum import (
    DiscreteSpectrumProblem,
    SpectrumProblem,
    SpectrumResult,
    level_set_dimension,
    pressure_root,
    ratio_interval,
    spectrum_sweep,
    variational_dimension,
)
from .embedding import (
    CoboundaryCertificate,
    DerivativeReport,
    EmbeddingSolveResult,
    LogPlusConstant,
    Monomial,
    ScalarExpFlow,
    TorusLinearFlow,
    TrigPolynomial,
    average_operator,
    coboundary_lift,
    derivative_obstruction_test,
    flow_derivative,
    resolvent_solve,
    resonant_frequencies,
    solve_embedding,
    torus_grid,
    unit_average_multiplier,
)

__version__ = "0.1.0"
