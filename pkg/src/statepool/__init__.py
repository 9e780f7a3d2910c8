"""Conditional quantum states, agent compatibility and state pooling.

A desk-scale dense linear algebra toolkit for combining two agents'
quantum state assignments: support-overlap compatibility tests, Bayesian
updating with the star product, the multiplicative pooling rule
c * s1 @ pinv(prior) @ s2, and a two-agent coarse-graining simulation
with defective detectors.
"""

from .compatibility import (
    CompatibilityVerdict,
    ConditionalDistribution,
    ProbabilityDistribution,
    classical_compatible,
    quantum_compatible,
    verify_objective_classical,
    verify_objective_quantum,
    verify_subjective_classical,
    verify_subjective_quantum,
)
from .errors import (
    DimensionMismatchError,
    ImpossibleConditioningError,
    IncompatibleAssignmentsError,
    NonHermitianPoolingProductError,
    NotPSDError,
    PriorSupportError,
    StatePoolError,
)
from .linalg import (
    Subspace,
    partial_trace,
    pseudo_inverse,
    sqrt_psd,
    subspace_intersection,
    support_projector,
    tensor,
)
from .pooling import (
    PoolingReport,
    SufficientStatistic,
    check_conditional_independence,
    classical_pool,
    minimal_sufficient_statistic,
    pooled_map,
    quantum_minimal_sufficient_statistic,
    quantum_pool,
)
from .regions import (
    ConditionalState,
    HybridState,
    JointState,
    RegionLabel,
    condition,
    make_hybrid,
    marginalize,
    quantum_bayes,
    star_product,
)
from .scenario import (
    AgentPipeline,
    KrausChannel,
    ScenarioConfig,
    ScenarioResult,
    UnitaryDynamics,
    adversarial_instance,
    apply_channel,
    batch_report,
    dephasing_channel,
    depolarizing_channel,
    evolve,
    haar_unitary,
    random_density,
    random_instance,
    replacement_channel,
    run_pipeline,
    run_scenario,
)

__version__ = "0.1.0"
