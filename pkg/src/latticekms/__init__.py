"""latticekms: desk-scale computations for semigroup C*-dynamics over Z_+^n.

The package makes the equilibrium-state theory of Toeplitz-Nica-Pimsner
algebras of finite-dimensional systems computable: invariance ideals and
injectivity, truncated Fock representations with scoped Nica-covariance
checks, Gibbs-type KMS functionals with rigorous series radii, ground and
infinite-temperature limits, trace recovery through the defect
projection, descent to the Cuntz-Nica-Pimsner quotient, tail-adding
dilations, and the multivariable prescribing-set conditions.
"""

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    EndomorphismViolation,
    Ideal,
    StarEndomorphism,
    State,
    TracialState,
    endomorphism_from_map,
    is_tracial,
    kernel_ideal,
    preimage_ideal,
    quotient,
    validate_endomorphism,
)
from .dynamics import (
    DilatedSystem,
    DynamicalSystem,
    classify_injectivity,
    compose_action,
    dilate,
    invariance_ideal,
    trace_from_dilation,
)
from .errors import (
    BudgetError,
    ConfigError,
    InvariantFault,
    RegimeError,
    ScopeEscalationError,
    SizeGuardError,
    TruncationDepthError,
)
from .fock import TruncatedFock, build_representation, operator_triples
from .kms import (
    KmsFunctional,
    KmsParams,
    NoKmsCertificate,
    ValueWithRadius,
    cnp_descent,
    dilation_trace_functional,
    eval_kms_infinity,
    eval_psi_tau,
    external_functional,
    ground_functional,
    kms_infinity_functional,
    no_kms_certificate,
    pm_level_for,
    pm_mass,
    psi_tau_functional,
    recover_trace,
    tracial_factorization_check,
    verify_kms,
)
from .lattice import (
    GridGeometricSum,
    MultiIndex,
    enumerate_grid,
    geometric_grid_sum,
    inclusion_exclusion_sum,
)
from .monomial import (
    Monomial,
    MonomialSum,
    defect_projection,
    embed,
    gauge_scale,
    multiply,
    shift,
    unit_monomial,
)
from .multikms import (
    ClassificationTable,
    PrescribingSet,
    check_multikms,
    classify_prescribing_sets,
    enumerate_corners,
    sigma_invariance_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
