"""Convex tangent spaces, normal cones, and Terracini convexity checks
for polyhedral, semidefinite, linear-image, Veronese, and hyperbolicity
cones, with LP/SDP exact-recovery experiments on top.
"""

__version__ = "0.1.0"

from .cones import (
    ConeModel,
    Hyperbolicity,
    LinearImage,
    Polyhedral,
    Psd,
    Veronese,
    cone_from_json_dict,
    normal_cone,
    random_polyhedral_cone,
)
from .errors import (
    ConekitError,
    DomainError,
    NumericalFailure,
    UnsupportedOperationError,
    UsageError,
)
from .hyperbolic import (
    HyperbolicSpectrum,
    check_hyperbolic,
    derivative_relaxation,
    deriv_terracini_experiment,
    hyperbolic_eigenvalues,
    lineality_space,
    localize,
    verify_mult3,
)
from .linalg import Subspace, SymVec, smat, svec
from .neighborly import (
    GrowthCertificate,
    NeighborlinessVerdict,
    builtin_dataset,
    double_vanishing_dimension,
    estimate_growth_constant,
    is_k_neighborly_polyhedral,
    kw_certificate_veronese,
)
from .polynomials import (
    SparsePoly,
    determinant_polynomial,
    elementary_symmetric,
    hankel_determinant_polynomial,
    parse_poly,
    product_poly,
)
from .recovery import (
    RecoveryTrial,
    dt_equivalence_study,
    exact_recovery_trial_lp,
    exact_recovery_trial_sdp,
    gaussian_map_psd,
    most_tc_study,
    null_interior_check,
    run_experiment,
    unique_preimage_check,
)
from .tangent import (
    TerraciniVerdict,
    convex_tangent_space,
    is_k_terracini_dual,
    is_k_terracini_primal,
    terracini_upgrade_check,
)

__all__ = [
    "ConeModel",
    "ConekitError",
    "DomainError",
    "GrowthCertificate",
    "Hyperbolicity",
    "HyperbolicSpectrum",
    "LinearImage",
    "NeighborlinessVerdict",
    "NumericalFailure",
    "Polyhedral",
    "Psd",
    "RecoveryTrial",
    "SparsePoly",
    "Subspace",
    "SymVec",
    "TerraciniVerdict",
    "UnsupportedOperationError",
    "UsageError",
    "Veronese",
    "builtin_dataset",
    "check_hyperbolic",
    "cone_from_json_dict",
    "convex_tangent_space",
    "derivative_relaxation",
    "deriv_terracini_experiment",
    "determinant_polynomial",
    "double_vanishing_dimension",
    "dt_equivalence_study",
    "elementary_symmetric",
    "estimate_growth_constant",
    "exact_recovery_trial_lp",
    "exact_recovery_trial_sdp",
    "gaussian_map_psd",
    "hankel_determinant_polynomial",
    "hyperbolic_eigenvalues",
    "is_k_neighborly_polyhedral",
    "is_k_terracini_dual",
    "is_k_terracini_primal",
    "kw_certificate_veronese",
    "lineality_space",
    "localize",
    "most_tc_study",
    "normal_cone",
    "null_interior_check",
    "parse_poly",
    "product_poly",
    "random_polyhedral_cone",
    "run_experiment",
    "smat",
    "svec",
    "terracini_upgrade_check",
    "unique_preimage_check",
    "verify_mult3",
]
