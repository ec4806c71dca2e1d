"""Diagonal Riccati stability certificates for matrix pairs.

Decide whether a pair (A, B) admits diagonal positive definite P, Q making
the block matrix [[A'P + PA + Q, PB], [B'P, -Q]] negative definite, produce
either the certificate or a structured infeasibility witness, and apply
certificates to verify delay-independent stability of generalized
Lotka-Volterra systems with a discrete delay.
"""

from .certificates import (
    DiagonalPair,
    RiccatiCertificate,
    lyapunov_consequences,
    riccati_block,
    riccati_form,
    trace_identity_residual,
    verify_certificate,
)
from .errors import (
    DimensionError,
    EigensolveError,
    InvalidWitness,
    InversionError,
    NoPositiveVector,
    NotNegativeDefinite,
    NotTriangular,
    PreconditionError,
    StepCollapse,
    VerificationError,
)
from .formats import (
    FormatError,
    Problem,
    canon_dumps,
    certificate_from_json,
    certificate_to_json,
    decision_to_json,
    format_float,
    load_problem,
    problem_checksum,
    witness_from_json,
    witness_to_json,
    write_trajectory_csv,
)
from .lv import (
    BoundednessReport,
    DecayReport,
    DelayLVModel,
    InteractionFunction,
    LKWeights,
    Trajectory,
    boundedness_experiment,
    integrate,
    lk_value,
    mutualistic_equilibrium,
    verify_decay,
)
from .matrices import (
    DEFAULT_TOL,
    is_hurwitz,
    is_metzler,
    is_negative_definite,
    is_nonnegative,
    metzler_diagonal_lyapunov,
    metzler_positive_vector,
    negative_product_index,
)
from .search import (
    DecisionResult,
    SearchOptions,
    Verdict,
    decide,
    search_certificate,
    search_witness,
)
from .synthesis import metzler_diag_bound, metzler_pair_stable, synthesize
from .witnesses import (
    InfeasibilityWitness,
    triangular_decision,
    triangular_orientation,
    triangular_witness,
    verify_witness,
    witness_diagonal,
    witness_min_diag,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "BoundednessReport",
    "DecayReport",
    "DecisionResult",
    "DelayLVModel",
    "DiagonalPair",
    "DimensionError",
    "EigensolveError",
    "FormatError",
    "InfeasibilityWitness",
    "InteractionFunction",
    "InvalidWitness",
    "InversionError",
    "LKWeights",
    "NoPositiveVector",
    "NotNegativeDefinite",
    "NotTriangular",
    "PreconditionError",
    "Problem",
    "RiccatiCertificate",
    "SearchOptions",
    "StepCollapse",
    "Trajectory",
    "VerificationError",
    "Verdict",
    "boundedness_experiment",
    "canon_dumps",
    "certificate_from_json",
    "certificate_to_json",
    "decide",
    "decision_to_json",
    "format_float",
    "integrate",
    "load_problem",
    "is_hurwitz",
    "is_metzler",
    "is_negative_definite",
    "is_nonnegative",
    "lk_value",
    "lyapunov_consequences",
    "metzler_diag_bound",
    "metzler_diagonal_lyapunov",
    "metzler_pair_stable",
    "metzler_positive_vector",
    "mutualistic_equilibrium",
    "negative_product_index",
    "problem_checksum",
    "riccati_block",
    "riccati_form",
    "search_certificate",
    "search_witness",
    "synthesize",
    "trace_identity_residual",
    "triangular_decision",
    "triangular_orientation",
    "triangular_witness",
    "verify_certificate",
    "verify_decay",
    "verify_witness",
    "witness_diagonal",
    "witness_from_json",
    "witness_min_diag",
    "witness_to_json",
    "write_trajectory_csv",
]
