"""Square-root-regularized linear regression with weakly decomposable penalties.

The estimator minimizes ``||Y - X b||_n + lam * Omega(b)`` for a family of
sparsity-inducing norms (l1, group, sorted-l1, sparse-group, cone-structured).
The package also computes the closed-form penalty levels, the effective
sparsity constants and the two-sided error-bound certificates that go with
these estimators, and ships a simulation benchmark plus a CLI.
"""

from .errors import (
    CalibrationError,
    DegenerateDesignError,
    DimensionError,
    DisallowedSetError,
    InterpolationError,
    SqrtRegError,
)
from .model import (
    GroundTruth,
    RegressionProblem,
    inner_n,
    norm_n,
    prediction_error_l2,
    residual,
)
from .norms import (
    BoxCone,
    ComplementNorm,
    GroupNorm,
    L1Norm,
    Norm,
    ScaledNorm,
    SortedL1Norm,
    SparseGroupNorm,
    StructuredNorm,
    WedgeCone,
    complement_norm_value,
    dual_norm,
    ell2_comparison_constant,
    norm_from_config,
    norm_value,
    prox,
)
from .simulate import (
    SimulationConfig,
    SimulationReport,
    cross_validate_lambda,
    generate_problem,
    run_study,
)
from .solver import FitResult, SolverConfig, check_kkt, fit, fixed_point_check
from .theory import (
    EffectiveSparsityEstimate,
    EmpiricalLevels,
    OracleCertificate,
    OraclePointResult,
    ProbabilityBoundParams,
    best_oracle_point,
    calibration_constants,
    effective_sparsity,
    effective_sparsity_detail,
    empirical_levels,
    expected_dual_bound,
    noise_norm_bound,
    noise_norm_bound_factor,
    oracle_certificate,
    probability_bound,
    theoretical_lambda,
)

__version__ = "0.1.0"
