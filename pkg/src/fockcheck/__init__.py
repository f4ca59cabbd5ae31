"""The fockcheck package.

Numerical checks for weighted Fock spaces, their reproducing kernels and
linear differential equations with entire coefficients.
"""

from .__version__ import __version__

from .base import (
    DIVERGING,
    IN_SPACE,
    UNRESOLVED,
    ConditionError,
    ConfigError,
    FockError,
    InputError,
    MomentError,
    SeriesTruncationError,
    SolverError,
    Verdict,
    WeightError
)

from .weights import (
    WeightProfile,
    classical_gaussian,
    classify_weight,
    double_exponential,
    exponential,
    fock_sobolev_weight,
    laplacian_radial,
    lemma28_admissible,
    power,
    scaled_exponential,
    tau
)

from .entire import (
    EntireFunction,
    NamedForm,
    Polynomial,
    PowerSeries,
    antiderivative,
    differentiate,
    evaluate,
    max_modulus,
    nevanlinna_proxy
)

from .quadrature import (
    QuadratureConfig,
    SpaceSpec,
    fock_sobolev_norm,
    plane_integral,
    segment_integral,
    weighted_norm
)

from .kernel import (
    KernelBasis,
    compute_deltas,
    inner_product_identity_check,
    kernel_eval,
    reproduce_check
)

from .ode import (
    LDEProblem,
    growth_envelope,
    membership_probe,
    ray_integrate,
    taylor_solve
)

from .conditions import (
    ConditionReport,
    ConstantsConfig,
    ProbeGrid,
    check_kernel_theorem,
    check_thm11,
    check_thm12,
    check_thm13,
    check_thm14,
    check_thm15,
    sup_ratio,
    xk_functional,
    yk_functional,
    zk_functional
)
