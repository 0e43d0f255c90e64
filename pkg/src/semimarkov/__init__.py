"""Simulation and verification laboratory for semi-Markov diffusion limits."""

from .errors import (
    HorizonExceeded,
    InvalidStochasticMatrix,
    MissingSojournLaw,
    NotIrreducible,
    ParseError,
    PeriodicChain,
    QuadratureFailure,
    SchemaError,
    SemiMarkovError,
    TooFewSamples,
)
from .kernel import (
    ChainStructure,
    SemiMarkovKernel,
    SojournLaw,
    sojourn_moments,
    stationary_distribution,
    tv_to_stationary,
    validate_kernel,
)
from .limits import (
    LimitParameters,
    autocovariance,
    gamma2_series,
    limit_parameters,
    mean_sojourn,
    occupancy_limit,
    theta,
)
from .regen import (
    CycleSet,
    estimate_gamma2_cycles,
    harvest_cycles,
    split_cycles,
    wald_check,
)
from .simulate import (
    Trajectory,
    counting,
    integral_path,
    residual_life,
    sample_markov_renewal,
    scaled_integral_path,
    semi_markov_value,
)
from .telegraph import (
    TelegraphSpec,
    alternating_kernel,
    alternating_limits,
    alternating_poisson_pmf,
    telegraph_limit,
    telegraph_state_law,
)
from .verify import (
    VerificationReport,
    clt_suite,
    ergodic_suite,
    ks_statistic,
    occupancy_suite,
    renewal_suite,
    residual_suite,
)

__all__ = [
    "ChainStructure",
    "CycleSet",
    "HorizonExceeded",
    "InvalidStochasticMatrix",
    "LimitParameters",
    "MissingSojournLaw",
    "NotIrreducible",
    "ParseError",
    "PeriodicChain",
    "QuadratureFailure",
    "SchemaError",
    "SemiMarkovError",
    "SemiMarkovKernel",
    "SojournLaw",
    "TelegraphSpec",
    "TooFewSamples",
    "Trajectory",
    "VerificationReport",
    "alternating_kernel",
    "alternating_limits",
    "alternating_poisson_pmf",
    "autocovariance",
    "clt_suite",
    "counting",
    "ergodic_suite",
    "estimate_gamma2_cycles",
    "gamma2_series",
    "harvest_cycles",
    "integral_path",
    "ks_statistic",
    "limit_parameters",
    "mean_sojourn",
    "occupancy_limit",
    "occupancy_suite",
    "renewal_suite",
    "residual_life",
    "residual_suite",
    "sample_markov_renewal",
    "scaled_integral_path",
    "semi_markov_value",
    "sojourn_moments",
    "split_cycles",
    "stationary_distribution",
    "telegraph_limit",
    "telegraph_state_law",
    "theta",
    "tv_to_stationary",
    "validate_kernel",
    "wald_check",
]
