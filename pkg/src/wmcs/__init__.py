"""Weighted, local, and mixture model confidence sets for univariate densities."""

from .confidence_set import ConfidenceSet, build_local_mcs, build_mcs
from .errors import (
    DegenerateMixtureError,
    DegenerateVarianceError,
    EstimationError,
    InsufficientDataError,
    NonConvergenceError,
    NotAvailableError,
    ParameterDomainError,
    QuadratureError,
)
from .estimation import Dataset, FittedModel, OptimizerOptions, fit_qmle, mean_log_density
from .estimators import LocalConfidenceSet, MixtureConfidenceSet, ModelConfidenceSet
from .families import (
    FAMILY_REGISTRY,
    Cauchy,
    Gamma,
    Laplace,
    LaplaceLogisticMixture,
    Logistic,
    Lognormal,
    Normal,
    ParamFamily,
    Weibull,
    family_from_spec,
)
from .harness import ExperimentConfig, example1_config, example2_config, run_example1, run_example2
from .metrics import DensityHandle, hellinger, kl_divergence, l2_distance
from .mixture import (
    MixtureCandidate,
    MixtureSet,
    RegionDensity,
    beta_budget,
    build_mixture_set,
    optimal_alpha,
    psi_hat,
)
from .vuong import PairStatistic, TestOutcome, a_hat_squared, critical_value, decide, t_statistic
from .weights import (
    Region,
    WeightedFamily,
    WeightSpec,
    identity,
    indicator,
    length_biased,
    weighted_family_from_spec,
)

__version__ = "0.1.0"

__all__ = [
    "Cauchy",
    "ConfidenceSet",
    "Dataset",
    "DegenerateMixtureError",
    "DegenerateVarianceError",
    "DensityHandle",
    "EstimationError",
    "ExperimentConfig",
    "FAMILY_REGISTRY",
    "FittedModel",
    "Gamma",
    "InsufficientDataError",
    "Laplace",
    "LaplaceLogisticMixture",
    "LocalConfidenceSet",
    "Logistic",
    "Lognormal",
    "MixtureCandidate",
    "MixtureConfidenceSet",
    "MixtureSet",
    "ModelConfidenceSet",
    "NonConvergenceError",
    "Normal",
    "NotAvailableError",
    "OptimizerOptions",
    "PairStatistic",
    "ParamFamily",
    "ParameterDomainError",
    "QuadratureError",
    "Region",
    "RegionDensity",
    "TestOutcome",
    "Weibull",
    "WeightSpec",
    "WeightedFamily",
    "a_hat_squared",
    "beta_budget",
    "build_local_mcs",
    "build_mcs",
    "build_mixture_set",
    "critical_value",
    "decide",
    "example1_config",
    "example2_config",
    "family_from_spec",
    "fit_qmle",
    "hellinger",
    "identity",
    "indicator",
    "kl_divergence",
    "l2_distance",
    "length_biased",
    "mean_log_density",
    "optimal_alpha",
    "psi_hat",
    "run_example1",
    "run_example2",
    "t_statistic",
    "weighted_family_from_spec",
]
