"""Independent component analysis with the General Split Normal distribution."""

from .cost import Gradient, SuffStats, cost_log_l, grad, profiled_log_likelihood, sigma_tau_hat, suff_stats, value_and_grad
from .errors import (
    DegenerateData,
    DegenerateProjection,
    DimensionMismatch,
    GsnIcaError,
    InsufficientData,
    NonFiniteObjective,
    ParseError,
    SingularMatrix,
)
from .gsn import GsnParams, gsn_logpdf, gsn_sample
from .linalg import covariance, determinant, inverse, mean
from .metrics import CongruenceReport, match_sources, tucker_congruence
from .optimize import FitConfig, FitResult, fit_ica, gradcheck
from .split_normal import SplitNormalParams, sn_fit_1d, sn_logpdf, sn_pdf, sn_sample
from .synth import SUM_DIFF_MIX, gen_skew_sources, inject_outliers, make_experiment, mix

__version__ = "0.1.0"

__all__ = [
    "CongruenceReport",
    "DegenerateData",
    "DegenerateProjection",
    "DimensionMismatch",
    "FitConfig",
    "FitResult",
    "Gradient",
    "GsnIcaError",
    "GsnParams",
    "InsufficientData",
    "NonFiniteObjective",
    "SUM_DIFF_MIX",
    "ParseError",
    "SingularMatrix",
    "SplitNormalParams",
    "SuffStats",
    "cost_log_l",
    "covariance",
    "determinant",
    "fit_ica",
    "gen_skew_sources",
    "grad",
    "gradcheck",
    "gsn_logpdf",
    "gsn_sample",
    "inject_outliers",
    "inverse",
    "make_experiment",
    "match_sources",
    "mean",
    "mix",
    "profiled_log_likelihood",
    "sigma_tau_hat",
    "sn_fit_1d",
    "sn_logpdf",
    "sn_pdf",
    "sn_sample",
    "suff_stats",
    "tucker_congruence",
    "value_and_grad",
]
