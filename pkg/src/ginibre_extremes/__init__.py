"""Extreme eigenvalue statistics for products of complex Ginibre matrices.

Rates of convergence of the rescaled log spectral radius X_n toward its
normal, Phi_alpha or Gumbel limit, together with the numerical machinery
(special functions, limit-law CDFs, an exact k = 1 engine, a reproducible
Monte Carlo sampler and a brute-force eigenvalue oracle) used to check them.
"""

from .errors import BudgetExceeded, DomainError, NumericalFailure
from .grid import GridPolicy
from .limits import LimitLaw, TruncationCertificate
from .rates import RateReport, be_rate, gaussian_weighted_sup, w1_rate
from .sampler import SampleBatch, SeedSpec, exact_cdf_k1, sample_xn
from .scaling import Ensemble, Regime, RegimeDecl, ScalingConstants, constants_for

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "DomainError",
    "Ensemble",
    "GridPolicy",
    "LimitLaw",
    "NumericalFailure",
    "RateReport",
    "Regime",
    "RegimeDecl",
    "SampleBatch",
    "ScalingConstants",
    "SeedSpec",
    "TruncationCertificate",
    "be_rate",
    "constants_for",
    "exact_cdf_k1",
    "gaussian_weighted_sup",
    "sample_xn",
    "w1_rate",
]
