"""Approximations to c_n(m, x) = P(log Y_{n-m} > k psi(n) + (a_n + b_n x)/sqrt(alpha_n)).

Y_j is a product of k independent Gamma(j, 1) variables, so log Y_j is a sum of
k i.i.d. copies of log Gamma(j, 1) whose cumulants are polygamma values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scaling import (
    Ensemble,
    Regime,
    RegimeDecl,
    ScalingConstants,
    constants_for,
    q1,
    q2,
    u_n,
    v_alpha,
)
from .specfun import (
    digamma,
    log_gamma,
    mills_upper_tail,
    norm_cdf,
    norm_pdf,
    polygamma,
    reg_gamma_q,
)

__all__ = [
    "LogGammaCumulants",
    "CnQuery",
    "cumulants",
    "mgf_log_gamma",
    "edgeworth_cdf",
    "exact_cn_k1",
    "approx_cn_infinite",
    "approx_cn_finite",
    "approx_cn_zero",
    "log_cdf_approx_infinite",
    "U_MIN_INFINITE",
    "ALPHA_MIN_INFINITE",
]

U_MIN_INFINITE = 1.5
ALPHA_MIN_INFINITE = 10.0


@dataclass(frozen=True)
class LogGammaCumulants:
    j: int
    mu: float
    sigma2: float
    gamma1: float
    gamma2: float


def cumulants(j: int) -> LogGammaCumulants:
    """Mean, variance and the skewness/kurtosis corrections of log Gamma(j, 1)."""
    if j < 1:
        raise DomainError("shape j must be >= 1")
    s2 = polygamma(1, float(j))
    return LogGammaCumulants(
        j=int(j),
        mu=digamma(float(j)),
        sigma2=s2,
        gamma1=polygamma(2, float(j)) / (6.0 * s2**1.5),
        gamma2=polygamma(3, float(j)) / (24.0 * s2 * s2),
    )


def mgf_log_gamma(j, lam):
    """E[exp(lam log S)] = Gamma(j + lam) / Gamma(j) for S ~ Gamma(j, 1), lam > -j."""
    return math.exp(log_gamma(j + lam) - log_gamma(j))


@dataclass(frozen=True)
class CnQuery:
    e: Ensemble
    m: int
    x: float

    def __post_init__(self):
        if not (0 <= self.m <= self.e.n - 1):
            raise DomainError("m must satisfy 0 <= m <= n - 1")

    @property
    def constants(self) -> ScalingConstants:
        return constants_for(self.e)

    @property
    def threshold(self) -> float:
        sc = self.constants
        return sc.centering + (sc.a_n + sc.b_n * self.x) / math.sqrt(sc.alpha_n)


def _clip(value, return_clipped):
    clipped = min(1.0, max(0.0, value))
    if return_clipped:
        return clipped, clipped != value
    return clipped


def edgeworth_cdf(j: int, k: int, x_n, return_clipped: bool = False):
    """One-term Edgeworth approximation of P((log Y_j - k psi(j)) / sqrt(k psi'(j)) <= x_n).

    The skewness correction uses the exact gamma1 of shape ``j``.  Accepts
    scalars or arrays.
    """
    if k < 2:
        raise DomainError("Edgeworth expansion needs k >= 2")
    x = np.asarray(x_n, dtype=float)
    if np.any(np.abs(x) > j ** (1.0 / 6.0)):
        warnings.warn(
            f"|x_n| = {np.abs(x).max():.3g} exceeds j^(1/6); expansion used outside its range",
            stacklevel=2,
        )
    g1 = cumulants(j).gamma1
    value = norm_cdf(x) + g1 * (1.0 - x * x) * norm_pdf(x) / math.sqrt(k)
    clipped = np.clip(value, 0.0, 1.0)
    if x.ndim == 0:
        return _clip(float(value), return_clipped)
    return (clipped, bool(np.any(clipped != value))) if return_clipped else clipped


def exact_cn_k1(q: CnQuery) -> float:
    """c_n(m, x) for k = 1: the upper tail Q(n - m, e^threshold) of Gamma(n - m, 1)."""
    if q.e.k != 1:
        raise DomainError("exact evaluation is only available for k = 1")
    t = q.threshold
    if t > 709.0:
        return 0.0
    return reg_gamma_q(float(q.e.n - q.m), math.exp(t))


def approx_cn_infinite(q: CnQuery, return_clipped: bool = False):
    """phi(u)/u with u = u_n(m, x); valid when u is large (alpha = inf regime)."""
    u = float(u_n(q.m, q.x, q.constants))
    if u < U_MIN_INFINITE:
        raise DomainError(f"u_n(m, x) = {u:.4g} below validity threshold {U_MIN_INFINITE}")
    return _clip(norm_pdf(u) / u, return_clipped)


def approx_cn_finite(q: CnQuery, decl: RegimeDecl, return_clipped: bool = False):
    """1 - Phi(v) - phi(v) (q1/n + (alpha_n - alpha) q2) with v = v_alpha(m, x)."""
    if decl.kind is not Regime.FINITE:
        raise DomainError("finite-alpha expansion needs a finite regime declaration")
    sc = constants_for(q.e, decl)
    v = float(v_alpha(q.m, q.x, sc))
    corr = float(q1(q.m, q.x, sc)) / q.e.n + (sc.alpha_n - sc.alpha) * float(q2(q.m, q.x, sc))
    value = mills_upper_tail(v) - norm_pdf(v) * corr
    return _clip(value, return_clipped)


def approx_cn_zero(q: CnQuery, return_clipped: bool = False):
    """1 - Phi(x) - (sqrt(alpha_n) - x/(4n)) phi(x), for m = 0."""
    if q.m != 0:
        raise DomainError("the alpha = 0 expansion covers m = 0 only")
    x = q.x
    value = mills_upper_tail(x) - (math.sqrt(q.e.alpha_n) - x / (4.0 * q.e.n)) * norm_pdf(x)
    return _clip(value, return_clipped)


def log_cdf_approx_infinite(x, e: Ensemble, sc: ScalingConstants | None = None):
    """Leading-order log P(X_n <= x) for alpha = inf.

    -exp(-x - (x - l2)^2 / (2L)) / (1 + (x - l2)/L)^2 with L = log(alpha_n + e)
    and l2 = log(sqrt(2 pi) log(alpha_n + e^{1/sqrt(2 pi)})).
    """
    alpha_n = e.alpha_n
    if alpha_n < ALPHA_MIN_INFINITE:
        raise DomainError(f"alpha_n = {alpha_n:.4g} below {ALPHA_MIN_INFINITE}")
    big_l = math.log(alpha_n + math.e)
    l2 = math.log(
        math.sqrt(2.0 * math.pi) * math.log(alpha_n + math.exp(1.0 / math.sqrt(2.0 * math.pi)))
    )
    xa = np.asarray(x, dtype=float)
    d = xa - l2
    out = -np.exp(-xa - d * d / (2.0 * big_l)) / (1.0 + d / big_l) ** 2
    return float(out) if out.ndim == 0 else out
