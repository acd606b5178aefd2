"""Explicit exponential bounds on c_n(m, x) and a geometric-tail summation bound."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scaling import ScalingConstants

__all__ = [
    "Branch",
    "ChernoffBound",
    "chernoff_cn",
    "chernoff_lower_cn0",
    "chernoff_tail_sum",
    "geometric_tail_sum",
    "SumRegime",
    "MIN_VARSIGMA",
]

MIN_VARSIGMA = 2.0
LARGE_GAMMA_CUSHION = 1.5
BOUNDED_GAMMA_CUSHION = 3.0


class Branch(str, enum.Enum):
    POSITIVE_M = "PositiveM"
    M_ZERO_UPPER = "MZeroUpper"
    M_ZERO_LOWER = "MZeroLower"


@dataclass(frozen=True)
class ChernoffBound:
    m: int
    x: float
    bound: float
    branch: Branch


def _clip01(v):
    return min(1.0, max(0.0, v))


def chernoff_cn(m: int, x: float, sc: ScalingConstants) -> ChernoffBound:
    """Exponential upper bound on c_n(m, x).

    m >= 1 uses exp(-m^2/(16 alpha_n) - m (a_n + b_n x)/(4 sqrt(alpha_n)));
    m = 0 needs x > 0 and uses exp(-(a_n + b_n x)^2 / 4).
    """
    s = sc.a_n + sc.b_n * x
    if m < 0 or int(m) != m:
        raise DomainError("m must be a nonnegative integer")
    if m >= 1:
        expo = -(m * m) / (16.0 * sc.alpha_n) - m * s / (4.0 * math.sqrt(sc.alpha_n))
        return ChernoffBound(int(m), x, _clip01(math.exp(min(expo, 0.0))), Branch.POSITIVE_M)
    if not x > 0:
        raise DomainError("the m = 0 upper bound needs x > 0")
    return ChernoffBound(0, x, _clip01(math.exp(-0.25 * s * s)), Branch.M_ZERO_UPPER)


def chernoff_lower_cn0(x: float, sc: ScalingConstants) -> float:
    """Bound on 1 - c_n(0, x) when a_n + b_n x < 0."""
    s = sc.a_n + sc.b_n * x
    if not s < 0:
        raise DomainError("needs a_n + b_n x < 0")
    return _clip01(math.exp(-s * s / 3.0))


def chernoff_tail_sum(M: int, s, alpha_n: float):
    """Upper bound on sum_{m >= M} of the PositiveM bound (vectorised in s).

    With g(m) = m^2/(16 alpha_n) + m s/(4 sqrt(alpha_n)) convex, the sum is at
    most e^{-g(M)} (1 + 1/g'(M)) once g'(M) > 0; infinite otherwise.
    """
    s = np.asarray(s, dtype=float)
    sa = math.sqrt(alpha_n)
    g = M * M / (16.0 * alpha_n) + M * s / (4.0 * sa)
    dg = M / (8.0 * alpha_n) + s / (4.0 * sa)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(dg > 0, np.exp(-g) * (1.0 + 1.0 / np.where(dg > 0, dg, 1.0)), np.inf)
    return out


class SumRegime(str, enum.Enum):
    LARGE_GAMMA = "LargeGamma"
    BOUNDED_GAMMA = "BoundedGamma"


def geometric_tail_sum(L: int, x: float, c: float, gamma: float, a: float, b: float):
    """Closed-form bound on sum_{m >= L} e^{-c s_m^2} / s_m, s_m = m/gamma + a + b x.

    Requires s_L >= 2.  Returns ``(bound, regime)``.

    Comparing the sum with its integral gives
    e^{-c s_L^2} (1/s_L + gamma / (2 c s_L^2)); the regime is picked by which
    summand dominates (gamma >= 4 c s_L or not), so the fixed cushions 1.5
    and 3 always cover the other summand.
    """
    if L < 0 or not (c > 0) or not (gamma > 0):
        raise DomainError("need L >= 0, c > 0, gamma > 0")
    s = L / gamma + a + b * x
    if s < MIN_VARSIGMA:
        raise DomainError(f"needs m/gamma + a + b x >= {MIN_VARSIGMA} at m = L, got {s:.4g}")
    if gamma >= 4.0 * c * s:
        bound = LARGE_GAMMA_CUSHION * gamma * math.exp(-c * s * s) / (2.0 * c * s * s)
        return bound, SumRegime.LARGE_GAMMA
    bound = BOUNDED_GAMMA_CUSHION * math.exp(-c * s * s) / s
    return bound, SumRegime.BOUNDED_GAMMA
