"""Ensemble descriptors, normalising constants and coordinate maps.

The statistic of interest is

    X_n = (sqrt(alpha_n) * (max_j log|Z_j|^2 - k psi(n)) - a_n) / b_n,

with alpha_n = n / k.  The limit constants a, b, c1, c2 are the same formulas
evaluated at the declared limit alpha.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .specfun import digamma, polygamma

__all__ = [
    "Ensemble",
    "Regime",
    "RegimeDecl",
    "ScalingConstants",
    "a_of",
    "b_of",
    "c1_of",
    "c2_of",
    "constants_for",
    "u_n",
    "v_alpha",
    "v_n",
    "q1",
    "q2",
    "rescale_max",
    "unscale",
]

_E_INV_SQRT_2PI = math.exp(1.0 / math.sqrt(2.0 * math.pi))
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Ensemble:
    """Product of ``k`` independent ``n x n`` complex Ginibre matrices."""

    n: int
    k: int

    def __post_init__(self):
        for name in ("n", "k"):
            val = getattr(self, name)
            if int(val) != val or val < 1:
                raise DomainError(f"{name} must be a positive integer, got {val!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))

    @property
    def alpha_n(self) -> float:
        return self.n / self.k

    @property
    def beta_n(self) -> float:
        return self.n**3 / self.k


class Regime(str, enum.Enum):
    ZERO = "zero"
    FINITE = "finite"
    INFINITE = "infinite"


@dataclass(frozen=True)
class RegimeDecl:
    """Declared limit regime of the sequence (n, k_n).

    ``beta`` is the limit of n^3/k_n (zero regime only) and ``eta`` the limit
    of (alpha_n - alpha) n (finite regime only).  Either may be ``math.inf``.
    """

    kind: Regime
    alpha: Optional[float] = None
    beta: Optional[float] = None
    eta: Optional[float] = None

    def __post_init__(self):
        kind = Regime(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Regime.FINITE:
            if self.alpha is None or not (self.alpha > 0) or math.isinf(self.alpha):
                raise DomainError("finite regime needs a finite alpha > 0")
            if self.eta is None:
                raise DomainError("finite regime needs eta")
            if self.beta is not None:
                raise DomainError("beta is only meaningful in the zero regime")
        elif kind is Regime.ZERO:
            if self.beta is None or self.beta < 0:
                raise DomainError("zero regime needs beta >= 0 (may be inf)")
            if self.eta is not None:
                raise DomainError("eta is only meaningful in the finite regime")
            if self.alpha not in (None, 0, 0.0):
                raise DomainError("zero regime has alpha = 0")
        else:
            if self.beta is not None or self.eta is not None:
                raise DomainError("infinite regime takes neither beta nor eta")

    @classmethod
    def zero(cls, beta: float) -> "RegimeDecl":
        return cls(Regime.ZERO, beta=float(beta))

    @classmethod
    def finite(cls, alpha: float, eta: float = 0.0) -> "RegimeDecl":
        return cls(Regime.FINITE, alpha=float(alpha), eta=float(eta))

    @classmethod
    def infinite(cls) -> "RegimeDecl":
        return cls(Regime.INFINITE)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "alpha": self.alpha, "beta": self.beta, "eta": self.eta}


def a_of(alpha):
    """Centering constant a(alpha); equals a_n at alpha = alpha_n."""
    al = np.asarray(alpha, dtype=float)
    out = np.sqrt(np.log1p(al)) - np.log(
        _SQRT_2PI * np.log(al + _E_INV_SQRT_2PI)
    ) / np.sqrt(np.log(al + math.e))
    return float(out) if out.ndim == 0 else out


def b_of(alpha):
    """Scale constant b(alpha) = 1/sqrt(log(alpha + e))."""
    al = np.asarray(alpha, dtype=float)
    out = 1.0 / np.sqrt(np.log(al + math.e))
    return float(out) if out.ndim == 0 else out


def _w(t):
    return 2.0 * t * math.log(t)


def c1_of(alpha: float) -> float:
    """First-order coefficient of a_n in alpha_n - alpha, i.e. a'(alpha).

    The two trailing terms carry the signs obtained by differentiating a(alpha).
    """
    if not alpha > 0:
        raise DomainError("c1 is defined for alpha > 0")
    r = _E_INV_SQRT_2PI
    sle = math.sqrt(math.log(alpha + math.e))
    return (
        math.sqrt(math.log1p(alpha)) / _w(alpha + 1.0)
        - 2.0 / (_w(alpha + r) * sle)
        + math.log(_SQRT_2PI * math.log(alpha + r)) / (_w(alpha + math.e) * sle)
    )


def c2_of(alpha: float) -> float:
    """Minus the first-order coefficient of b_n in alpha_n - alpha."""
    if not alpha > 0:
        raise DomainError("c2 is defined for alpha > 0")
    return 1.0 / (2.0 * (alpha + math.e) * math.log(alpha + math.e) ** 1.5)


@dataclass(frozen=True)
class ScalingConstants:
    """Finite-n constants plus limit constants for the declared regime.

    Limit fields that do not apply to the regime are ``None``.
    """

    alpha_n: float
    a_n: float
    b_n: float
    centering: float
    alpha: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None

    def require_finite(self):
        if self.alpha is None or self.c1 is None:
            raise DomainError("operation needs the finite-alpha regime constants")

    def to_dict(self) -> dict:
        return {
            "alpha_n": self.alpha_n,
            "a_n": self.a_n,
            "b_n": self.b_n,
            "centering": self.centering,
            "alpha": self.alpha,
            "a": self.a,
            "b": self.b,
            "c1": self.c1,
            "c2": self.c2,
        }


def constants_for(e: Ensemble, decl: Optional[RegimeDecl] = None) -> ScalingConstants:
    alpha_n = e.alpha_n
    base = dict(
        alpha_n=alpha_n,
        a_n=a_of(alpha_n),
        b_n=b_of(alpha_n),
        centering=e.k * digamma(float(e.n)),
    )
    if decl is None or decl.kind is Regime.INFINITE:
        return ScalingConstants(**base)
    if decl.kind is Regime.ZERO:
        return ScalingConstants(**base, alpha=0.0, a=0.0, b=1.0)
    al = decl.alpha
    return ScalingConstants(
        **base, alpha=al, a=a_of(al), b=b_of(al), c1=c1_of(al), c2=c2_of(al)
    )


def limit_constants(alpha: float) -> ScalingConstants:
    """Constants for the limit law at ``alpha`` alone (no finite-n part)."""
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    a, b = a_of(alpha), b_of(alpha)
    return ScalingConstants(
        alpha_n=alpha, a_n=a, b_n=b, centering=0.0,
        alpha=alpha, a=a, b=b, c1=c1_of(alpha), c2=c2_of(alpha),
    )


def u_n(m, x, sc: ScalingConstants):
    if not sc.alpha_n > 0:
        raise DomainError("alpha_n must be > 0")
    return np.asarray(m) / math.sqrt(sc.alpha_n) + sc.a_n + sc.b_n * np.asarray(x)


def v_alpha(m, x, sc: ScalingConstants):
    sc.require_finite()
    return np.asarray(m) / math.sqrt(sc.alpha) + sc.a + sc.b * np.asarray(x)


def v_n(m, x, e: Ensemble, sc: ScalingConstants):
    """Standardised threshold of log Y_{n-m} at the X_n coordinate ``x``."""
    m_arr = np.asarray(m)
    if np.any(m_arr < 0) or np.any(m_arr >= e.n):
        raise DomainError("m must satisfy 0 <= m <= n - 1")
    j = (e.n - m_arr).astype(float)
    var = polygamma(1, j)
    drift = e.k * (digamma(float(e.n)) - digamma(j)) / np.sqrt(e.k * var)
    return drift + (sc.a_n + sc.b_n * np.asarray(x)) / np.sqrt(e.n * var)


def q1(m, x, sc: ScalingConstants):
    sc.require_finite()
    al = sc.alpha
    m = np.asarray(m, dtype=float)
    v = v_alpha(m, x, sc)
    sa = math.sqrt(al)
    return (2.0 * al * (v * v - 1.0) - 3.0 * sa * (2.0 * m + 1.0) * v + 6.0 * m * (m + 1.0)) / (
        12.0 * sa
    )


def q2(m, x, sc: ScalingConstants):
    sc.require_finite()
    return sc.c1 - sc.c2 * np.asarray(x) - np.asarray(m, dtype=float) / (2.0 * sc.alpha**1.5)


def rescale_max(raw_max_log_sq, e: Ensemble, sc: ScalingConstants):
    """Map a raw max of log|Z_j|^2 to the X_n coordinate."""
    raw = np.asarray(raw_max_log_sq, dtype=float)
    out = (math.sqrt(sc.alpha_n) * (raw - sc.centering) - sc.a_n) / sc.b_n
    return float(out) if out.ndim == 0 else out


def unscale(x, e: Ensemble, sc: ScalingConstants):
    """Inverse of :func:`rescale_max`."""
    arr = np.asarray(x, dtype=float)
    out = sc.centering + (sc.a_n + sc.b_n * arr) / math.sqrt(sc.alpha_n)
    return float(out) if out.ndim == 0 else out
