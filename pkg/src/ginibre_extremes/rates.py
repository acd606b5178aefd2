"""Theoretical Berry-Esseen and W1 rates for the three regimes.

The finite-alpha rates are suprema (or integrals) over x of

    Phi_alpha(x) * | sum_m phi(v_m)/Phi(v_m) * (w1 q1(m, x) + w2 q2(m, x)) |

with v_m = m/sqrt(alpha) + a + b x at the limit constants.  The m-series is
cut where a geometric bound on the remainder drops below the grid policy's
tolerance; see :func:`finite_series`.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .empirics import _simpson_level
from .errors import DomainError
from .grid import GridPolicy, golden_max, scan_sup
from .limits import truncation_point
from .scaling import (
    Ensemble,
    Regime,
    RegimeDecl,
    a_of,
    b_of,
    c1_of,
    c2_of,
)
from .specfun import log_norm_cdf, log_norm_pdf, norm_cdf, norm_pdf

__all__ = [
    "GridPolicy",
    "Metric",
    "RateReport",
    "SeriesValue",
    "gaussian_weighted_sup",
    "finite_series",
    "finite_series_sup",
    "be_rate",
    "w1_rate",
    "remark4_upper_bounds",
    "transition_rate",
    "TransitionSide",
    "check_regime",
    "ALPHA_N_MIN_INFINITE",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
ALPHA_N_MIN_INFINITE = 10.0
ALPHA_N_MAX_ZERO = 0.1
BETA_ZERO_MAX = 0.1
BETA_INF_MIN = 10.0
_BLOCK = 1 << 20


class Metric(str, enum.Enum):
    BERRY_ESSEEN = "BerryEsseen"
    W1 = "W1"


@dataclass(frozen=True)
class RateReport:
    regime: RegimeDecl
    metric: Metric
    theoretical: float
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.theoretical >= 0:
            raise DomainError("theoretical rate must be >= 0")

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.to_dict(),
            "metric": Metric(self.metric).value,
            "theoretical": self.theoretical,
            "components": self.components,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def gaussian_weighted_sup(h1: float, h2: float) -> float:
    """sup_x |h1 - h2 x| phi(x) in closed form (h1, h2 >= 0)."""
    if h1 < 0 or h2 < 0:
        raise DomainError("h1 and h2 must be nonnegative")
    if h1 == 0 and h2 == 0:
        raise DomainError("h1 and h2 cannot both vanish")
    r = math.sqrt(h1 * h1 + 4.0 * h2 * h2)
    return (h1 + r) / (2.0 * _SQRT_2PI) * math.exp(h1 / (h1 + r) - 0.5)


# ------------------------------------------------------------ finite alpha


@dataclass(frozen=True)
class SeriesValue:
    values: np.ndarray
    terms_used: int
    tail_bound: float


def _abs_coeff_max(coeff, s_lo, s_hi):
    # |polynomial in s| is convex on [s_lo, s_hi] only for affine ones; the
    # quadratic below is bounded by splitting it into monomials instead
    return max(abs(coeff(s_lo)), abs(coeff(s_hi)))


def _q_bound(alpha, w1, w2, s_lo, s_hi, x_lo, x_hi, c1, c2):
    """Nonnegative polynomial P with |w1 q1 + w2 q2| <= P(m) for s in range."""
    sa = math.sqrt(alpha)
    smax = max(abs(s_lo), abs(s_hi))
    # 12 sqrt(alpha) q1 = 2 m^2 + (3 - 2 sqrt(alpha) s) m + 2 alpha s^2 - 3 sqrt(alpha) s - 2 alpha
    lin1 = _abs_coeff_max(lambda s: 3.0 - 2.0 * sa * s, s_lo, s_hi)
    const1 = 2.0 * alpha * smax * smax + 3.0 * sa * smax + 2.0 * alpha
    k1 = abs(w1) / (12.0 * sa)
    lin2 = 1.0 / (2.0 * alpha**1.5)
    const2 = _abs_coeff_max(lambda x: c1 - c2 * x, x_lo, x_hi)
    k2 = abs(w2)

    def poly(M):
        return k1 * (2.0 * M * M + lin1 * M + const1) + k2 * (lin2 * M + const2)

    return poly


def finite_series(alpha: float, x, w1: float = 1.0, w2: float = 0.0, tol: float = 1e-14):
    """Phi_alpha(x) * sum_m phi(v_m)/Phi(v_m) * (w1 q1 + w2 q2) at limit constants.

    The signed value is returned (callers take absolute values).  The
    certificate bounds the dropped part of sum_m |...|.
    """
    if not (0 < alpha < math.inf):
        raise DomainError("alpha must be finite and > 0")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    a, b = a_of(alpha), b_of(alpha)
    c1, c2 = c1_of(alpha), c2_of(alpha)
    sa = math.sqrt(alpha)
    s = a + b * xa
    s_lo, s_hi = float(s.min()), float(s.max())
    poly = _q_bound(alpha, w1, w2, s_lo, s_hi, float(xa.min()), float(xa.max()), c1, c2)
    M, bound = truncation_point(alpha, s_lo, tol, poly=poly, degree=2)
    m = np.arange(M, dtype=float)
    out = np.empty_like(xa)
    step = max(1, _BLOCK // M)
    for i in range(0, xa.size, step):
        sl = s[i : i + step, None]
        xs = xa[i : i + step, None]
        v = sl + m[None, :] / sa
        lcdf = log_norm_cdf(v)
        ratio = np.exp(log_norm_pdf(v) - lcdf)
        q = np.zeros_like(v)
        if w1:
            q += w1 * (2.0 * alpha * (v * v - 1.0) - 3.0 * sa * (2.0 * m + 1.0) * v + 6.0 * m * (m + 1.0)) / (
                12.0 * sa
            )
        if w2:
            q += w2 * (c1 - c2 * xs - m / (2.0 * alpha**1.5))
        out[i : i + step] = np.exp(lcdf.sum(axis=1)) * (ratio * q).sum(axis=1)
    return SeriesValue(out, M, bound)


def finite_series_sup(alpha, w1, w2, grid: GridPolicy = GridPolicy()):
    """sup_x |finite_series| over the grid; returns (value, argmax, SeriesValue on grid)."""
    tol = grid.m_truncation_tol
    full = finite_series(alpha, grid.points(), w1, w2, tol)

    def f(xs):
        xs = np.asarray(xs, dtype=float)
        if xs.size == full.values.size:
            return np.abs(full.values)
        return np.abs(finite_series(alpha, xs, w1, w2, tol).values)

    value, arg = scan_sup(f, grid)
    return value, arg, full


def _bullet_finite(eta):
    if eta == 0:
        return "eta=0"
    if math.isinf(eta):
        return "|eta|=inf"
    return "|eta| finite"


def _beta_bullets(n, alpha_n):
    beta_n = n**2 * alpha_n
    sb = math.sqrt(beta_n)
    r = math.sqrt(4.0 * beta_n + 1.0)
    return {
        "beta_inf": math.sqrt(alpha_n) / _SQRT_2PI,
        "beta_finite": (2.0 * sb + r) / (4.0 * math.sqrt(2.0 * math.pi * math.e) * n)
        * math.exp(2.0 * sb / (r + 2.0 * sb)),
        "beta_zero": 1.0 / (4.0 * math.sqrt(2.0 * math.pi * math.e) * n),
    }


def check_regime(e: Ensemble, decl: RegimeDecl) -> dict:
    """Reject (e, decl) pairs whose finite-n values contradict the declaration.

    Returns the finite-n regime quantities for reporting.
    """
    an = e.alpha_n
    if decl.kind is Regime.INFINITE:
        if an < ALPHA_N_MIN_INFINITE:
            raise DomainError(f"infinite regime needs alpha_n >= {ALPHA_N_MIN_INFINITE:g}, got {an:g}")
        return {"alpha_n": an}
    if decl.kind is Regime.ZERO:
        bn = e.beta_n
        if an > ALPHA_N_MAX_ZERO:
            raise DomainError(f"zero regime needs alpha_n <= {ALPHA_N_MAX_ZERO:g}, got {an:g}")
        beta = decl.beta
        if beta == 0 and bn > BETA_ZERO_MAX:
            raise DomainError(f"beta = 0 needs n^3/k <= {BETA_ZERO_MAX:g}, got {bn:g}")
        if math.isinf(beta) and bn < BETA_INF_MIN:
            raise DomainError(f"beta = inf needs n^3/k >= {BETA_INF_MIN:g}, got {bn:g}")
        if 0 < beta < math.inf and not (0.5 * beta <= bn <= 2.0 * beta):
            raise DomainError(f"n^3/k = {bn:g} is not within a factor 2 of beta = {beta:g}")
        return {"alpha_n": an, "beta_n": bn}
    al = decl.alpha
    if not (0.5 * al <= an <= 2.0 * al):
        raise DomainError(f"alpha_n = {an:g} is not within a factor 2 of alpha = {al:g}")
    return {"alpha_n": an, "eta_n": (an - al) * e.n}


def _infinite_be(alpha_n):
    la = math.log(alpha_n)
    return math.log(la) ** 2 / (2.0 * math.e * la)


def be_rate(e: Ensemble, decl: RegimeDecl, grid: GridPolicy = GridPolicy()) -> RateReport:
    comp = check_regime(e, decl)
    n = e.n
    if decl.kind is Regime.INFINITE:
        val = _infinite_be(e.alpha_n)
        comp.update(log_alpha_n=math.log(e.alpha_n))
        return RateReport(decl, Metric.BERRY_ESSEEN, val, comp)
    if decl.kind is Regime.ZERO:
        h1, h2 = math.sqrt(e.alpha_n), 1.0 / (4.0 * n)
        val = gaussian_weighted_sup(h1, h2)
        bullets = _beta_bullets(n, e.alpha_n)
        beta = decl.beta
        key = "beta_zero" if beta == 0 else "beta_inf" if math.isinf(beta) else "beta_finite"
        # interior maximiser of |h1 - h2 x| phi(x)
        r = math.sqrt(h1 * h1 + 4.0 * h2 * h2)
        comp.update(
            h1=h1,
            h2=h2,
            sup_value=val,
            sup_argmax=(h1 - r) / (2.0 * h2),
            matched_bullet=key,
            bullet_value=bullets[key],
            bullets=bullets,
        )
        return RateReport(decl, Metric.BERRY_ESSEEN, val, comp)
    al = decl.alpha
    lam = n * (e.alpha_n - al)
    value, arg, full = finite_series_sup(al, 1.0, lam, grid)
    comp.update(
        sup_value=value,
        sup_argmax=arg,
        series_terms_used=full.terms_used,
        series_tail_bound=full.tail_bound,
        q2_weight=lam,
        bullet=_bullet_finite(decl.eta),
        grid=grid.to_dict(),
    )
    return RateReport(decl, Metric.BERRY_ESSEEN, value / n, comp)


def w1_rate(
    e: Ensemble, decl: RegimeDecl, grid: GridPolicy = GridPolicy(), tol: float = 1e-8
) -> RateReport:
    comp = check_regime(e, decl)
    n = e.n
    if decl.kind is Regime.INFINITE:
        la = math.log(e.alpha_n)
        val = math.log(la) ** 2 / (2.0 * la)
        return RateReport(decl, Metric.W1, val, comp)
    if decl.kind is Regime.ZERO:
        sa = math.sqrt(e.alpha_n)
        z = 4.0 * n * sa
        val = sa * (2.0 * float(norm_cdf(z)) - 1.0) + float(norm_pdf(z)) / (2.0 * n)
        comp.update(crossing=z)
        return RateReport(decl, Metric.W1, val, comp)
    al = decl.alpha
    w1, w2 = 1.0 / n, e.alpha_n - al
    mt = grid.m_truncation_tol

    def f(xs):
        return np.abs(finite_series(al, xs, w1, w2, mt).values)

    panels = max(16, int(round((grid.x_hi - grid.x_lo) / grid.coarse_step)))
    body, err, evals = _simpson_level(f, grid.x_lo, grid.x_hi, tol, n_init=panels)
    ends = f(np.array([grid.x_lo, grid.x_hi]))
    comp.update(
        integral=body,
        error_estimate=err,
        evaluations=evals,
        endpoint_values=[float(ends[0]), float(ends[1])],
        grid=grid.to_dict(),
    )
    return RateReport(decl, Metric.W1, body, comp)


def remark4_upper_bounds(alpha: float) -> tuple[float, float]:
    """Closed-form majorants for the q1 and q2 suprema at finite alpha."""
    if not (0 < alpha < math.inf):
        raise DomainError("alpha must be finite and > 0")
    sa = math.sqrt(alpha)
    bq1 = 4.0 / 3.0 * (alpha + sa + 1.0)
    bq2 = (
        2.0 / (math.e * math.log(2.0))
        * (c1_of(alpha) + c2_of(alpha) * (alpha - 1.0) / b_of(alpha) + 1.0 / alpha)
        * (1.0 + sa)
    )
    return bq1, bq2


class TransitionSide(str, enum.Enum):
    TO_NORMAL = "ToNormal"
    TO_GUMBEL = "ToGumbel"


def transition_rate(alpha: float, side) -> float:
    """Rate at which Phi_alpha approaches Phi (alpha -> 0) or Gumbel (alpha -> inf)."""
    side = TransitionSide(side)
    if side is TransitionSide.TO_NORMAL:
        if not (0 < alpha <= 0.01):
            raise DomainError("ToNormal rate is only offered for 0 < alpha <= 0.01")
        return math.sqrt(alpha / (2.0 * math.pi))
    if not (alpha >= 100):
        raise DomainError("ToGumbel rate is only offered for alpha >= 100")
    return _infinite_be(alpha)
