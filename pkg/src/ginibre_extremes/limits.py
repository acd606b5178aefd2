"""Limit laws of X_n: standard normal, Gumbel and the interpolating law Phi_alpha.

Phi_alpha(x) is the infinite product over m >= 0 of Phi(m / sqrt(alpha) + a + b x).
It is evaluated in log space with a truncation point M chosen so that a
Mills-ratio bound on the dropped factors is below the requested tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .grid import GridPolicy, scan_sup
from .scaling import a_of, b_of
from .specfun import log_norm_cdf, log_norm_pdf, norm_cdf

__all__ = [
    "LawKind",
    "LimitLaw",
    "TruncationCertificate",
    "cdf",
    "log_cdf_phi_alpha",
    "log_density_phi_alpha",
    "sup_distance",
    "truncation_point",
]

DEFAULT_TAIL_TOL = 1e-14
_BLOCK = 1 << 21


class LawKind(str, enum.Enum):
    NORMAL = "normal"
    GUMBEL = "gumbel"
    PHI_ALPHA = "phi-alpha"


def _scalar_or_array(out, like):
    out = np.asarray(out, dtype=float)
    if np.ndim(like) == 0:
        return float(out.reshape(-1)[0])
    return out


@dataclass(frozen=True)
class LimitLaw:
    kind: LawKind
    alpha: Optional[float] = None

    def __post_init__(self):
        kind = LawKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is LawKind.PHI_ALPHA:
            if self.alpha is None or not (0 < self.alpha < math.inf):
                raise DomainError("PhiAlpha needs a finite alpha > 0")
        elif self.alpha is not None:
            raise DomainError(f"{kind.value} law takes no alpha")

    @classmethod
    def normal(cls) -> "LimitLaw":
        return cls(LawKind.NORMAL)

    @classmethod
    def gumbel(cls) -> "LimitLaw":
        return cls(LawKind.GUMBEL)

    @classmethod
    def phi_alpha(cls, alpha: float) -> "LimitLaw":
        return cls(LawKind.PHI_ALPHA, float(alpha))

    def log_cdf(self, x):
        xa = np.asarray(x, dtype=float)
        if self.kind is LawKind.NORMAL:
            out = log_norm_cdf(xa)
        elif self.kind is LawKind.GUMBEL:
            out = -np.exp(-xa)
        else:
            out = log_cdf_phi_alpha(self.alpha, xa)[0]
        return _scalar_or_array(out, x)

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        if self.kind is LawKind.NORMAL:
            out = norm_cdf(xa)
        elif self.kind is LawKind.GUMBEL:
            out = np.exp(-np.exp(-xa))
        else:
            out = _cdf_phi_alpha(self.alpha, xa)[0]
        return _scalar_or_array(out, x)

    __call__ = cdf

    def __str__(self):
        return self.kind.value if self.alpha is None else f"{self.kind.value}({self.alpha:g})"


@dataclass(frozen=True)
class TruncationCertificate:
    terms_used: int
    tail_bound: float


def _tail_ratio_bound(v_M, delta, M, degree):
    """Upper bound on the ratio of consecutive tail terms beyond M."""
    poly = ((M + 1.0) / M) ** degree if degree else 1.0
    return poly * np.exp(-v_M * delta - 0.5 * delta * delta)


def truncation_point(alpha, s_min, tol=DEFAULT_TAIL_TOL, poly=None, degree=0):
    """Smallest tried M whose dropped tail is certified below ``tol``.

    Bounds ``sum_{m >= M} P(m) phi(v_m) / Phi(v_m)`` where v_m = m/sqrt(alpha) + s
    and ``P`` is a nonnegative polynomial of the given degree (``poly(M)``
    returns its value at M for the worst ``s``).  With ``poly=None`` the bound is
    on ``-sum log Phi(v_m)`` using 1 - Phi(v) <= phi(v)/v.
    Returns ``(M, bound)``.
    """
    sa = math.sqrt(alpha)
    delta = 1.0 / sa
    M = max(1, math.ceil(sa * (max(0.0, -s_min) + 9.0)))
    for _ in range(200):
        v_M = M * delta + s_min
        if v_M >= 1.0:
            ratio = _tail_ratio_bound(v_M, delta, M, degree if poly is not None else 0)
            if ratio < 1.0:
                head = math.exp(log_norm_pdf(v_M) - log_norm_cdf(v_M))
                if poly is None:
                    head /= v_M
                else:
                    head *= poly(M)
                bound = head / (1.0 - ratio)
                if bound <= tol:
                    return M, bound
        M = math.ceil(1.5 * M) + 1
    raise DomainError("could not certify truncation of the m-series")


def _blocks(nx, M):
    step = max(1, _BLOCK // max(M, 1))
    for i in range(0, nx, step):
        yield slice(i, min(i + step, nx))


def _phi_alpha_sum(alpha, x, tol, a, b, skip_first):
    if not (0 < alpha < math.inf):
        raise DomainError("alpha must be finite and > 0")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(xa)):
        raise DomainError("x must be finite")
    a = a_of(alpha) if a is None else a
    b = b_of(alpha) if b is None else b
    s = a + b * xa
    M, bound = truncation_point(alpha, float(s.min()), tol)
    m = np.arange(1 if skip_first else 0, M, dtype=float) / math.sqrt(alpha)
    out = np.empty_like(xa)
    for blk in _blocks(xa.size, M):
        out[blk] = log_norm_cdf(s[blk, None] + m[None, :]).sum(axis=1)
    return out, s, TruncationCertificate(M, bound)


def log_cdf_phi_alpha(alpha, x, tol=DEFAULT_TAIL_TOL, a=None, b=None):
    """log Phi_alpha(x) with its truncation certificate.

    ``a`` and ``b`` default to the limit constants at ``alpha``.
    """
    out, _, cert = _phi_alpha_sum(alpha, x, tol, a, b, skip_first=False)
    return out, cert


def _cdf_phi_alpha(alpha, x, tol=DEFAULT_TAIL_TOL):
    # the m = 0 factor is applied outside the log so that Phi_alpha <= Phi(a + b x)
    # holds exactly in floating point
    rest, s, cert = _phi_alpha_sum(alpha, x, tol, None, None, skip_first=True)
    return norm_cdf(s) * np.exp(rest), cert


def log_density_phi_alpha(alpha, x, tol=DEFAULT_TAIL_TOL):
    """d/dx log Phi_alpha(x) = b * sum_m phi(v_m) / Phi(v_m)."""
    if not (0 < alpha < math.inf):
        raise DomainError("alpha must be finite and > 0")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    a, b = a_of(alpha), b_of(alpha)
    s = a + b * xa
    M, _ = truncation_point(alpha, float(s.min()), tol, poly=lambda M: 1.0, degree=0)
    m = np.arange(M, dtype=float) / math.sqrt(alpha)
    out = np.empty_like(xa)
    for blk in _blocks(xa.size, M):
        v = s[blk, None] + m[None, :]
        out[blk] = np.exp(log_norm_pdf(v) - log_norm_cdf(v)).sum(axis=1)
    out *= b
    return float(out[0]) if np.ndim(x) == 0 else out


def cdf(law: LimitLaw, x):
    """CDF value(s) of ``law`` at ``x`` with a truncation certificate."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("x must be finite")
    if law.kind is LawKind.PHI_ALPHA:
        val, cert = _cdf_phi_alpha(law.alpha, xa)
    else:
        val = np.atleast_1d(law.cdf(xa))
        cert = TruncationCertificate(1, 0.0)
    val = np.clip(val, 0.0, 1.0)
    return (float(val[0]) if xa.ndim == 0 else val), cert


def sup_distance(law_a: LimitLaw, law_b: LimitLaw, grid: GridPolicy = GridPolicy()):
    """Approximate sup_x |F_A(x) - F_B(x)| and its maximiser."""
    if law_a == law_b:
        return 0.0, grid.x_lo

    def diff(xs):
        return np.abs(law_a.cdf(xs) - law_b.cdf(xs))

    return scan_sup(diff, grid)
