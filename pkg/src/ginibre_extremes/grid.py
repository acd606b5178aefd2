"""Grid policy and the coarse-scan-plus-refine supremum search."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError

__all__ = ["GridPolicy", "scan_sup", "golden_max"]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GridPolicy:
    x_lo: float = -8.0
    x_hi: float = 14.0
    coarse_step: float = 0.01
    refine_width: float = 1e-6
    m_truncation_tol: float = 1e-14

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise DomainError("x_lo must be < x_hi")
        if not (self.coarse_step > 0 and self.refine_width > 0 and self.m_truncation_tol > 0):
            raise DomainError("grid steps and tolerances must be positive")

    def points(self) -> np.ndarray:
        count = int(round((self.x_hi - self.x_lo) / self.coarse_step)) + 1
        return self.x_lo + self.coarse_step * np.arange(count)

    def finer(self, factor: int = 4) -> "GridPolicy":
        return GridPolicy(
            self.x_lo, self.x_hi, self.coarse_step / factor, self.refine_width, self.m_truncation_tol
        )

    def to_dict(self) -> dict:
        return asdict(self)


def golden_max(f, lo: float, hi: float, width: float = 1e-6):
    """Golden-section maximisation of a scalar function on [lo, hi]."""
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > width:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def scan_sup(f_vec, grid: GridPolicy, n_refine: int = 3):
    """sup of ``f_vec`` (vectorised, nonnegative) by grid scan then refinement.

    The three largest local maxima of the coarse scan are refined by golden
    section inside their neighbouring cells.  Returns ``(value, argmax)``;
    ties go to the smallest abscissa.
    """
    xs = grid.points()
    vals = np.asarray(f_vec(xs), dtype=float)
    if vals.size == 1:
        return float(vals[0]), float(xs[0])
    interior = np.r_[
        vals[0] >= vals[1],
        (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:]),
        vals[-1] >= vals[-2],
    ]
    cand = np.flatnonzero(interior)
    # stable sort keeps smaller x first among equal values
    cand = cand[np.argsort(-vals[cand], kind="stable")][:n_refine]
    best_v, best_x = -math.inf, math.inf

    def scalar(x):
        return float(np.asarray(f_vec(np.array([x])))[0])

    for i in cand:
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, xs.size - 1)]
        x_r, v_r = golden_max(scalar, lo, hi, grid.refine_width)
        if vals[i] > v_r:
            x_r, v_r = xs[i], vals[i]
        if v_r > best_v or (v_r == best_v and x_r < best_x):
            best_v, best_x = v_r, x_r
    return float(best_v), float(best_x)
