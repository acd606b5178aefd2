"""Acceptance suites: each function runs one end-to-end check at its stated scale.

A suite returns a :class:`SuiteResult` holding one :class:`Check` per
assertion plus any sample arrays it generated, so reruns can be compared.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .edgeworth import cumulants, edgeworth_cdf, exact_cn_k1, CnQuery
from .empirics import kolmogorov_distance, two_sample_ks, w1_distance
from .ginibre_oracle import sample_max_log_sq_eig
from .grid import GridPolicy, golden_max, scan_sup
from .limits import LimitLaw, sup_distance
from .rates import (
    be_rate,
    finite_series_sup,
    gaussian_weighted_sup,
    remark4_upper_bounds,
    transition_rate,
    w1_rate,
)
from .sampler import SeedSpec, exact_cdf_k1, sample_log_y, sample_raw_max, sample_xn
from .scaling import Ensemble, RegimeDecl, constants_for
from .specfun import (
    digamma,
    log_gamma,
    mills_upper_tail,
    norm_cdf,
    norm_pdf,
    polygamma,
    reg_gamma_q,
)
from .tailbounds import chernoff_cn, chernoff_lower_cn0, geometric_tail_sum

__all__ = ["Check", "SuiteResult", "SUITES", "ROOT_SEED", "run_suite"]

ROOT_SEED = 20251016


@dataclass
class Check:
    name: str
    passed: bool
    statistic: Optional[float] = None
    target: Optional[float] = None
    window: Optional[tuple] = None
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        parts = [f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"]
        if self.statistic is not None:
            parts.append(f"stat={self.statistic:.6g}")
        if self.target is not None:
            parts.append(f"target={self.target:.6g}")
        if self.window is not None:
            parts.append(f"window=[{self.window[0]:.6g}, {self.window[1]:.6g}]")
        return " ".join(parts)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "statistic": self.statistic,
            "target": self.target,
            "window": list(self.window) if self.window else None,
            "details": self.details,
        }


@dataclass
class SuiteResult:
    name: str
    checks: list
    seconds: float = 0.0
    samples: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "seconds": self.seconds,
            "checks": [c.to_dict() for c in self.checks],
        }


def _within(stat, lo, hi):
    return bool(lo <= stat <= hi)


def _timed(name):
    def deco(fn):
        def wrapper(*a, **kw):
            t0 = time.perf_counter()
            res = fn(*a, **kw)
            res.seconds = time.perf_counter() - t0
            return res

        wrapper.__name__ = fn.__name__
        wrapper.__doc__ = fn.__doc__
        wrapper.suite_name = name
        return wrapper

    return deco


# ----------------------------------------------------------------- MC suites


@_timed("decoupling")
def decoupling(count: int = 20_000, pairs=((4, 2),), threads=None, seed: int = ROOT_SEED):
    """Eigenvalue oracle vs decoupled gamma sampler, two-sample KS at the 1% level."""
    checks, samples = [], {}
    for n, k in pairs:
        oracle = sample_max_log_sq_eig(n, k, count, SeedSpec(seed, 100 + 10 * n + k), threads)
        decoupled = sample_raw_max(n, k, count, SeedSpec(seed, 200 + 10 * n + k), threads)
        rep = two_sample_ks(oracle, decoupled)
        crit = rep.metadata["critical_value_01"]
        checks.append(
            Check(f"decoupling KS (n={n}, k={k})", rep.statistic < crit, rep.statistic, crit,
                  details=rep.to_dict())
        )
        samples[f"oracle_{n}_{k}"] = oracle
        samples[f"decoupled_{n}_{k}"] = decoupled
    return SuiteResult("decoupling", checks, samples=samples)


@_timed("exact-k1")
def exact_k1(n: int = 1000, count: int = 100_000, threads=None, seed: int = ROOT_SEED):
    """Exact k = 1 CDF against the ECDF of sampled X_n, DKW 99% band at every jump."""
    e = Ensemble(n, 1)
    sc = constants_for(e)
    batch = sample_xn(e, sc, count, SeedSpec(seed, 2), threads)
    rep = kolmogorov_distance(batch.values, lambda x: exact_cdf_k1(e, sc, x))
    ok = rep.statistic <= rep.dkw_radius_99
    c = Check(f"exact CDF vs ECDF (n={n}, k=1)", ok, rep.statistic, None,
              (0.0, rep.dkw_radius_99), rep.to_dict())
    return SuiteResult("exact-k1", [c], samples={"x": batch.values})


@_timed("be-zero")
def be_zero(n: int = 8, k: int = 512, count: int = 1_000_000, threads=None,
                  seed: int = ROOT_SEED):
    """alpha = 0, beta = 1: sup |ECDF - Phi| within [0.5, 2] x be_rate."""
    e = Ensemble(n, k)
    decl = RegimeDecl.zero(e.beta_n)
    sc = constants_for(e, decl)
    batch = sample_xn(e, sc, count, SeedSpec(seed, 4), threads)
    rep = kolmogorov_distance(batch.values, LimitLaw.normal())
    rate = be_rate(e, decl).theoretical
    win = (0.5 * rate, 2.0 * rate)
    c = Check(f"BE alpha=0 (n={n}, k={k})", _within(rep.statistic, *win), rep.statistic, rate, win,
              {**rep.to_dict(), "dkw_radius_99": rep.dkw_radius_99})
    return SuiteResult("be-zero", [c], samples={"x": batch.values})


@_timed("be-finite")
def be_finite(n: int = 64, k: int = 64, count: int = 4_000_000, threads=None,
                    seed: int = ROOT_SEED):
    """alpha = 1, eta = 0: sup |ECDF - Phi_1| within [0.5, 2] x be_rate."""
    e = Ensemble(n, k)
    decl = RegimeDecl.finite(e.alpha_n, 0.0)
    sc = constants_for(e, decl)
    batch = sample_xn(e, sc, count, SeedSpec(seed, 5), threads)
    rep = kolmogorov_distance(batch.values, LimitLaw.phi_alpha(decl.alpha))
    rate = be_rate(e, decl).theoretical
    win = (0.5 * rate, 2.0 * rate)
    c = Check(f"BE alpha=1 (n={n}, k={k})", _within(rep.statistic, *win), rep.statistic, rate, win,
              rep.to_dict())
    return SuiteResult("be-finite", [c], samples={"x": batch.values})


@_timed("edgeworth")
def edgeworth(j: int = 50, k: int = 200, count: int = 1_000_000, threads=None,
              seed: int = ROOT_SEED):
    """One-term Edgeworth vs plain normal against the ECDF of standardised log Y_j."""
    cu = cumulants(j)
    raw = sample_log_y(j, k, count, SeedSpec(seed, 11), threads)
    z = (raw - k * cu.mu) / math.sqrt(k * cu.sigma2)
    inside = z[(z >= -3.0) & (z <= 3.0)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        f_edge = lambda x: edgeworth_cdf(j, k, x)  # noqa: E731
        # restrict the sup to [-3, 3] by evaluating only jump points there
        d_edge = _sup_on_points(z, inside, f_edge)
    d_norm = _sup_on_points(z, inside, norm_cdf)
    c = Check(f"Edgeworth beats normal (j={j}, k={k})", d_edge < d_norm, d_edge, d_norm,
              details={"sup_edgeworth": d_edge, "sup_normal": d_norm, "count": count})
    return SuiteResult("edgeworth", [c], samples={"log_y": raw})


def _sup_on_points(all_values, pts, cdf):
    srt = np.sort(all_values)
    pts = np.unique(pts)
    up = np.searchsorted(srt, pts, side="right") / srt.size
    lo = np.searchsorted(srt, pts, side="left") / srt.size
    f = np.asarray(cdf(pts), dtype=float)
    return float(max(np.abs(f - up).max(), np.abs(f - lo).max()))


# ------------------------------------------------------- deterministic suites


@_timed("be-infinite")
def be_infinite(n: int = 10**6, grid: GridPolicy = GridPolicy()):
    """alpha = inf: sup |exact CDF - Gumbel| within [0.5, 1.5] x rate."""
    e = Ensemble(n, 1)
    sc = constants_for(e)
    gum = LimitLaw.gumbel()
    stat, arg = scan_sup(lambda xs: np.abs(exact_cdf_k1(e, sc, xs) - gum.cdf(xs)), grid)
    rate = be_rate(e, RegimeDecl.infinite()).theoretical
    win = (0.5 * rate, 1.5 * rate)
    c = Check(f"BE alpha=inf exact (n={n})", _within(stat, *win), stat, rate, win,
              {"argmax": arg})
    return SuiteResult("be-infinite", [c])


@_timed("w1-infinite")
def w1_infinite(n: int = 10**6):
    """alpha = inf: W1(exact CDF, Gumbel) within a factor 1.5 of the W1 rate."""
    e = Ensemble(n, 1)
    sc = constants_for(e)
    rep = w1_distance(lambda x: exact_cdf_k1(e, sc, x), LimitLaw.gumbel())
    rate = w1_rate(e, RegimeDecl.infinite()).theoretical
    win = (rate / 1.5, 1.5 * rate)
    c = Check(f"W1 alpha=inf exact (n={n})", _within(rep.statistic, *win), rep.statistic, rate,
              win, rep.to_dict())
    return SuiteResult("w1-infinite", [c])


@_timed("transition")
def transition(grid: GridPolicy = GridPolicy()):
    """Phi_alpha against Phi for small alpha and against Gumbel along a ladder."""
    checks = []
    a0 = 1e-4
    stat, arg = sup_distance(LimitLaw.phi_alpha(a0), LimitLaw.normal(), grid)
    tgt = transition_rate(a0, "ToNormal")
    win = (0.95 * tgt, 1.05 * tgt)
    checks.append(Check(f"Phi_alpha vs Phi (alpha={a0:g})", _within(stat, *win), stat, tgt, win,
                        {"argmax": arg}))
    prev = math.inf
    dec = True
    for al in (1e4, 1e6, 1e8):
        stat, arg = sup_distance(LimitLaw.phi_alpha(al), LimitLaw.gumbel(), grid)
        tgt = transition_rate(al, "ToGumbel")
        win = (tgt / 1.5, 1.5 * tgt)
        checks.append(Check(f"Phi_alpha vs Gumbel (alpha={al:g})", _within(stat, *win), stat, tgt,
                            win, {"argmax": arg}))
        dec = dec and stat < prev
        prev = stat
    checks.append(Check("ladder strictly decreasing", dec))
    return SuiteResult("transition", checks)


@_timed("bounds")
def bounds(alphas=(0.5, 1.0, 2.0, 5.0), grid: GridPolicy = GridPolicy()):
    """Numerical q1 / q2 suprema against their closed-form majorants."""
    checks = []
    for al in alphas:
        b1, b2 = remark4_upper_bounds(al)
        s1, x1, _ = finite_series_sup(al, 1.0, 0.0, grid)
        s2, x2, _ = finite_series_sup(al, 0.0, 1.0, grid)
        checks.append(Check(f"q1 sup <= bound (alpha={al:g})", s1 <= b1, s1, b1,
                            details={"argmax": x1}))
        checks.append(Check(f"q2 sup <= bound (alpha={al:g})", s2 <= b2, s2, b2,
                            details={"argmax": x2}))
    return SuiteResult("bounds", checks)


@_timed("specfun")
def specfun():
    """Identities, recurrences and asymptotic inequalities of the special functions."""
    checks = []
    z = np.arange(1, 101) * 0.5
    r1 = np.abs(digamma(z + 1) - digamma(z) - 1 / z).max()
    r2 = np.abs(polygamma(1, z + 1) - polygamma(1, z) + 1 / z**2).max()
    r3 = np.abs(log_gamma(z + 1) - log_gamma(z) - np.log(z)).max()
    for nm, r in (("digamma", r1), ("trigamma", r2), ("log-gamma", r3)):
        checks.append(Check(f"{nm} recurrence", r <= 1e-12, float(r), 1e-12))

    j = np.arange(1, 10_001, dtype=float)[:, None]
    s = np.linspace(1.0, 100.0, 199)[None, :]
    excess = float((digamma(j + s) - digamma(j) - s / j).max())
    # s = 1 is an equality case, so compare at the digamma accuracy
    checks.append(Check("psi(j+s) - psi(j) <= s/j", excess <= 1e-12, excess, 1e-12))

    zz = np.linspace(10.0, 1e4, 5000)
    e1 = float((np.abs(digamma(zz) - (np.log(zz) - 0.5 / zz)) * 10 * zz**2).max())
    e2 = float((np.abs(polygamma(1, zz) - (1 / zz + 0.5 / zz**2)) * 5 * zz**3).max())
    checks.append(Check("digamma asymptotic within 1/(10 z^2)", e1 <= 1.0, e1, 1.0))
    checks.append(Check("trigamma asymptotic within 1/(5 z^3)", e2 <= 1.0, e2, 1.0))

    worst_mono, worst_q0, worst_rec = 0.0, 0.0, 0.0
    for a in (0.5, 1.0, 2.5, 10.0, 57.0, 100.0):
        xs = np.linspace(0.0, 4 * a + 40, 2001)
        q = reg_gamma_q(a, xs)
        worst_mono = max(worst_mono, float(np.diff(q).max()))
        worst_q0 = max(worst_q0, abs(float(reg_gamma_q(a, 0.0)) - 1.0))
        lhs = reg_gamma_q(a + 1, xs[1:]) - q[1:]
        rhs = np.exp(a * np.log(xs[1:]) - xs[1:] - log_gamma(a + 1))
        worst_rec = max(worst_rec, float(np.abs(lhs - rhs).max()))
    checks.append(Check("Q(a, .) nonincreasing", worst_mono <= 0.0, worst_mono, 0.0))
    checks.append(Check("Q(a, 0) = 1", worst_q0 == 0.0, worst_q0, 0.0))
    checks.append(Check("Q(a+1,x) - Q(a,x) = x^a e^-x / Gamma(a+1)", worst_rec <= 1e-10,
                        worst_rec, 1e-10))

    t = np.linspace(-30, 30, 6001)
    sym = float(np.abs(norm_cdf(-t) - (1 - norm_cdf(t))).max())
    checks.append(Check("Phi(-x) = 1 - Phi(x)", sym <= 1e-15, sym, 1e-15))
    checks.append(Check("Phi nondecreasing", bool(np.all(np.diff(norm_cdf(t)) >= 0))))
    mills = float(mills_upper_tail(20.0) * math.sqrt(2 * math.pi) * 20.0 * math.exp(200.0))
    checks.append(Check("Mills asymptote at t=20", abs(mills - 1) <= 1 / 400, mills, 1.0))
    return SuiteResult("specfun", checks)


def _cn_exact(n, m, x):
    return exact_cn_k1(CnQuery(Ensemble(n, 1), m, x))


@_timed("tailbounds")
def tailbounds(mc_count: int = 100_000, threads=None, seed: int = ROOT_SEED, draws: int = 50):
    """Chernoff bounds against exact (k = 1) and simulated (k = 32) c_n(m, x),
    and the geometric tail bound against brute-force sums."""
    checks = []
    worst = -math.inf
    where = None
    xs = np.round(np.arange(-1.0, 3.0 + 1e-9, 0.05), 10)
    for n in (50, 200):
        sc = constants_for(Ensemble(n, 1))
        for m in range(0, 21):
            for x in xs:
                s = sc.a_n + sc.b_n * x
                if m >= 1 or x > 0:
                    gap = _cn_exact(n, m, x) - chernoff_cn(m, x, sc).bound
                    if gap > worst:
                        worst, where = gap, (n, m, float(x))
                if m == 0 and s < 0:
                    gap = (1 - _cn_exact(n, 0, x)) - chernoff_lower_cn0(x, sc)
                    if gap > worst:
                        worst, where = gap, (n, 0, float(x))
    checks.append(Check("exact c_n <= Chernoff (k=1)", worst <= 0.0, worst, 0.0,
                        details={"worst_at": where}))

    n, k = 64, 32
    e = Ensemble(n, k)
    sc = constants_for(e)
    mc_worst, mc_where = -math.inf, None
    samples = {}
    for m in (1, 2, 4):
        logy = sample_log_y(n - m, k, mc_count, SeedSpec(seed, 300 + m), threads)
        samples[f"log_y_m{m}"] = logy
        for x in (0.0, 1.0):
            thr = sc.centering + (sc.a_n + sc.b_n * x) / math.sqrt(sc.alpha_n)
            p = float(np.mean(logy > thr))
            se = math.sqrt(max(p * (1 - p), 1e-300) / mc_count)
            gap = p - 3 * se - chernoff_cn(m, x, sc).bound
            if gap > mc_worst:
                mc_worst, mc_where = gap, (m, x, p)
    checks.append(Check("MC c_n - 3 se <= Chernoff (n=64, k=32)", mc_worst <= 0.0, mc_worst, 0.0,
                        details={"worst_at": mc_where}))

    rng = SeedSpec(seed, 400).generator()
    g_worst = -math.inf
    for _ in range(draws):
        c = rng.uniform(0.3, 0.7)
        gam = math.exp(rng.uniform(math.log(0.5), math.log(1e3)))
        sig = rng.uniform(2.0, 10.0)
        L = int(rng.integers(0, 50))
        x = sig - L / gam
        bound, _ = geometric_tail_sum(L, x, c, gam, 0.0, 1.0)
        g_worst = max(g_worst, _brute_tail(L, x, c, gam) / bound)
    checks.append(Check("geometric tail bound >= brute force", g_worst <= 1.0, g_worst, 1.0))
    return SuiteResult("tailbounds", checks, samples=samples)


def _brute_tail(L, x, c, gamma):
    total = 0.0
    m0 = L
    while True:
        m = np.arange(m0, m0 + 100_000, dtype=float)
        s = m / gamma + x
        terms = np.exp(-c * s * s) / s
        total += float(terms.sum())
        if terms[-1] < 1e-300 or terms[-1] < 1e-18 * total:
            return total
        m0 += 100_000


@_timed("suprecal")
def suprecal(pairs: int = 100, seed: int = ROOT_SEED):
    """Closed-form sup_x |h1 - h2 x| phi(x) against golden-section maximisation."""
    rng = SeedSpec(seed, 12).generator()
    worst = 0.0
    for _ in range(pairs):
        h1, h2 = rng.uniform(0.0, 5.0, size=2)
        f = lambda x: abs(h1 - h2 * x) * float(norm_pdf(x))  # noqa: E731
        # |h1 - h2 x| phi(x) is log-concave on each side of its zero, so
        # golden section is run separately on both sides
        cross = h1 / h2 if h2 > 0 else math.inf
        best = 0.0
        if cross > -10.0:
            best = golden_max(f, -10.0, min(cross, 10.0), 1e-10)[1]
        if cross < 10.0:
            best = max(best, golden_max(f, max(cross, -10.0), 10.0, 1e-10)[1])
        worst = max(worst, abs(best - gaussian_weighted_sup(h1, h2)))
    return SuiteResult("suprecal", [Check("closed form vs golden section", worst <= 1e-9, worst,
                                          1e-9)])


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "decoupling": decoupling,
    "exact-k1": exact_k1,
    "be-infinite": be_infinite,
    "be-zero": be_zero,
    "be-finite": be_finite,
    "transition": transition,
    "bounds": bounds,
    "w1-infinite": w1_infinite,
    "specfun": specfun,
    "tailbounds": tailbounds,
    "edgeworth": edgeworth,
    "suprecal": suprecal,
}

MC_SUITES = ("decoupling", "exact-k1", "be-zero", "be-finite", "edgeworth", "tailbounds")


def run_suite(name: str, **kw) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(**kw)
