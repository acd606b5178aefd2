"""Brute-force ground truth: eigenvalues of products of small complex Ginibre matrices.

The eigen-solver is a plain Householder reduction to upper Hessenberg form
followed by single-shift complex QR (Wilkinson shifts, Givens sweeps) with
deflation.  It targets dimensions up to 64 and is compiled with numba.
"""

from __future__ import annotations

import math
from typing import Optional

import numba
import numpy as np

from .errors import DomainError, NumericalFailure
from .sampler import SeedSpec, run_chunks

__all__ = [
    "MAX_DIM",
    "sample_ginibre",
    "eigenvalues",
    "max_log_sq_eig",
    "sample_max_log_sq_eig",
]

MAX_DIM = 64
_ITER_PER_DIM = 40


def sample_ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    """n x n matrix with i.i.d. standard complex Gaussian entries, E|z|^2 = 1."""
    if not (1 <= n <= MAX_DIM):
        raise DomainError(f"n must lie in [1, {MAX_DIM}]")
    parts = rng.standard_normal((2, n, n)) * math.sqrt(0.5)
    return parts[0] + 1j * parts[1]


@numba.njit(cache=True)
def _hessenberg(a):
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1 :, k].copy()
        alpha = np.sqrt(np.sum(np.abs(x) ** 2))
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0j
        x[0] = x0 + phase * alpha
        vn = np.sqrt(np.sum(np.abs(x) ** 2))
        v = x / vn
        # a <- H a H with H = I - 2 v v^*
        m = v.size
        for j in range(k, n):
            acc = 0j
            for i in range(m):
                acc += np.conj(v[i]) * a[k + 1 + i, j]
            for i in range(m):
                a[k + 1 + i, j] -= 2.0 * v[i] * acc
        for r in range(n):
            acc = 0j
            for i in range(m):
                acc += a[r, k + 1 + i] * v[i]
            for i in range(m):
                a[r, k + 1 + i] -= 2.0 * acc * np.conj(v[i])
        a[k + 2 :, k] = 0.0
    return a


@numba.njit(cache=True)
def _givens(f, g):
    # returns c (real), s (complex) with [c s; -conj(s) c] [f; g] = [r; 0]
    af = abs(f)
    ag = abs(g)
    if ag == 0.0:
        return 1.0, 0.0 + 0j
    if af == 0.0:
        return 0.0, np.conj(g) / ag
    nrm = math.hypot(af, ag)
    c = af / nrm
    s = (f / af) * np.conj(g) / nrm
    return c, s


@numba.njit(cache=True)
def _hqr(h, max_iter):
    """Eigenvalues of an upper Hessenberg matrix; returns (eigs, status)."""
    n = h.shape[0]
    eigs = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    total = 0
    eps = 2.220446049250313e-16
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        # find the lowest negligible subdiagonal
        lo = hi
        while lo > 0:
            s = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if s == 0.0:
                s = 1.0
            if abs(h[lo, lo - 1]) <= eps * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        total += 1
        if total > max_iter:
            return eigs, 1
        its += 1
        if its % 11 == 0:
            # exceptional shift
            mu = h[hi, hi] + abs(h[hi, hi - 1].real) + abs(h[hi - 1, hi - 2].real if hi - 2 >= lo else 0.0)
        else:
            a = h[hi - 1, hi - 1]
            b = h[hi - 1, hi]
            c = h[hi, hi - 1]
            d = h[hi, hi]
            tr = 0.5 * (a + d)
            disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
            m1 = tr + disc
            m2 = tr - disc
            mu = m1 if abs(m1 - d) < abs(m2 - d) else m2
        # shifted QR sweep on the active block [lo, hi]
        for i in range(lo, hi + 1):
            h[i, i] -= mu
        cs = np.empty(hi - lo, dtype=np.float64)
        ss = np.empty(hi - lo, dtype=np.complex128)
        for i in range(lo, hi):
            cc, sn = _givens(h[i, i], h[i + 1, i])
            cs[i - lo] = cc
            ss[i - lo] = sn
            for j in range(i, n):
                t1 = h[i, j]
                t2 = h[i + 1, j]
                h[i, j] = cc * t1 + sn * t2
                h[i + 1, j] = -np.conj(sn) * t1 + cc * t2
        for i in range(lo, hi):
            cc = cs[i - lo]
            sn = ss[i - lo]
            top = min(i + 2, hi)
            for r in range(0, top + 1):
                t1 = h[r, i]
                t2 = h[r, i + 1]
                h[r, i] = cc * t1 + np.conj(sn) * t2
                h[r, i + 1] = -sn * t1 + cc * t2
        for i in range(lo, hi + 1):
            h[i, i] += mu
    return eigs, 0


def eigenvalues(mat) -> np.ndarray:
    """All eigenvalues of a square complex matrix of dimension <= 64."""
    a = np.array(mat, dtype=np.complex128, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("matrix must be square")
    n = a.shape[0]
    if not (1 <= n <= MAX_DIM):
        raise DomainError(f"dimension must lie in [1, {MAX_DIM}]")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix entries must be finite")
    h = _hessenberg(a)
    eigs, status = _hqr(h, _ITER_PER_DIM * n)
    if status:
        raise NumericalFailure(f"QR iteration did not converge within {_ITER_PER_DIM * n} sweeps")
    return eigs


def _scaled_product(factors):
    prod = factors[0]
    log_scale = 0.0
    for f in factors[1:]:
        prod = prod @ f
        s = np.abs(prod).max()
        prod = prod / s
        log_scale += math.log(s)
    return prod, log_scale


def max_log_sq_eig(n: int, k: int, rng: np.random.Generator, factors=None) -> float:
    """max_j log|lambda_j|^2 for a product of k independent n x n Ginibre matrices.

    ``factors`` can supply the k matrices directly instead of drawing them.
    """
    if not (1 <= n <= 16) or not (1 <= k <= 8):
        raise DomainError("oracle supports n <= 16 and k <= 8")
    if factors is None:
        factors = [sample_ginibre(n, rng) for _ in range(k)]
    elif len(factors) != k:
        raise DomainError("expected k factors")
    prod, log_scale = _scaled_product(list(factors))
    lam = np.abs(eigenvalues(prod)).max()
    return 2.0 * (math.log(lam) + log_scale)


def sample_max_log_sq_eig(
    n: int, k: int, count: int, seed, threads: Optional[int] = None, chunk_size: int = 1 << 12
) -> np.ndarray:
    """``count`` oracle draws, chunked by SeedSpec stream like the decoupled sampler."""
    if count < 1:
        raise DomainError("count must be >= 1")
    seed = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    n_chunks = -(-count // chunk_size)

    def run(i):
        rng = seed.generator(i)
        rows = min(chunk_size, count - i * chunk_size)
        return np.array([max_log_sq_eig(n, k, rng) for _ in range(rows)])

    return run_chunks(run, n_chunks, threads)
