"""Reproducible sampling of X_n and the exact CDF engine for k = 1.

Sampling relies on the decoupling identity: max_j log|Z_j|^2 has the law of
max_j log Y_j with Y_j a product of k independent Gamma(j, 1) variables, all
n*k factors independent.

Randomness comes from numpy's Philox counter-based generator.  A batch is cut
into fixed-size chunks; chunk ``i`` draws from the stream keyed by
``(root_seed, stream, i)``, so results do not depend on how many threads run.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import BudgetExceeded, DomainError
from .scaling import Ensemble, ScalingConstants, rescale_max
from .specfun import reg_gamma_p
from .tailbounds import chernoff_tail_sum

__all__ = [
    "GENERATOR_ID",
    "SeedSpec",
    "SampleBatch",
    "gamma_variate",
    "sample_raw_max",
    "sample_log_y",
    "run_chunks",
    "sample_xn",
    "exact_cdf_k1",
    "DEFAULT_CHUNK",
    "DEFAULT_DRAW_BUDGET",
]

GENERATOR_ID = "numpy-Philox4x64-10/SeedSequence"
DEFAULT_CHUNK = 1 << 14
DEFAULT_DRAW_BUDGET = 1e11
# draws materialised at once inside a chunk
_BLOCK_DRAWS = 1 << 22
_EXACT_TRUNC_TOL = 1e-15


@dataclass(frozen=True)
class SeedSpec:
    root_seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("root_seed", "stream"):
            val = getattr(self, name)
            if int(val) != val or not (0 <= val < 2**64):
                raise DomainError(f"{name} must be an unsigned 64-bit integer")

    def generator(self, *sub: int) -> np.random.Generator:
        """Generator for this (root_seed, stream) and optional sub-stream keys."""
        ss = np.random.SeedSequence(self.root_seed, spawn_key=(self.stream, *sub))
        return np.random.Generator(np.random.Philox(ss))


def run_chunks(fn, n_chunks: int, threads: Optional[int] = None) -> np.ndarray:
    """Evaluate ``fn(i)`` for every chunk index and concatenate in chunk order."""
    if threads is None or threads <= 1 or n_chunks == 1:
        parts = [fn(i) for i in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, range(n_chunks)))
    return np.concatenate(parts)


def _as_seed(seed) -> SeedSpec:
    return seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))


def gamma_variate(shape, rng: np.random.Generator, size=None):
    """Gamma(shape, 1) draws (Marsaglia-Tsang rejection, O(1) per draw)."""
    if np.any(np.asarray(shape) < 1):
        raise DomainError("shape must be >= 1")
    return rng.gamma(shape, 1.0, size=size)


def _chunk_raw_max(n: int, k: int, rows: int, rng: np.random.Generator) -> np.ndarray:
    out = np.full(rows, -np.inf)
    per_row = n * k
    row_blk = max(1, _BLOCK_DRAWS // per_row)
    j_blk = n if per_row <= _BLOCK_DRAWS else max(1, _BLOCK_DRAWS // k)
    shapes = np.arange(1, n + 1, dtype=float)
    for r0 in range(0, rows, row_blk):
        r1 = min(rows, r0 + row_blk)
        best = out[r0:r1]
        for j0 in range(0, n, j_blk):
            js = shapes[j0 : j0 + j_blk]
            draws = rng.gamma(js[None, :, None], 1.0, size=(r1 - r0, js.size, k))
            np.log(draws, out=draws)
            np.maximum(best, draws.sum(axis=2).max(axis=1), out=best)
    return out


def sample_raw_max(
    n: int,
    k: int,
    count: int,
    seed,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK,
    budget: float = DEFAULT_DRAW_BUDGET,
) -> np.ndarray:
    """``count`` independent draws of max_{j <= n} sum_{r <= k} log Gamma(j, 1)."""
    if count < 1:
        raise DomainError("count must be >= 1")
    requested = float(n) * k * count
    if requested > budget:
        raise BudgetExceeded(requested, budget)
    seed = _as_seed(seed)
    n_chunks = -(-count // chunk_size)

    def run(i):
        rows = min(chunk_size, count - i * chunk_size)
        return _chunk_raw_max(n, k, rows, seed.generator(i))

    return run_chunks(run, n_chunks, threads)


def sample_log_y(
    j: int,
    k: int,
    count: int,
    seed,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK,
    budget: float = DEFAULT_DRAW_BUDGET,
) -> np.ndarray:
    """``count`` draws of log Y_j = sum_{r <= k} log Gamma(j, 1), chunked like the sampler."""
    if count < 1 or j < 1 or k < 1:
        raise DomainError("j, k and count must be >= 1")
    requested = float(k) * count
    if requested > budget:
        raise BudgetExceeded(requested, budget)
    seed = _as_seed(seed)
    rows_blk = max(1, _BLOCK_DRAWS // k)

    def run(i):
        rng = seed.generator(i)
        rows = min(chunk_size, count - i * chunk_size)
        out = np.empty(rows)
        for r0 in range(0, rows, rows_blk):
            r1 = min(rows, r0 + rows_blk)
            d = rng.gamma(float(j), 1.0, size=(r1 - r0, k))
            np.log(d, out=d)
            out[r0:r1] = d.sum(axis=1)
        return out

    return run_chunks(run, -(-count // chunk_size), threads)


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    e: Ensemble
    sc: ScalingConstants
    seed: SeedSpec
    count: int
    generator: str = GENERATOR_ID
    chunk_size: int = DEFAULT_CHUNK
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size != self.count:
            raise DomainError("values must be a 1-d array of length count")
        if not np.all(np.isfinite(vals)):
            raise DomainError("sample values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def sidecar(self) -> dict:
        return {
            "n": self.e.n,
            "k": self.e.k,
            "alpha_n": self.sc.alpha_n,
            "a_n": self.sc.a_n,
            "b_n": self.sc.b_n,
            "count": self.count,
            "root_seed": self.seed.root_seed,
            "stream": self.seed.stream,
            "chunk_size": self.chunk_size,
            "generator": self.generator,
            **self.metadata,
        }

    def write(self, csv_path: Union[str, Path]) -> tuple[Path, Path]:
        """Write ``index,x_value`` CSV plus a JSON sidecar next to it."""
        csv_path = Path(csv_path)
        lines = ["index,x_value"]
        lines.extend(f"{i},{v:.17g}" for i, v in enumerate(self.values))
        csv_path.write_text("\n".join(lines) + "\n")
        side = csv_path.with_suffix(".json")
        side.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")
        return csv_path, side


def sample_xn(
    e: Ensemble,
    sc: ScalingConstants,
    count: int,
    seed,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK,
    budget: float = DEFAULT_DRAW_BUDGET,
) -> SampleBatch:
    seed = _as_seed(seed)
    raw = sample_raw_max(e.n, e.k, count, seed, threads, chunk_size, budget)
    return SampleBatch(rescale_max(raw, e, sc), e, sc, seed, count, chunk_size=chunk_size)


def _chernoff_c(m: int, s: float, alpha_n: float) -> float:
    return math.exp(-(m * m) / (16 * alpha_n) - m * s / (4 * math.sqrt(alpha_n)))


def _exact_terms(e: Ensemble, sc: ScalingConstants, s_min: float) -> int:
    """Number of m-terms needed so the dropped log-factors total < 1e-15.

    The Chernoff bound covers 4 <= m <= n/2.  Factors with m > n/2 are no
    larger than the one at n/2 (Q(a, y) increases with a), which bounds them
    as a block.
    """
    n = e.n
    half = n // 2
    if half < 4:
        return n
    c_half = _chernoff_c(half, s_min, sc.alpha_n)
    block = (n - half) * c_half
    M = 4
    while M <= half:
        c_M = _chernoff_c(M, s_min, sc.alpha_n)
        if c_M < 0.5:
            # -log(1 - c) <= 2c for c <= 1/2
            total = 2.0 * (float(chernoff_tail_sum(M, s_min, sc.alpha_n)) + block)
            if total < _EXACT_TRUNC_TOL:
                return M
        M = math.ceil(M * 1.25) + 1
    return n


def exact_cdf_k1(e: Ensemble, sc: ScalingConstants, x, extra_terms: int = 0, return_terms=False):
    """P(X_n <= x) for k = 1 as prod_m P(n - m, e^threshold).

    Factors beyond the Chernoff-certified truncation point are dropped.
    """
    if e.k != 1:
        raise DomainError("exact CDF engine needs k = 1")
    if e.n > 10**7:
        raise DomainError("n above 1e7 is not supported")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xa)
    terms = 0
    # process x in slabs so truncation adapts to the local s = a_n + b_n x
    order = np.argsort(xa)
    slab = 64
    for i0 in range(0, xa.size, slab):
        idx = order[i0 : i0 + slab]
        s_min = sc.a_n + sc.b_n * float(xa[idx].min())
        M = min(e.n, _exact_terms(e, sc, s_min) + extra_terms)
        terms = max(terms, M)
        t = sc.centering + (sc.a_n + sc.b_n * xa[idx]) / math.sqrt(sc.alpha_n)
        ex = np.exp(np.minimum(t, 700.0))
        shapes = e.n - np.arange(M, dtype=float)
        acc = np.zeros(idx.size)
        step = max(1, (1 << 20) // idx.size)
        for m0 in range(0, M, step):
            p = reg_gamma_p(shapes[None, m0 : m0 + step], ex[:, None])
            with np.errstate(divide="ignore"):
                acc += np.log(p).sum(axis=1)
        out[idx] = np.exp(acc)
    res = float(out[0]) if np.ndim(x) == 0 else out
    return (res, terms) if return_terms else res
